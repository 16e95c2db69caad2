#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "tomokit/grid.hpp"
#include "tomokit/io.hpp"
#include "tomokit/parallel.hpp"
#include "tomokit/state_catalog.hpp"
#include "tomokit/tomogram.hpp"

namespace tomokit {

// Interior local maxima above rel_floor * peak. The a = 0 curves carry genuine
// low ripples from the wall at x = 0 (below 1e-3 of the peak), which the floor
// keeps out of the mode count.
inline std::vector<std::size_t> local_modes(const std::vector<double>& w, double rel_floor = 1e-2) {
  std::vector<std::size_t> out;
  if (w.size() < 3) return out;
  const double floor = rel_floor * *std::max_element(w.begin(), w.end());
  for (std::size_t i = 1; i + 1 < w.size(); ++i)
    if (w[i] > w[i - 1] && w[i] >= w[i + 1] && w[i] > floor) out.push_back(i);
  return out;
}

struct FigureCurve {
  std::string label;
  StateModel model;
  std::vector<double> X;
  std::vector<double> W;

  double trapezoid_mass() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < X.size(); ++i) acc += 0.5 * (W[i] + W[i - 1]) * (X[i] - X[i - 1]);
    return acc;
  }
  std::vector<std::size_t> modes() const { return local_modes(W); }
  double mode_position() const { return X[static_cast<std::size_t>(std::max_element(W.begin(), W.end()) - W.begin())]; }
};

// The frame of the published curves is not stated; (1, 0.5) is used and recorded.
inline FrameParams default_figure_frame() { return {1.0, 0.5}; }

// Union of the supports, sampled with `nodes` points.
inline UniformGrid figure_grid(const std::vector<StateModel>& models, const FrameParams& frame, int nodes = 2001) {
  double lo = 0.0, hi = 0.0;
  for (const auto& m : models) {
    const Interval s = tomogram_support(m, frame);
    lo = std::min(lo, s.lo);
    hi = std::max(hi, s.hi);
  }
  return {lo, hi, nodes};
}

inline std::vector<FigureCurve> figure_curves(const std::vector<StateModel>& models, const FrameParams& frame,
                                              const std::optional<UniformGrid>& grid = std::nullopt) {
  const UniformGrid g = grid ? *grid : figure_grid(models, frame);
  g.check("figure grid");
  const auto xs = g.values();
  std::vector<FigureCurve> curves;
  for (const auto& m : models) curves.push_back({m.descriptor(), m, xs, std::vector<double>(xs.size())});
  parallel_for(curves.size() * xs.size(), [&](std::size_t k) {
    auto& c = curves[k / xs.size()];
    const std::size_t i = k % xs.size();
    c.W[i] = tomogram(c.model, xs[i], frame);
  });
  return curves;
}

// Figure 1: half oscillator (a = 0) levels. Figure 2: HO next to the PHO for each a, per level.
inline std::vector<StateModel> figure_models(int fig, const std::vector<int>& ns, const std::vector<double>& as) {
  std::vector<StateModel> out;
  if (fig == 1) {
    for (int n : ns) out.push_back(StateModel::pho(0.0, n));
  } else if (fig == 2) {
    for (int n : ns) {
      out.push_back(StateModel::ho(n));
      for (double a : as) out.push_back(StateModel::pho(a, n));
    }
  } else {
    throw DomainError("figures: --fig must be 1 or 2");
  }
  return out;
}

inline std::string figure_csv(const std::vector<FigureCurve>& curves, const FrameParams& frame, const Provenance& prov) {
  std::string s = prov.csv_comment() + "curve,X,mu,nu,W\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.X.size(); ++i)
      s += "\"" + c.label + "\"," + format_double(c.X[i]) + "," + format_double(frame.mu) + "," + format_double(frame.nu) + "," +
           format_double(c.W[i]) + "\n";
  return s;
}

inline json figure_json(const std::vector<FigureCurve>& curves, const FrameParams& frame, const Provenance& prov) {
  json arr = json::array();
  for (const auto& c : curves) {
    json modes = json::array();
    for (auto i : c.modes()) modes.push_back(c.X[i]);
    arr.push_back({{"curve", c.label}, {"X", c.X}, {"W", c.W}, {"mass", c.trapezoid_mass()}, {"modes", modes},
                   {"mode_position", c.mode_position()}});
  }
  return {{"provenance", prov.to_json()}, {"frame", {{"mu", frame.mu}, {"nu", frame.nu}}}, {"mode_floor", 1e-2}, {"curves", arr}};
}

}  // namespace tomokit
