#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "tomokit/errors.hpp"
#include "tomokit/quadrature.hpp"
#include "tomokit/state_catalog.hpp"
#include "tomokit/tomogram.hpp"

namespace tomokit {

// Tabulated CDF on equispaced nodes. Segment masses use Simpson's rule on the
// node and midpoint densities; inside a segment the CDF is the exact integral
// of the interpolating quadratic, so it is C^1 and cheap to invert.
class CdfTable {
 public:
  CdfTable() = default;

  CdfTable(const std::function<double(double)>& density, double lo, double hi, int nodes) : lo_(lo), hi_(hi) {
    if (nodes < 2 || !(hi > lo)) throw DomainError("CdfTable: need at least two nodes on a nonempty interval");
    h_ = (hi - lo) / (nodes - 1);
    f_.resize(static_cast<std::size_t>(nodes));
    m_.resize(static_cast<std::size_t>(nodes - 1));
    F_.assign(static_cast<std::size_t>(nodes), 0.0);
    for (int i = 0; i < nodes; ++i) f_[static_cast<std::size_t>(i)] = std::max(0.0, density(lo + i * h_));
    for (int i = 0; i + 1 < nodes; ++i) m_[static_cast<std::size_t>(i)] = std::max(0.0, density(lo + (i + 0.5) * h_));
    for (std::size_t i = 0; i + 1 < f_.size(); ++i) F_[i + 1] = F_[i] + h_ * (f_[i] + 4.0 * m_[i] + f_[i + 1]) / 6.0;
    if (!(F_.back() > 0.0) || !std::isfinite(F_.back())) throw DomainError("CdfTable: density has no mass on the range");
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double total() const { return F_.back(); }

  // Normalized CDF of the tabulated (range-truncated) distribution.
  double operator()(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    const auto i = std::min(static_cast<std::size_t>((x - lo_) / h_), f_.size() - 2);
    return partial(i, (x - lo_ - static_cast<double>(i) * h_) / h_) / total();
  }

  // Smallest x with CDF(x) >= p.
  double inverse(double p) const {
    const double target = std::clamp(p, 0.0, 1.0) * total();
    auto it = std::upper_bound(F_.begin(), F_.end(), target);
    std::size_t i = it == F_.begin() ? 0 : static_cast<std::size_t>(it - F_.begin()) - 1;
    i = std::min(i, f_.size() - 2);
    double a = 0.0, b = 1.0;
    double u = F_[i + 1] > F_[i] ? (target - F_[i]) / (F_[i + 1] - F_[i]) : 0.5;
    for (int it2 = 0; it2 < 60; ++it2) {
      const double g = partial(i, u) - target;
      if (std::abs(g) <= 1e-15 * total()) break;
      if (g > 0) b = u; else a = u;
      const double dg = h_ * quad_density(i, u);
      double next = dg > 0 ? u - g / dg : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (std::abs(next - u) < 1e-15) {
        u = next;
        break;
      }
      u = next;
    }
    return lo_ + (static_cast<double>(i) + u) * h_;
  }

 private:
  double quad_density(std::size_t i, double u) const {
    return f_[i] * (2 * u * u - 3 * u + 1) + m_[i] * (4 * u - 4 * u * u) + f_[i + 1] * (2 * u * u - u);
  }
  double partial(std::size_t i, double u) const {
    const double u2 = u * u, u3 = u2 * u;
    return F_[i] + h_ * (f_[i] * (2 * u3 / 3 - 1.5 * u2 + u) + m_[i] * (2 * u2 - 4 * u3 / 3) + f_[i + 1] * (2 * u3 / 3 - 0.5 * u2));
  }

  double lo_ = 0.0, hi_ = 1.0, h_ = 1.0;
  std::vector<double> f_, m_, F_;
};

// A univariate pdf. [lo, hi] is the bulk; `tails` says mass may extend past it
// (algebraic tails), which quadrature callers must then integrate. A finite
// point_mass means the distribution is that mass concentrated at X = 0.
struct PdfHandle {
  std::function<double(double)> density;
  std::function<double(double)> cdf;
  double lo = 0.0;
  double hi = 0.0;
  bool tails = false;
  bool has_density = true;
  double point_mass = std::numeric_limits<double>::quiet_NaN();
  std::string name;
  // Sorted atoms of an empirical distribution (equal weights); null otherwise.
  std::shared_ptr<const std::vector<double>> atoms;

  bool is_point_mass() const { return std::isfinite(point_mass); }
};

// Pdf of one frame; a PdfFamily assigns one to every frame.
using PdfFamily = std::function<PdfHandle(const FrameParams&)>;

inline constexpr int kCdfNodes = 4096;

namespace detail {

inline std::function<double(double)> lazy_cdf(std::function<double(double)> density, double lo, double hi) {
  struct State {
    std::once_flag once;
    CdfTable table;
  };
  auto st = std::make_shared<State>();
  return [st, density = std::move(density), lo, hi](double x) {
    std::call_once(st->once, [&] { st->table = CdfTable(density, lo, hi, kCdfNodes); });
    return st->table(x);
  };
}

}  // namespace detail

inline PdfHandle tomogram_pdf(const StateModel& model, const FrameParams& frame, const QuadratureConfig& cfg = {}) {
  PdfHandle p;
  p.name = model.descriptor();
  if (frame.degenerate()) {
    // W(X|0,0) is a delta at 0 carrying the state's total probability.
    p.point_mass = tomogram_mass(model, {1.0, 0.0}, cfg);
    p.density = [](double) { return 0.0; };
    p.cdf = [m = p.point_mass](double x) { return x >= 0.0 ? m : 0.0; };
    p.has_density = false;
    return p;
  }
  const Interval sup = tomogram_support(model, frame, cfg);
  p.lo = sup.lo;
  p.hi = sup.hi;
  p.tails = is_pho(model);
  p.density = [model, frame, cfg](double X) { return tomogram(model, X, frame, cfg); };
  p.cdf = detail::lazy_cdf(p.density, p.lo, p.hi);
  return p;
}

inline PdfFamily tomogram_family(const StateModel& model, const QuadratureConfig& cfg = {}) {
  return [model, cfg](const FrameParams& f) { return tomogram_pdf(model, f, cfg); };
}

// Piecewise-linear pdf through (x_i, w_i), zero outside; not renormalized, so
// a table that is not a pdf stays visible as such.
inline PdfHandle tabulated_pdf(std::vector<double> xs, std::vector<double> ws, std::string name = "table") {
  if (xs.size() != ws.size() || xs.size() < 2) throw DomainError("tabulated pdf: need >= 2 (X, W) rows");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw DomainError("tabulated pdf: X must be strictly increasing");
  for (double w : ws)
    if (!std::isfinite(w)) throw DomainError("tabulated pdf: W must be finite");
  PdfHandle p;
  p.name = std::move(name);
  p.lo = xs.front();
  p.hi = xs.back();
  auto shared = std::make_shared<const std::pair<std::vector<double>, std::vector<double>>>(std::move(xs), std::move(ws));
  p.density = [shared](double x) {
    const auto& [X, W] = *shared;
    if (x < X.front() || x > X.back()) return 0.0;
    auto it = std::upper_bound(X.begin(), X.end(), x);
    if (it == X.end()) return W.back();
    const auto i = static_cast<std::size_t>(it - X.begin()) - 1;
    const double u = (x - X[i]) / (X[i + 1] - X[i]);
    return W[i] + u * (W[i + 1] - W[i]);
  };
  p.cdf = [shared](double x) {
    const auto& [X, W] = *shared;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < X.size(); ++i) {
      if (x <= X[i]) break;
      const double b = std::min(x, X[i + 1]);
      const double wb = W[i] + (b - X[i]) / (X[i + 1] - X[i]) * (W[i + 1] - W[i]);
      acc += 0.5 * (W[i] + wb) * (b - X[i]);
    }
    return acc;
  };
  return p;
}

// Integral of the density; point masses count in full.
inline double pdf_mass(const PdfHandle& p) {
  if (p.is_point_mass()) return p.point_mass;
  if (!p.has_density) return p.cdf(p.hi) - p.cdf(std::nextafter(p.lo, -std::numeric_limits<double>::infinity()));
  if (p.tails) return integrate_line_with_tails(p.density, p.lo, p.hi);
  return integrate_adaptive(p.density, p.lo, p.hi, 1e-10);
}

}  // namespace tomokit
