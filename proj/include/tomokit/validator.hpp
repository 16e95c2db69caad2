#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tomokit/charfun.hpp"
#include "tomokit/errors.hpp"
#include "tomokit/grid.hpp"
#include "tomokit/io.hpp"
#include "tomokit/parallel.hpp"

namespace tomokit {

struct Tolerances {
  double trace = 1e-6;        // |phi(1;0,0) - 1|
  double hermiticity = 1e-8;  // sup |phi(1;mu,nu) - phi(-1;-mu,-nu)|
  double purity = 1e-3;       // value must lie in [-purity, 1 + purity]
  double diag = 1e-6;         // rho(y,y) >= -diag
  double diag_imag = 1e-8;    // |Im rho(y,y)| <= diag_imag
  double boundary = 1e-8;     // integrand magnitude on the lattice edge that triggers a truncation warning
};

// Quadrature-exact providers get the tight class; sample-based ones the loose
// class, with the hermiticity bound widened to the Monte Carlo scale when n is small.
inline Tolerances default_tolerances(const CharFnProvider& p) {
  if (!p.is_empirical()) return {};
  Tolerances t;
  t.trace = 1e-3;
  const double n = static_cast<double>(std::max<std::size_t>(p.sample_size(), 1));
  t.hermiticity = std::max(1e-2, 5.0 * std::sqrt(2.0 / n));
  t.purity = 1e-2;
  t.diag = 1e-2;
  t.diag_imag = 1e-2;
  t.boundary = 1e-2;
  return t;
}

// The default lattice is wider than the y grid: catalog characteristic
// functions such as the alpha = 2 cat still carry O(1e-4) weight at |mu| = 6.
struct ValidationConfig {
  FrameLattice lattice{{-16.0, 16.0, 321}, {-16.0, 16.0, 321}};
  UniformGrid y{-6.0, 6.0, 121};
  std::optional<Tolerances> tolerances;
  bool prefer_provider_lattice = true;  // empirical families carry their own lattice

  FrameLattice effective_lattice(const CharFnProvider& p) const {
    if (prefer_provider_lattice)
      if (auto l = p.preferred_lattice()) return *l;
    return lattice;
  }
};

struct TraceCheck {
  cplx value{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  bool pass = false;
};

inline TraceCheck check_trace(const CharFnProvider& p, const Tolerances& tol) {
  TraceCheck r;
  r.value = p(1.0, 0.0, 0.0);
  r.pass = std::abs(r.value - 1.0) <= tol.trace;
  return r;
}

inline TraceCheck check_trace(const CharFnProvider& p) { return check_trace(p, default_tolerances(p)); }

// Hermiticity of the reconstructed kernel, rho*(y,y') = rho(y',y), written on
// phi and evaluated with separate t = +1 and t = -1 calls.
inline double check_hermiticity(const CharFnProvider& p, const std::vector<double>& nu_grid,
                                const std::vector<double>& mu_grid) {
  std::vector<double> row_sup(mu_grid.size(), 0.0);
  parallel_for(mu_grid.size(), [&](std::size_t i) {
    const double mu = mu_grid[i];
    double s = 0.0;
    for (double nu : nu_grid) s = std::max(s, std::abs(p(1.0, mu, nu) - p(-1.0, -mu, -nu)));
    row_sup[i] = s;
  });
  return row_sup.empty() ? 0.0 : *std::max_element(row_sup.begin(), row_sup.end());
}

struct OverlapCheck {
  double value = std::numeric_limits<double>::quiet_NaN();
  double imag = 0.0;
  double boundary_max = 0.0;  // largest |integrand| on the lattice edge
  bool pass = false;
};

namespace detail {

template <class Integrand>
OverlapCheck lattice_double_integral(const FrameLattice& L, Integrand&& f) {
  const auto mus = L.mu.values(), nus = L.nu.values();
  const auto wm = trapezoid_weights(L.mu), wn = trapezoid_weights(L.nu);
  std::vector<cplx> row(mus.size());
  std::vector<double> edge(mus.size(), 0.0);
  parallel_for(mus.size(), [&](std::size_t i) {
    cplx acc = 0.0;
    double e = 0.0;
    const bool mu_edge = i == 0 || i + 1 == mus.size();
    for (std::size_t j = 0; j < nus.size(); ++j) {
      const cplx v = f(mus[i], nus[j]);
      acc += wn[j] * v;
      if (mu_edge || j == 0 || j + 1 == nus.size()) e = std::max(e, std::abs(v));
    }
    row[i] = wm[i] * acc;
    edge[i] = e;
  });
  cplx total = 0.0;
  for (const auto& r : row) total += r;
  total /= 2.0 * std::numbers::pi;
  OverlapCheck out;
  out.value = total.real();
  out.imag = total.imag();
  out.boundary_max = edge.empty() ? 0.0 : *std::max_element(edge.begin(), edge.end());
  return out;
}

}  // namespace detail

// (1/2pi) iint phi1(1;mu,nu) phi2(1;-mu,-nu) dmu dnu on the lattice (trapezoid
// rule); equals Tr(rho1 rho2), and the purity when p1 = p2.
inline OverlapCheck check_overlap(const CharFnProvider& p1, const CharFnProvider& p2, const FrameLattice& lattice,
                                  double band = 1e-3) {
  auto r = detail::lattice_double_integral(lattice, [&](double mu, double nu) { return p1(1.0, mu, nu) * p2(1.0, -mu, -nu); });
  r.pass = r.value >= -band && r.value <= 1.0 + band;
  return r;
}

struct DiagCheck {
  double diag_min = std::numeric_limits<double>::quiet_NaN();
  double imag_max = 0.0;
  double boundary_max = 0.0;
  std::vector<double> values;  // Re rho(y,y) on the y grid
  bool pass = false;
};

// rho(y,y) = (1/2pi) int phi(1;mu,0) e^{-i mu y} dmu on the lattice's mu grid.
inline DiagCheck check_diag_positivity(const CharFnProvider& p, const std::vector<double>& y_grid, const UniformGrid& mu_grid,
                                       const Tolerances& tol = {}) {
  const auto mus = mu_grid.values();
  const auto w = trapezoid_weights(mu_grid);
  std::vector<cplx> phi(mus.size());
  parallel_for(mus.size(), [&](std::size_t i) { phi[i] = p(1.0, mus[i], 0.0); });
  DiagCheck r;
  r.boundary_max = std::max(std::abs(phi.front()), std::abs(phi.back()));
  r.values.resize(y_grid.size());
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < y_grid.size(); ++k) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < mus.size(); ++i) acc += w[i] * phi[i] * std::polar(1.0, -mus[i] * y_grid[k]);
    acc /= 2.0 * std::numbers::pi;
    r.values[k] = acc.real();
    dmin = std::min(dmin, acc.real());
    r.imag_max = std::max(r.imag_max, std::abs(acc.imag()));
  }
  r.diag_min = dmin;
  r.pass = dmin >= -tol.diag && r.imag_max <= tol.diag_imag;
  return r;
}

struct ValidationReport {
  std::string provider;
  std::string provider_kind;
  TraceCheck trace_check;
  double hermiticity_sup = std::numeric_limits<double>::quiet_NaN();
  bool hermiticity_pass = false;
  OverlapCheck purity;
  DiagCheck diag;
  bool overall = false;
  FrameLattice lattice;
  UniformGrid y;
  Tolerances tolerances;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
  std::vector<FrameParams> divergent_frames;

  static constexpr const char* kOverallMeaning =
      "passes the necessary conditions on phi (trace, hermiticity, purity bound, diagonal positivity); "
      "positivity of rho is not certified here, see the reconstruction eigenvalues";

  double diag_min() const { return diag.diag_min; }

  json to_json() const {
    auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
    auto grid = [&](const UniformGrid& g) { return json{{"min", g.lo}, {"max", g.hi}, {"count", g.nodes}}; };
    json div = json::array();
    for (const auto& f : divergent_frames) div.push_back({f.mu, f.nu});
    return {
        {"provider", provider},
        {"provider_kind", provider_kind},
        {"trace_check", {{"value", {num(trace_check.value.real()), num(trace_check.value.imag())}}, {"pass", trace_check.pass}}},
        {"hermiticity_sup", num(hermiticity_sup)},
        {"hermiticity_pass", hermiticity_pass},
        {"purity", {{"value", num(purity.value)}, {"pass", purity.pass}}},
        {"diag_min", num(diag.diag_min)},
        {"diag_imag_max", num(diag.imag_max)},
        {"diag_pass", diag.pass},
        {"overall", overall},
        {"overall_meaning", kOverallMeaning},
        {"lattice", {{"mu", grid(lattice.mu)}, {"nu", grid(lattice.nu)}, {"y", grid(y)}, {"rule", "trapezoid"}}},
        {"tolerances",
         {{"trace", tolerances.trace},
          {"hermiticity", tolerances.hermiticity},
          {"purity_band", tolerances.purity},
          {"diag_floor", -tolerances.diag},
          {"diag_imag", tolerances.diag_imag},
          {"boundary_warning", tolerances.boundary}}},
        {"warnings", warnings},
        {"errors", errors},
        {"divergent_frames", div},
    };
  }
};

namespace detail {

template <class Fn>
void guarded(ValidationReport& r, const char* check, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    r.errors.push_back(std::string(check) + ": " + e.kind() + ": " + e.what());
  } catch (const std::exception& e) {
    r.errors.push_back(std::string(check) + ": error: " + e.what());
  }
}

}  // namespace detail

// Runs every check; a check that throws is recorded in `errors` and counts as failed.
inline ValidationReport validate(const CharFnProvider& p, const ValidationConfig& cfg = {}) {
  ValidationReport r;
  r.provider = p.name();
  r.provider_kind = to_string(p.kind());
  r.lattice = cfg.effective_lattice(p);
  r.lattice.mu.check("mu lattice");
  r.lattice.nu.check("nu lattice");
  cfg.y.check("y grid");
  r.y = cfg.y;
  r.tolerances = cfg.tolerances.value_or(default_tolerances(p));
  const Tolerances& tol = r.tolerances;
  const auto mus = r.lattice.mu.values(), nus = r.lattice.nu.values();

  for (double mu : mus)
    for (double nu : nus)
      if (p.divergent_at(mu, nu)) r.divergent_frames.push_back({mu, nu});
  if (!r.divergent_frames.empty())
    r.warnings.push_back(std::to_string(r.divergent_frames.size()) +
                         " lattice frame(s) have a divergent parameter map; the radial limit is used there");

  detail::guarded(r, "trace", [&] { r.trace_check = check_trace(p, tol); });
  detail::guarded(r, "hermiticity", [&] {
    r.hermiticity_sup = check_hermiticity(p, nus, mus);
    r.hermiticity_pass = r.hermiticity_sup <= tol.hermiticity;
  });
  detail::guarded(r, "purity", [&] {
    r.purity = check_overlap(p, p, r.lattice, tol.purity);
    if (r.purity.boundary_max > tol.boundary)
      r.warnings.push_back("purity: integrand reaches " + format_double(r.purity.boundary_max) +
                           " on the lattice edge; the lattice may truncate phi");
  });
  detail::guarded(r, "diagonal", [&] {
    r.diag = check_diag_positivity(p, cfg.y.values(), r.lattice.mu, tol);
    if (r.diag.boundary_max > tol.boundary)
      r.warnings.push_back("diagonal: |phi(1;mu,0)| reaches " + format_double(r.diag.boundary_max) +
                           " on the lattice edge; the lattice may truncate phi");
  });
  r.overall = r.errors.empty() && r.trace_check.pass && r.hermiticity_pass && r.purity.pass && r.diag.pass;
  return r;
}

// The exponential-family form of the same gate: phi is assembled from h, tau,
// eta and the log-normalizer, then checked exactly like any other provider.
inline ValidationReport expfamily_gate(std::shared_ptr<const ExpFamilySpec> spec, const ValidationConfig& cfg = {},
                                       const QuadratureConfig& qcfg = {}) {
  return validate(CharFnProvider::expfamily(std::move(spec), qcfg), cfg);
}

}  // namespace tomokit
