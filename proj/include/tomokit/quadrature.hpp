#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "tomokit/errors.hpp"

namespace tomokit {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Fixed 20-point Gauss-Legendre rule on [-1, 1], expanded from Boost's
// half-rule (which stores only the nonnegative abscissae).
struct GaussRule {
  static constexpr int order = 20;
  std::vector<double> x;
  std::vector<double> w;

  static const GaussRule& get() {
    static const GaussRule rule = [] {
      using G = boost::math::quadrature::gauss<double, order>;
      GaussRule r;
      const auto& a = G::abscissa();
      const auto& wt = G::weights();
      for (std::size_t i = a.size(); i-- > 0;) {
        r.x.push_back(-a[i]);
        r.w.push_back(wt[i]);
      }
      for (std::size_t i = 0; i < a.size(); ++i) {
        r.x.push_back(a[i]);
        r.w.push_back(wt[i]);
      }
      return r;
    }();
    return rule;
  }
};

// Composite Gauss-Legendre over [lo, hi] split into `panels` equal panels.
template <class F>
auto composite_gauss(F&& f, double lo, double hi, int panels) -> decltype(f(0.0)) {
  using R = decltype(f(0.0));
  const auto& g = GaussRule::get();
  const double h = (hi - lo) / panels;
  R total{};
  for (int p = 0; p < panels; ++p) {
    const double c = lo + (p + 0.5) * h;
    R part{};
    for (std::size_t i = 0; i < g.x.size(); ++i) part += g.w[i] * f(c + 0.5 * h * g.x[i]);
    total += part * (0.5 * h);
  }
  return total;
}

// Nodes and weights of the same composite rule, for callers that reuse them.
inline void composite_gauss_nodes(double lo, double hi, int panels, std::vector<double>& x, std::vector<double>& w) {
  const auto& g = GaussRule::get();
  const double h = (hi - lo) / panels;
  x.clear();
  w.clear();
  x.reserve(static_cast<std::size_t>(panels) * g.x.size());
  w.reserve(x.capacity());
  for (int p = 0; p < panels; ++p) {
    const double c = lo + (p + 0.5) * h;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      x.push_back(c + 0.5 * h * g.x[i]);
      w.push_back(0.5 * h * g.w[i]);
    }
  }
}

// Integral over the whole real line via X = c + s tan(t); suited to densities
// with algebraic tails. The mapped integrand vanishes at t = +-pi/2 when f
// decays faster than 1/X^2.
template <class F>
double integrate_real_line(F&& f, double center, double scale, int panels = 200) {
  const double half_pi = 0.5 * std::numbers::pi;
  auto g = [&](double t) {
    const double c = std::cos(t);
    if (c <= 0.0) return 0.0;
    const double x = center + scale * std::tan(t);
    return f(x) * scale / (c * c);
  };
  return composite_gauss(g, -half_pi, half_pi, panels);
}

// Adaptive Gauss-Kronrod with an error check. Works for real or complex
// integrands; infinite limits are mapped by Boost. Oscillatory integrals can
// be far smaller than the integral of |f|; l1_tol accepts an error estimate
// below l1_tol * integral of |f| for those.
template <class F>
auto integrate_adaptive(F&& f, double lo, double hi, double rel_tol = 1e-12, unsigned max_depth = 12,
                        double l1_tol = 1e-14) -> decltype(f(0.0)) {
  double err = 0.0, l1 = 0.0;
  const auto v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, max_depth, rel_tol, &err, &l1);
  if (!std::isfinite(std::abs(v))) throw QuadratureError("adaptive quadrature produced a non-finite value");
  if (err > std::max(1e3 * rel_tol * std::abs(v), 1e-300) && err > l1_tol * l1)
    throw QuadratureError("adaptive quadrature did not reach the requested tolerance");
  return v;
}

// Integral over the whole line: adaptive on the bulk [lo, hi] plus the two
// semi-infinite tails, which Boost maps onto finite intervals. Meant for
// densities whose tails may be algebraic rather than Gaussian.
template <class F>
auto integrate_line_with_tails(F&& f, double lo, double hi, double rel_tol = 1e-9, double l1_tol = 1e-14)
    -> decltype(f(0.0)) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inf = std::numeric_limits<double>::infinity();
  const auto bulk = integrate_adaptive(f, lo, hi, rel_tol, 12, l1_tol);
  double err = 0.0;
  const auto right = GK::integrate(f, hi, inf, 12, rel_tol, &err);
  const auto left = GK::integrate(f, -inf, lo, 12, rel_tol, &err);
  const auto total = bulk + left + right;
  if (!std::isfinite(std::abs(total))) throw QuadratureError("tail quadrature produced a non-finite value");
  return total;
}

}  // namespace tomokit
