#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "tomokit/errors.hpp"

namespace tomokit {

using cplx = std::complex<double>;

// Truncation rule for power series: stop once the newest term is below
// max(rel_tol * |partial sum|, abs_floor) three times in a row.
struct SeriesControl {
  int max_terms = 500;
  double rel_tol = 1e-12;
  double abs_floor = 1e-300;

  void check() const {
    if (max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("SeriesControl: rel_tol must lie in (0,1)");
    if (!(abs_floor > 0.0)) throw DomainError("SeriesControl: abs_floor must be positive");
  }
};

// Physicists' Hermite polynomial H_n(x).
inline double hermite(int n, double x) {
  if (n < 0) throw DomainError("hermite: n must be nonnegative");
  double h0 = 1.0;
  if (n == 0) return h0;
  double h1 = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// Associated Laguerre polynomial L_n^{(b)}(x).
inline double assoc_laguerre(int n, double b, double x) {
  if (n < 0) throw DomainError("assoc_laguerre: n must be nonnegative");
  if (!(b > -1.0)) throw DomainError("assoc_laguerre: b must exceed -1");
  double l0 = 1.0;
  if (n == 0) return l0;
  double l1 = 1.0 + b - x;
  for (int k = 1; k < n; ++k) {
    const double l2 = ((2.0 * k + 1.0 + b - x) * l1 - (k + b) * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

namespace detail {

// Lanczos approximation, g = 7, nine terms.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_series(double zm1) {
  double x = kLanczosCoef[0];
  for (std::size_t i = 1; i < kLanczosCoef.size(); ++i) x += kLanczosCoef[i] / (zm1 + static_cast<double>(i));
  return x;
}

// sin(pi z) with the argument reduced first so large |z| keeps its digits.
inline double sin_pi(double z) {
  const double r = z - 2.0 * std::round(0.5 * z);
  return std::sin(std::numbers::pi * r);
}

inline bool is_nonpositive_integer(double z) { return z <= 0.0 && z == std::floor(z); }

}  // namespace detail

inline double gamma_real(double z) {
  if (!std::isfinite(z)) throw DomainError("gamma_real: argument must be finite");
  if (detail::is_nonpositive_integer(z)) throw DomainError("gamma_real: pole at nonpositive integer");
  if (z < 0.5) return std::numbers::pi / (detail::sin_pi(z) * gamma_real(1.0 - z));
  const double zm1 = z - 1.0;
  const double t = zm1 + detail::kLanczosG + 0.5;
  // split the power so the intermediate survives up to z ~ 171
  const double half = std::pow(t, 0.5 * (zm1 + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * detail::lanczos_series(zm1);
}

// log Gamma(z) for z > 0.
inline double lgamma_real(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("lgamma_real: argument must be positive and finite");
  if (z < 0.5) return std::log(std::numbers::pi / (detail::sin_pi(z) * gamma_real(1.0 - z)));
  const double zm1 = z - 1.0;
  const double t = zm1 + detail::kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (zm1 + 0.5) * std::log(t) - t +
         std::log(detail::lanczos_series(zm1));
}

// 1/Gamma(z), entire: zero at the poles of Gamma.
inline double rgamma(double z) {
  if (detail::is_nonpositive_integer(z)) return 0.0;
  if (z > 170.0) return std::exp(-lgamma_real(z));
  return 1.0 / gamma_real(z);
}

inline double pochhammer(double a, int k) {
  if (k < 0) throw DomainError("pochhammer: k must be nonnegative");
  double p = 1.0;
  for (int i = 0; i < k; ++i) p *= a + i;
  return p;
}

inline cplx kummer_1f1(double a, double b, cplx z, const SeriesControl& ctl = {}) {
  ctl.check();
  if (detail::is_nonpositive_integer(b)) throw DomainError("kummer_1f1: b must not be a nonpositive integer");
  cplx term = 1.0;
  cplx sum = 1.0;
  int quiet = 0;
  for (int k = 0; k < ctl.max_terms; ++k) {
    term *= (a + k) / (b + k) * z / static_cast<double>(k + 1);
    sum += term;
    if (term == 0.0) return sum;
    if (std::abs(term) < std::max(ctl.rel_tol * std::abs(sum), ctl.abs_floor)) {
      if (++quiet == 3) return sum;
    } else {
      quiet = 0;
    }
  }
  throw ConvergenceError("kummer_1f1: series did not reach rel_tol within max_terms");
}

// ---------------------------------------------------------------------------
// Parabolic cylinder function D_v(z), v <= 0.
//
// Everything is computed for the scaled function u(z) = e^{z^2/4} D_v(z), which
// obeys u'' = z u' - v u. That scaling absorbs the Gaussian factors that show
// up next to D in tomogram closed forms and in the integral identity
//   int_0^inf x^{a-1} e^{-p x^2 - q x} dx = Gamma(a) (2p)^{-a/2} u_{-a}(q/sqrt(2p)).

enum class PcfMethod { automatic, series, ode, asymptotic };

namespace detail {

struct UPair {
  cplx u;
  cplx du;
};

inline double pcf_origin_value(double v) {
  return std::pow(2.0, 0.5 * v) * std::sqrt(std::numbers::pi) * rgamma(0.5 * (1.0 - v));
}

inline double pcf_origin_slope(double v) {
  return -std::pow(2.0, 0.5 * (v + 1.0)) * std::sqrt(std::numbers::pi) * rgamma(-0.5 * v);
}

// Two-term Kummer representation; fine for small |z|.
inline cplx pcf_u_series(double v, cplx z, const SeriesControl& ctl) {
  const cplx w = 0.5 * z * z;
  return pcf_origin_value(v) * kummer_1f1(-0.5 * v, 0.5, w, ctl) +
         pcf_origin_slope(v) * z * kummer_1f1(0.5 * (1.0 - v), 1.5, w, ctl);
}

// Large-|z| expansion. Returns false when the terms stop shrinking before
// reaching full precision.
inline bool pcf_u_asymptotic(double v, cplx z, UPair& out) {
  constexpr double kTol = 1e-17;
  constexpr int kMaxTerms = 400;
  const cplx inv2z2 = 1.0 / (2.0 * z * z);
  const cplx zpow = std::exp(v * std::log(z));

  cplx term = 1.0, sum = 1.0, dsum = v;
  bool converged = (v == 0.0);
  for (int s = 0; s < kMaxTerms && !converged; ++s) {
    const cplx next = -term * ((-v + 2.0 * s) * (-v + 2.0 * s + 1.0) / (s + 1.0)) * inv2z2;
    if (std::abs(next) > std::abs(term) && s > 0) return false;
    sum += next;
    dsum += (v - 2.0 * (s + 1)) * next;
    term = next;
    if (std::abs(term) <= kTol * std::abs(sum)) converged = true;
  }
  if (!converged) return false;
  out.u = zpow * sum;
  out.du = zpow * dsum / z;

  const double theta = std::arg(z);
  const double rg = rgamma(-v);
  if (std::abs(theta) > 0.5 * std::numbers::pi && rg != 0.0) {
    const double sgn = theta > 0.0 ? 1.0 : -1.0;
    const cplx coef = -std::sqrt(2.0 * std::numbers::pi) * rg *
                      std::exp(cplx(0.0, sgn * std::numbers::pi * v)) *
                      std::exp(0.5 * z * z - (v + 1.0) * std::log(z));
    cplx t2 = 1.0, s2 = 1.0, ds2 = z - (v + 1.0) / z;
    bool ok2 = false;
    for (int s = 0; s < kMaxTerms; ++s) {
      const cplx next = t2 * ((v + 1.0 + 2.0 * s) * (v + 2.0 + 2.0 * s) / (s + 1.0)) * inv2z2;
      if (std::abs(next) > std::abs(t2) && s > 0) return false;
      s2 += next;
      ds2 += next * (z - (v + 1.0 + 2.0 * (s + 1)) / z);
      t2 = next;
      if (std::abs(t2) <= kTol * std::abs(s2)) {
        ok2 = true;
        break;
      }
    }
    if (!ok2) return false;
    out.u += coef * s2;
    out.du += coef * ds2;
  }
  return true;
}

// Taylor-series stepping of u'' = z u' - v u along a straight segment.
inline constexpr double kStepScale = 4.0;
inline UPair pcf_u_ode(double v, cplx from, UPair start, cplx to) {
  const cplx delta = to - from;
  const double length = std::abs(delta);
  if (length == 0.0) return start;
  const cplx dir = delta / length;
  const double sv = std::sqrt(std::abs(v));

  cplx z0 = from;
  UPair cur = start;
  double done = 0.0;
  while (done < length) {
    const double h = std::min({2.0, kStepScale / (std::abs(z0) + sv + 1.0), length - done});
    const cplx hc = dir * h;
    cplx a_prev = cur.u, a_cur = cur.du;
    cplx usum = cur.u + cur.du * hc;
    cplx dsum = cur.du;
    cplx hp = hc;
    int quiet = 0;
    for (int k = 0; k < 200; ++k) {
      const cplx a_next = (z0 * (k + 1.0) * a_cur + (k - v) * a_prev) / ((k + 1.0) * (k + 2.0));
      const cplx dterm = (k + 2.0) * a_next * hp;
      hp *= hc;
      const cplx uterm = a_next * hp;
      usum += uterm;
      dsum += dterm;
      const double scale = std::abs(usum) + std::abs(dsum) * h + 1e-300;
      if (k > 3 && std::abs(uterm) + std::abs(dterm) * h <= 1e-17 * scale) {
        if (++quiet == 2) break;
      } else {
        quiet = 0;
      }
      a_prev = a_cur;
      a_cur = a_next;
    }
    cur = {usum, dsum};
    z0 += hc;
    done += h;
  }
  return cur;
}

inline double pcf_asymptotic_radius(double v) { return 10.0 + 1.2 * std::abs(v); }

// u_v(z) for Re z >= 0 and any real order. Between the series disc and the
// asymptotic radius the ODE is marched from the positive real axis, where u is
// recessive: along such a segment u grows relative to its companion.
inline cplx pcf_u_right(double v, cplx z, const SeriesControl& ctl) {
  const double r = std::abs(z);
  if (r <= 2.0) return pcf_u_series(v, z, ctl);
  UPair a;
  if (r >= 8.0 && pcf_u_asymptotic(v, z, a)) return a.u;
  // smallest real start point where the expansion is accurate
  double start = std::max({9.0, r, z.real() + 1.0});
  while (!pcf_u_asymptotic(v, start, a)) {
    start *= 1.15;
    if (start > 1e4) throw ConvergenceError("pcf_D: asymptotic start value failed to converge");
  }
  return pcf_u_ode(v, start, a, z).u;
}

// Left half-plane through
//   D_v(z) = sqrt(2 pi)/Gamma(-v) e^{i pi (v+1)/2} D_{-v-1}(-iz) - e^{i pi (v+1)} D_v(-z),
// both pieces being right-half-plane evaluations. Marching directly into this
// region loses the exponentially small part of D that dominates far out.
inline cplx pcf_u_left(double v, cplx z, const SeriesControl& ctl) {
  const bool lower = z.imag() < 0.0;
  if (lower) z = std::conj(z);
  const double pi = std::numbers::pi;
  cplx u = -std::exp(cplx(0.0, pi * (v + 1.0))) * pcf_u_right(v, -z, ctl);
  const double rg = rgamma(-v);
  if (rg != 0.0) {
    u += std::sqrt(2.0 * pi) * rg * std::exp(cplx(0.0, 0.5 * pi * (v + 1.0))) * std::exp(0.5 * z * z) *
         pcf_u_right(-v - 1.0, cplx(0.0, -1.0) * z, ctl);
  }
  return lower ? std::conj(u) : u;
}

}  // namespace detail

// e^{z^2/4} D_order(z).
inline cplx pcf_D_scaled(double order, cplx z, PcfMethod method = PcfMethod::automatic,
                         const SeriesControl& ctl = {}) {
  if (!(order <= 0.0) || !std::isfinite(order)) throw DomainError("pcf_D: order must be finite and <= 0");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("pcf_D: argument must be finite");

  cplx result;
  switch (method) {
    case PcfMethod::series:
      result = detail::pcf_u_series(order, z, ctl);
      break;
    case PcfMethod::asymptotic: {
      detail::UPair a;
      if (z == 0.0 || !detail::pcf_u_asymptotic(order, z, a))
        throw DomainError("pcf_D: asymptotic expansion not accurate at this |z|");
      result = a.u;
      break;
    }
    case PcfMethod::ode: {
      if (z.real() < 0.0) throw DomainError("pcf_D: ODE continuation is only set up for Re z >= 0");
      const double r_asym = detail::pcf_asymptotic_radius(order);
      const cplx start(std::max(r_asym, z.real() + 1.0), 0.0);
      detail::UPair a;
      if (!detail::pcf_u_asymptotic(order, start, a)) throw ConvergenceError("pcf_D: asymptotic start value failed");
      result = detail::pcf_u_ode(order, start, a, z).u;
      break;
    }
    case PcfMethod::automatic:
      result = z.real() >= 0.0 ? detail::pcf_u_right(order, z, ctl) : detail::pcf_u_left(order, z, ctl);
      break;
  }
  if (!std::isfinite(result.real()) || !std::isfinite(result.imag()))
    throw DomainError("pcf_D: value overflows double precision");
  return result;
}

inline cplx pcf_D(double order, cplx z, PcfMethod method = PcfMethod::automatic) {
  return std::exp(-0.25 * z * z) * pcf_D_scaled(order, z, method);
}

// The one-term Kummer relation D_v(z) = 2^{-v/2} e^{-z^2/4} 1F1(-v; 1/2; z^2/2) / Gamma(1/2 + v).
// It is not a valid representation of D_v in general; kept so its error can be reported.
inline cplx pcf_D_single_term(double order, cplx z, const SeriesControl& ctl = {}) {
  return std::pow(2.0, -0.5 * order) * std::exp(-0.25 * z * z) * rgamma(0.5 + order) *
         kummer_1f1(-order, 0.5, 0.5 * z * z, ctl);
}

struct RepresentationCheck {
  double order;
  cplx z;
  cplx reference;
  cplx single_term;
  double rel_discrepancy;
};

inline RepresentationCheck check_single_term_representation(double order, cplx z) {
  RepresentationCheck c{order, z, pcf_D(order, z), pcf_D_single_term(order, z), 0.0};
  c.rel_discrepancy = std::abs(c.single_term - c.reference) / std::max(std::abs(c.reference), 1e-300);
  return c;
}

}  // namespace tomokit
