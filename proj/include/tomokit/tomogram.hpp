#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tomokit/errors.hpp"
#include "tomokit/io.hpp"
#include "tomokit/parallel.hpp"
#include "tomokit/quadrature.hpp"
#include "tomokit/special_functions.hpp"
#include "tomokit/state_catalog.hpp"

namespace tomokit {

// Reference frame X = mu q + nu p.
struct FrameParams {
  double mu = 1.0;
  double nu = 0.0;

  double variance_scale() const { return mu * mu + nu * nu; }
  bool degenerate() const { return mu == 0.0 && nu == 0.0; }
  bool operator==(const FrameParams&) const = default;
};

inline FrameParams optical_frame(double phi) { return {std::cos(phi), std::sin(phi)}; }

inline FrameParams frame_from_squeeze(double s, double phi) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("squeeze parameter must be positive");
  return {s * std::cos(phi), std::sin(phi) / s};
}

struct QuadratureConfig {
  std::optional<double> x_max;  // half-width of the y integral; default from the state's support
  int nodes = 4096;
  double nu_epsilon = 1e-3;  // below this |nu| the nu -> 0 limit is used

  void check() const {
    if (nodes < 64) throw DomainError("QuadratureConfig: nodes must be >= 64");
    if (x_max && !(*x_max > 0.0)) throw DomainError("QuadratureConfig: x_max must be positive");
    if (!(nu_epsilon > 0.0)) throw DomainError("QuadratureConfig: nu_epsilon must be positive");
  }
};

// Controls for the pseudoharmonic closed form. The Laguerre expansion
// terminates at k = n; literal_rising_pochhammer switches to the
// nonterminating (n)_k coefficients, summed under `series`.
struct PhoOptions {
  bool literal_rising_pochhammer = false;
  SeriesControl series{};
};

namespace detail {

inline void require_frame(const FrameParams& f) {
  if (!std::isfinite(f.mu) || !std::isfinite(f.nu)) throw DomainError("frame parameters must be finite");
  if (f.degenerate()) throw DegenerateFrameError("mu = nu = 0: the tomogram is a point mass at X = 0");
}

// W(X|mu,0) = |psi(X/mu)|^2 / |mu|
inline double tomogram_position_limit(const StateModel& m, double X, double mu) {
  return std::norm(wavefunction(m, X / mu)) / std::abs(mu);
}

inline double ho_tomogram(const HarmonicOscillator& s, double X, const FrameParams& f) {
  // exp(-X^2/s^2) H_n(X/s)^2 / (sqrt(pi) s 2^n n!), evaluated through the
  // normalized Hermite function to stay finite for large n.
  const double sc = std::sqrt(f.variance_scale());
  const double h = hermite_function(s.n, X / sc);
  return h * h / sc;
}

inline double coherent_tomogram(cplx alpha, double X, const FrameParams& f) {
  const double s2 = f.variance_scale();
  const cplx a = alpha;
  const cplx ac = std::conj(alpha);
  const cplx np(f.nu, f.mu), nm(f.nu, -f.mu);  // nu + i mu, nu - i mu
  const cplx e = -std::norm(alpha) + (np * np * a * a + nm * nm * ac * ac) / (2.0 * s2) - X * X / s2 +
                 std::numbers::sqrt2 * cplx(0.0, X) * (nm * ac - np * a) / s2;
  return std::exp(e.real()) / std::sqrt(std::numbers::pi * s2);
}

inline cplx cat_term(const CrystallizedCat& c, int j, int k, double X, const FrameParams& f) {
  const double s2 = f.variance_scale();
  const cplx aj = c.component(j);
  const cplx akc = std::conj(c.component(k));
  const cplx np(f.nu, f.mu), nm(f.nu, -f.mu);
  // Every factor goes into one exponent: the pieces overflow separately for large |alpha|.
  const cplx e = -std::norm(c.alpha) - X * X / s2 +
                 std::numbers::sqrt2 * cplx(0.0, X) * (nm * akc - np * aj) / s2 +
                 (np * np * aj * aj + nm * nm * akc * akc) / (2.0 * s2);
  return std::exp(e) / std::sqrt(std::numbers::pi * s2);
}

inline double cat_tomogram(const CrystallizedCat& c, double X, const FrameParams& f) {
  cplx sum = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) sum += cat_term(c, j, k, X, f);
  return c.norm * c.norm * sum.real();
}

struct PhoArgs {
  cplx two_p;  // 1 - i mu x_w^2 / nu
  cplx z;      // q / sqrt(2p), q = i X x_w / nu
};

inline PhoArgs pho_args(const PseudoHarmonic& s, double X, const FrameParams& f) {
  const double xw = s.x_omega;
  const cplx two_p(1.0, -f.mu * xw * xw / f.nu);
  const cplx q(0.0, X * xw / f.nu);
  return {two_p, q / std::sqrt(two_p)};
}

// a = 0: expansion of H_{2n+1}, prefactor written with n! Gamma(n + 3/2).
inline double pho_tomogram_half_oscillator(const PseudoHarmonic& s, double X, const FrameParams& f) {
  const int n = s.n;
  const auto [two_p, z] = pho_args(s, X, f);
  cplx sum = 0.0;
  cplx ratio_pow = 1.0;
  const cplx ratio = two_p / 4.0;
  for (int m = 0; m <= n; ++m) {
    const double coef = ((m % 2 == 0) ? 1.0 : -1.0) * std::exp(-lgamma_real(m + 1.0));
    sum += coef * ratio_pow * pcf_D_scaled(-(2.0 * n - 2.0 * m + 2.0), z);
    ratio_pow *= ratio;
  }
  const double xw = s.x_omega;
  const double log_pref = -std::log(std::numbers::pi) + 2.0 * lgamma_real(2.0 * n + 2.0) - lgamma_real(n + 1.0) -
                          lgamma_real(n + 1.5) + (2.0 * n + 1.0) * std::log(std::abs(f.nu)) + std::log(xw) -
                          (n + 1.0) * std::log(f.nu * f.nu + f.mu * f.mu * xw * xw * xw * xw);
  return std::exp(log_pref) * std::norm(sum);
}

// General a: term-wise integration of the Laguerre polynomial.
inline double pho_tomogram_laguerre(const PseudoHarmonic& s, double X, const FrameParams& f, const PhoOptions& opt) {
  opt.series.check();
  const int n = s.n;
  const double b = s.b();
  const auto [two_p, z] = pho_args(s, X, f);
  const cplx log_two_p = std::log(two_p);
  const double alpha0 = b + 1.5;
  const double lg0 = lgamma_real(alpha0);

  auto term = [&](int k, double coef) {
    const double ak = 2.0 * k + alpha0;
    return coef * std::exp(lgamma_real(ak) - lg0 - 0.5 * ak * log_two_p) * pcf_D_scaled(-ak, z);
  };

  cplx sum = 0.0;
  if (!opt.literal_rising_pochhammer) {
    double coef = 1.0;  // (-n)_k / ((b+1)_k k!)
    for (int k = 0; k <= n; ++k) {
      sum += term(k, coef);
      coef *= (k - n) / ((b + 1.0 + k) * (k + 1.0));
    }
  } else {
    double coef = 1.0;  // (n)_k / ((b+1)_k k!)
    int quiet = 0, growing = 0;
    double last = 0.0;
    bool done = false;
    for (int k = 0; k < opt.series.max_terms; ++k) {
      if (coef == 0.0) {
        done = true;
        break;
      }
      const cplx t = term(k, coef);
      sum += t;
      const double mag = std::abs(t);
      quiet = mag <= std::max(opt.series.rel_tol * std::abs(sum), opt.series.abs_floor) ? quiet + 1 : 0;
      growing = (k > 0 && mag > last) ? growing + 1 : 0;
      last = mag;
      if (quiet >= 3) {
        done = true;
        break;
      }
      if (growing >= 8) throw ConvergenceError("PHO tomogram: the (n)_k series diverges at this point");
      coef *= (n + k) / ((b + 1.0 + k) * (k + 1.0));
    }
    if (!done) throw ConvergenceError("PHO tomogram: (n)_k series did not converge within max_terms");
  }

  const double xw = s.x_omega;
  const double lg_nb1 = lgamma_real(n + b + 1.0);
  const double log_pref = std::log(xw / (2.0 * std::numbers::pi * std::abs(f.nu))) + std::log(2.0) +
                          lgamma_real(n + 1.0) - lg_nb1 + 2.0 * (lg_nb1 - lgamma_real(b + 1.0) - lgamma_real(n + 1.0)) +
                          2.0 * lg0;
  return std::exp(log_pref) * std::norm(sum);
}

}  // namespace detail

// Symplectic tomogram by direct quadrature of the pure-state integral.
inline double tomogram_numeric(const StateModel& model, double X, const FrameParams& frame,
                               const QuadratureConfig& cfg = {}) {
  detail::require_frame(frame);
  cfg.check();
  if (std::abs(frame.nu) < cfg.nu_epsilon) {
    if (frame.mu == 0.0) throw DegenerateFrameError("nu below nu_epsilon with mu = 0");
    return detail::tomogram_position_limit(model, X, frame.mu);
  }
  Interval box = position_support(model);
  if (cfg.x_max) box = is_pho(model) ? Interval{0.0, *cfg.x_max} : Interval{-*cfg.x_max, *cfg.x_max};

  const double L = box.width();
  const double reach = std::max(std::abs(box.lo), std::abs(box.hi));
  const double phase_rate = (std::abs(frame.mu) * reach + std::abs(X)) / std::abs(frame.nu);
  const int panels = std::max(cfg.nodes / GaussRule::order, static_cast<int>(std::ceil(phase_rate * L / 6.0)));

  const double a = frame.mu / (2.0 * frame.nu);
  const double c = X / frame.nu;
  const cplx I = composite_gauss(
      [&](double y) { return wavefunction(model, y) * std::polar(1.0, a * y * y - c * y); }, box.lo, box.hi, panels);
  const double W = std::norm(I) / (2.0 * std::numbers::pi * std::abs(frame.nu));
  if (!std::isfinite(W)) throw QuadratureError("tomogram quadrature produced a non-finite value");
  return W;
}

// Closed forms. The pseudoharmonic ones need nu != 0.
inline double tomogram_analytic(const StateModel& model, double X, const FrameParams& frame,
                                const PhoOptions& pho = {}) {
  detail::require_frame(frame);
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HarmonicOscillator>) {
          return detail::ho_tomogram(s, X, frame);
        } else if constexpr (std::is_same_v<T, Coherent>) {
          return detail::coherent_tomogram(s.alpha, X, frame);
        } else if constexpr (std::is_same_v<T, CrystallizedCat>) {
          return detail::cat_tomogram(s, X, frame);
        } else {
          if (frame.nu == 0.0)
            throw UnsupportedError("PHO closed form needs nu != 0; use tomogram_numeric for this frame");
          if (s.a == 0.0 && !pho.literal_rising_pochhammer) return detail::pho_tomogram_half_oscillator(s, X, frame);
          return detail::pho_tomogram_laguerre(s, X, frame, pho);
        }
      },
      model.variant());
}

// Closed form where one applies, the nu -> 0 limit for PHO frames with |nu|
// below cfg.nu_epsilon.
inline double tomogram(const StateModel& model, double X, const FrameParams& frame, const QuadratureConfig& cfg = {}) {
  detail::require_frame(frame);
  if (is_pho(model) && std::abs(frame.nu) < cfg.nu_epsilon) {
    if (frame.mu == 0.0) throw DegenerateFrameError("nu below nu_epsilon with mu = 0");
    return detail::tomogram_position_limit(model, X, frame.mu);
  }
  return tomogram_analytic(model, X, frame);
}

inline double optical_tomogram(const StateModel& model, double X, double phi, const QuadratureConfig& cfg = {}) {
  return tomogram(model, X, optical_frame(phi), cfg);
}

// The (j, k) summand of the cat tomogram without the |N|^2 factor; j = k = 0
// is the tomogram of the first coherent component.
inline cplx cat_tomogram_term(const StateModel& model, int j, int k, double X, const FrameParams& frame) {
  const auto* c = model.get_if<CrystallizedCat>();
  if (!c) throw DomainError("cat_tomogram_term needs a crystallized cat state");
  if (j < 0 || j > 2 || k < 0 || k > 2) throw DomainError("cat term indices must lie in {0,1,2}");
  detail::require_frame(frame);
  return detail::cat_term(*c, j, k, X, frame);
}

// X range holding essentially all of the mass: X = mu q + nu p with q, p in
// the state's position and momentum boxes.
inline Interval tomogram_support(const StateModel& model, const FrameParams& frame, const QuadratureConfig& cfg = {}) {
  detail::require_frame(frame);
  const Interval q = position_support(model);
  auto scale = [](const Interval& i, double c) {
    return c >= 0 ? Interval{c * i.lo, c * i.hi} : Interval{c * i.hi, c * i.lo};
  };
  const Interval a = scale(q, frame.mu);
  if (std::abs(frame.nu) < cfg.nu_epsilon && is_pho(model)) return a;
  const Interval b = scale(momentum_support(model), frame.nu);
  return {a.lo + b.lo, a.hi + b.hi};
}

// Total probability of the tomogram at one frame: adaptive bulk plus mapped tails.
inline double tomogram_mass(const StateModel& model, const FrameParams& frame, const QuadratureConfig& cfg = {}) {
  const Interval sup = tomogram_support(model, frame, cfg);
  auto W = [&](double X) { return tomogram(model, X, frame, cfg); };
  if (is_pho(model)) return integrate_line_with_tails(W, sup.lo, sup.hi);
  return integrate_adaptive(W, sup.lo, sup.hi, 1e-10);
}

struct TomogramSample {
  double X, mu, nu, W;
};

inline std::vector<TomogramSample> tomogram_grid(const StateModel& model, const std::vector<double>& xs,
                                                 const FrameParams& frame, const QuadratureConfig& cfg = {}) {
  std::vector<TomogramSample> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = {xs[i], frame.mu, frame.nu, tomogram(model, xs[i], frame, cfg)}; });
  return out;
}

inline std::string tomogram_csv(const std::vector<TomogramSample>& rows, const Provenance& prov) {
  std::string s = prov.csv_comment() + "X,mu,nu,W\n";
  for (const auto& r : rows)
    s += format_double(r.X) + "," + format_double(r.mu) + "," + format_double(r.nu) + "," + format_double(r.W) + "\n";
  return s;
}

inline json tomogram_json(const std::vector<TomogramSample>& rows, const Provenance& prov) {
  json rec = json::array();
  for (const auto& r : rows) rec.push_back({{"X", r.X}, {"mu", r.mu}, {"nu", r.nu}, {"W", r.W}});
  return {{"provenance", prov.to_json()}, {"records", rec}};
}

}  // namespace tomokit
