#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>

#include "tomokit/errors.hpp"
#include "tomokit/grid.hpp"
#include "tomokit/quadrature.hpp"
#include "tomokit/special_functions.hpp"

namespace tomokit {

struct HarmonicOscillator {
  int n = 0;
};

// Pseudoharmonic oscillator on x > 0. a = 0 is the half oscillator.
struct PseudoHarmonic {
  double a = 0.0;
  int n = 0;
  double x_omega = 1.0;
  double b() const { return 0.5 * std::sqrt(1.0 + 4.0 * a); }
};

struct Coherent {
  cplx alpha;
};

// N (|alpha> + |alpha w> + |alpha w^2>), w = e^{2 pi i/3}. N is found by
// quadrature when the model is built.
struct CrystallizedCat {
  cplx alpha;
  double norm = 1.0;
  cplx component(int j) const { return alpha * std::polar(1.0, 2.0 * std::numbers::pi * j / 3.0); }
};

class StateModel;
double normalization_constant(const StateModel& model);

class StateModel {
 public:
  using Variant = std::variant<HarmonicOscillator, PseudoHarmonic, Coherent, CrystallizedCat>;

  static StateModel ho(int n) {
    if (n < 0) throw DomainError("HO: n must be nonnegative");
    return StateModel(HarmonicOscillator{n});
  }

  static StateModel pho(double a, int n, double x_omega = 1.0) {
    if (n < 0) throw DomainError("PHO: n must be nonnegative");
    if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("PHO: a must be finite and >= 0");
    if (!(x_omega > 0.0) || !std::isfinite(x_omega)) throw DomainError("PHO: x_omega must be positive");
    return StateModel(PseudoHarmonic{a, n, x_omega});
  }

  static StateModel coherent(cplx alpha) {
    check_alpha(alpha);
    return StateModel(Coherent{alpha});
  }

  static StateModel crystallized_cat(cplx alpha) {
    check_alpha(alpha);
    StateModel m(CrystallizedCat{alpha, 1.0});
    std::get<CrystallizedCat>(m.v_).norm = normalization_constant(m);
    return m;
  }

  const Variant& variant() const { return v_; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

  std::string descriptor() const;
  static StateModel parse(std::string_view text);

 private:
  explicit StateModel(Variant v) : v_(v) {}
  static void check_alpha(cplx alpha) {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) throw DomainError("alpha must be finite");
  }
  Variant v_;
};

namespace detail {

inline cplx coherent_wavefunction(cplx alpha, double x) {
  const double a2 = std::norm(alpha);
  return std::pow(std::numbers::pi, -0.25) *
         std::exp(-0.5 * x * x - 0.5 * a2 + std::numbers::sqrt2 * alpha * x - 0.5 * alpha * alpha);
}

// Normalized Hermite function via the stable three-term recurrence.
inline double hermite_function(int n, double x) {
  double p0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (n == 0) return p0;
  double p1 = std::numbers::sqrt2 * x * p0;
  for (int k = 1; k < n; ++k) {
    const double p2 = std::sqrt(2.0 / (k + 1)) * x * p1 - std::sqrt(static_cast<double>(k) / (k + 1)) * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

inline double pho_wavefunction(const PseudoHarmonic& s, double x) {
  if (x <= 0.0) return 0.0;
  const double t = x / s.x_omega;
  if (s.a == 0.0) {
    // (-1)^n 2^{-(2n+1/2)} [n! Gamma(n+3/2)]^{-1/2} e^{-t^2/2} H_{2n+1}(t) / sqrt(x_omega)
    const int n = s.n;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double log_pref = -(2.0 * n + 0.5) * std::log(2.0) - 0.5 * (lgamma_real(n + 1.0) + lgamma_real(n + 1.5));
    return sign * std::exp(log_pref - 0.5 * t * t) * hermite(2 * n + 1, t) / std::sqrt(s.x_omega);
  }
  const double b = s.b();
  const double log_pref = 0.5 * (std::log(2.0) + lgamma_real(s.n + 1.0) - lgamma_real(s.n + b + 1.0));
  return std::exp(log_pref + (b + 0.5) * std::log(t) - 0.5 * t * t) * assoc_laguerre(s.n, b, t * t) /
         std::sqrt(s.x_omega);
}

inline cplx cat_unnormalized(const CrystallizedCat& c, double x) {
  return coherent_wavefunction(c.component(0), x) + coherent_wavefunction(c.component(1), x) +
         coherent_wavefunction(c.component(2), x);
}

// 10^4-node composite Gauss rule over |x| <= 12 scale lengths.
inline double cat_norm_by_quadrature(const CrystallizedCat& c) {
  const double half = 12.0 * std::max(1.0, std::abs(c.alpha));
  const double mass = composite_gauss([&](double x) { return std::norm(cat_unnormalized(c, x)); }, -half, half, 500);
  const double edge = std::norm(cat_unnormalized(c, half)) + std::norm(cat_unnormalized(c, -half));
  if (!std::isfinite(mass) || !(mass > 0.0) || edge > 1e-20 * mass)
    throw QuadratureError("cat normalization: integral did not converge on the configured domain");
  return 1.0 / std::sqrt(mass);
}

inline std::map<std::string, std::string> parse_key_values(std::string_view body, std::string_view what) {
  std::map<std::string, std::string> kv;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const auto item = body.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw ParseError(std::string(what) + ": expected key=value, got '" + std::string(item) + "'");
    if (!kv.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1))).second)
      throw ParseError(std::string(what) + ": duplicate key '" + std::string(item.substr(0, eq)) + "'");
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return kv;
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline cplx wavefunction(const StateModel& model, double x) {
  return std::visit(
      [x](const auto& s) -> cplx {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HarmonicOscillator>) {
          return detail::hermite_function(s.n, x);
        } else if constexpr (std::is_same_v<T, PseudoHarmonic>) {
          return detail::pho_wavefunction(s, x);
        } else if constexpr (std::is_same_v<T, Coherent>) {
          return detail::coherent_wavefunction(s.alpha, x);
        } else {
          return s.norm * detail::cat_unnormalized(s, x);
        }
      },
      model.variant());
}

// 1 for the closed-form states; the cat constant is recomputed by quadrature.
inline double normalization_constant(const StateModel& model) {
  if (const auto* c = model.get_if<CrystallizedCat>()) return detail::cat_norm_by_quadrature(*c);
  return 1.0;
}

// Position and momentum boxes outside which the wavefunction (or its Fourier
// transform) is negligible. PHO momentum tails are algebraic for small b, so
// the box there is wide rather than tight.
inline Interval position_support(const StateModel& model) {
  return std::visit(
      [](const auto& s) -> Interval {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HarmonicOscillator>) {
          const double h = std::sqrt(2.0 * s.n + 1.0) + 9.0;
          return {-h, h};
        } else if constexpr (std::is_same_v<T, PseudoHarmonic>) {
          return {0.0, s.x_omega * (std::sqrt(4.0 * s.n + 2.0 * s.b() + 2.0) + 9.0)};
        } else if constexpr (std::is_same_v<T, Coherent>) {
          const double c = std::numbers::sqrt2 * s.alpha.real();
          return {c - 9.0, c + 9.0};
        } else {
          double lo = 0.0, hi = 0.0;
          for (int j = 0; j < 3; ++j) {
            const double c = std::numbers::sqrt2 * s.component(j).real();
            lo = std::min(lo, c);
            hi = std::max(hi, c);
          }
          return {lo - 9.0, hi + 9.0};
        }
      },
      model.variant());
}

inline Interval momentum_support(const StateModel& model) {
  return std::visit(
      [](const auto& s) -> Interval {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HarmonicOscillator>) {
          const double h = std::sqrt(2.0 * s.n + 1.0) + 9.0;
          return {-h, h};
        } else if constexpr (std::is_same_v<T, PseudoHarmonic>) {
          const double tail = s.b() < 2.0 ? 6.0 : 2.0;
          const double h = tail * (std::sqrt(4.0 * s.n + 2.0 * s.b() + 2.0) + 9.0) / s.x_omega;
          return {-h, h};
        } else if constexpr (std::is_same_v<T, Coherent>) {
          const double c = std::numbers::sqrt2 * s.alpha.imag();
          return {c - 9.0, c + 9.0};
        } else {
          double lo = 0.0, hi = 0.0;
          for (int j = 0; j < 3; ++j) {
            const double c = std::numbers::sqrt2 * s.component(j).imag();
            lo = std::min(lo, c);
            hi = std::max(hi, c);
          }
          return {lo - 9.0, hi + 9.0};
        }
      },
      model.variant());
}

inline bool is_pho(const StateModel& m) { return m.get_if<PseudoHarmonic>() != nullptr; }

inline std::string StateModel::descriptor() const {
  using detail::format_number;
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HarmonicOscillator>) {
          return "ho:n=" + std::to_string(s.n);
        } else if constexpr (std::is_same_v<T, PseudoHarmonic>) {
          return "pho:a=" + format_number(s.a) + ",n=" + std::to_string(s.n) + ",xw=" + format_number(s.x_omega);
        } else if constexpr (std::is_same_v<T, Coherent>) {
          return "coh:re=" + format_number(s.alpha.real()) + ",im=" + format_number(s.alpha.imag());
        } else {
          return "ccat:re=" + format_number(s.alpha.real()) + ",im=" + format_number(s.alpha.imag());
        }
      },
      v_);
}

// ho:n=<int> | pho:a=<num>,n=<int>[,xw=<num>] | coh:re=<num>[,im=<num>] | ccat:re=<num>[,im=<num>]
inline StateModel StateModel::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError("state descriptor needs '<kind>:<params>', got '" + std::string(text) + "'");
  const std::string kind(text.substr(0, colon));
  auto kv = detail::parse_key_values(text.substr(colon + 1), "state descriptor");

  auto take = [&](const std::string& key, bool required, const std::string& fallback) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (required) throw ParseError("state '" + kind + "': missing '" + key + "'");
      return fallback;
    }
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto finish = [&](StateModel m) {
    if (!kv.empty()) throw ParseError("state '" + kind + "': unknown key '" + kv.begin()->first + "'");
    return m;
  };

  if (kind == "ho") {
    const long n = detail::parse_integer(take("n", true, ""), "ho n");
    return finish(ho(static_cast<int>(n)));
  }
  if (kind == "pho") {
    const double a = detail::parse_double(take("a", true, ""), "pho a");
    const long n = detail::parse_integer(take("n", true, ""), "pho n");
    const double xw = detail::parse_double(take("xw", false, "1"), "pho xw");
    return finish(pho(a, static_cast<int>(n), xw));
  }
  if (kind == "coh" || kind == "ccat") {
    const double re = detail::parse_double(take("re", true, ""), "alpha re");
    const double im = detail::parse_double(take("im", false, "0"), "alpha im");
    return finish(kind == "coh" ? coherent({re, im}) : crystallized_cat({re, im}));
  }
  throw ParseError("unknown state kind '" + kind + "'");
}

}  // namespace tomokit
