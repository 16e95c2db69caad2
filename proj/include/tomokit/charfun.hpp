#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "tomokit/errors.hpp"
#include "tomokit/grid.hpp"
#include "tomokit/io.hpp"
#include "tomokit/pdf.hpp"
#include "tomokit/quadrature.hpp"
#include "tomokit/sample_set.hpp"
#include "tomokit/special_functions.hpp"
#include "tomokit/state_catalog.hpp"
#include "tomokit/tomogram.hpp"

namespace tomokit {

// ---------------------------------------------------------------------------
// Closed forms at t = +-1. Other t follow from phi(t; mu, nu) = phi(1; t mu, t nu).

inline cplx charfn_analytic(const StateModel& model, double t, const FrameParams& frame_in) {
  if (!std::isfinite(t)) throw DomainError("charfn_analytic: t must be finite");
  if (t == 0.0) return 1.0;
  const double at = std::abs(t);
  const FrameParams frame{at * frame_in.mu, at * frame_in.nu};
  const double s2 = frame.variance_scale();
  const cplx np(frame.nu, frame.mu), nm(frame.nu, -frame.mu);  // nu + i mu, nu - i mu
  const cplx v = std::visit(
      [&](const auto& s) -> cplx {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HarmonicOscillator>) {
          return std::exp(-0.25 * s2) * assoc_laguerre(s.n, 0.0, 0.5 * s2);
        } else if constexpr (std::is_same_v<T, Coherent>) {
          return std::exp(-0.25 * s2 - (nm * std::conj(s.alpha) - np * s.alpha) / std::numbers::sqrt2);
        } else if constexpr (std::is_same_v<T, CrystallizedCat>) {
          // sum_{j,k} <alpha_k|alpha_j> e^{-((nu - i mu) alpha_k^* - (nu + i mu) alpha_j)/sqrt 2}
          cplx sum = 0.0;
          for (int j = 0; j < 3; ++j) {
            const cplx aj = s.component(j);
            for (int k = 0; k < 3; ++k) {
              const cplx akc = std::conj(s.component(k));
              sum += std::exp(-std::norm(s.alpha) + akc * aj - (nm * akc - np * aj) / std::numbers::sqrt2);
            }
          }
          return s.norm * s.norm * std::exp(-0.25 * s2) * sum;
        } else {
          throw UnsupportedError("charfn_analytic: no closed form for the pseudoharmonic oscillator; use charfn_numeric");
        }
      },
      model.variant());
  return t > 0 ? v : std::conj(v);
}

// ---------------------------------------------------------------------------
// Quadrature over a pdf.

inline cplx charfn_numeric(const PdfHandle& pdf, double t, const QuadratureConfig& cfg = {}) {
  cfg.check();
  if (pdf.is_point_mass()) return pdf.point_mass;
  if (!pdf.has_density) throw UnsupportedError("charfn_numeric: the pdf has no density; use the empirical provider");
  if (t == 0.0) return pdf_mass(pdf);
  auto f = [&](double X) { return pdf.density(X) * std::polar(1.0, t * X); };
  try {
    if (pdf.tails) return integrate_line_with_tails(f, pdf.lo, pdf.hi, 1e-11, 1e-10);
    return integrate_adaptive(f, pdf.lo, pdf.hi, 1e-11, 12, 1e-12);
  } catch (const std::domain_error& e) {
    throw QuadratureError(std::string("charfn_numeric: ") + e.what());
  }
}

inline cplx charfn_numeric(const PdfFamily& family, double t, const FrameParams& frame, const QuadratureConfig& cfg = {}) {
  return charfn_numeric(family(frame), t, cfg);
}

// ---------------------------------------------------------------------------
// Exponential family h(X) exp(eta . tau(X) - A(eta)).

struct ExpFamilySpec {
  std::string name;
  std::function<double(double)> h;
  std::vector<std::function<double(double)>> tau;
  std::function<std::vector<double>(double mu, double nu)> eta_map;
  Interval support;  // ends may be infinite
  // Optional closed-form test for a finite normalizer; otherwise the integral decides.
  std::function<bool(const std::vector<double>&)> normalizable;
  // Optional (center, width) of the pdf at eta; quadrature runs in the
  // variable (X - center) / width, so very narrow or very wide members stay resolved.
  std::function<std::pair<double, double>(const std::vector<double>&)> location_scale;

  double log_normalizer(const std::vector<double>& eta) const;

 private:
  mutable std::shared_mutex cache_mutex_;
  mutable std::map<std::vector<double>, double> cache_;
};

namespace detail {

inline bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Integral of g over the spec's support. A unit segment at a finite end goes
// to tanh-sinh (endpoint singularities such as X^{-1/2}); the rest goes to
// adaptive Gauss-Kronrod with Boost's infinite-range mapping.
template <class G>
cplx integrate_on_support(const G& g0, const Interval& sup0, double rel_tol, double l1_tol = 1e-14,
                          std::pair<double, double> loc_scale = {0.0, 1.0}) {
  using boost::math::quadrature::tanh_sinh;
  const auto [c, w] = loc_scale;
  auto g = [&](double u) { return g0(c + w * u) * w; };
  const Interval sup{(sup0.lo - c) / w, (sup0.hi - c) / w};
  auto finite_piece = [&](double a, double b) {
    static thread_local tanh_sinh<double> ts;
    const double re = ts.integrate([&](double x) { return g(x).real(); }, a, b, rel_tol);
    const double im = ts.integrate([&](double x) { return g(x).imag(); }, a, b, rel_tol);
    return cplx(re, im);
  };
  const bool lo_fin = std::isfinite(sup.lo), hi_fin = std::isfinite(sup.hi);
  if (lo_fin && hi_fin) return finite_piece(sup.lo, sup.hi);
  if (lo_fin) return finite_piece(sup.lo, sup.lo + 1.0) + integrate_adaptive(g, sup.lo + 1.0, sup.hi, rel_tol, 12, l1_tol);
  if (hi_fin) return integrate_adaptive(g, sup.lo, sup.hi - 1.0, rel_tol, 12, l1_tol) + finite_piece(sup.hi - 1.0, sup.hi);
  return integrate_adaptive(g, sup.lo, sup.hi, rel_tol, 12, l1_tol);
}

inline double eta_dot_tau(const ExpFamilySpec& s, const std::vector<double>& eta, double X) {
  double acc = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) acc += eta[i] * s.tau[i](X);
  return acc;
}

inline std::pair<double, double> spec_location_scale(const ExpFamilySpec& s, const std::vector<double>& eta) {
  if (!s.location_scale) return {0.0, 1.0};
  const auto [c, w] = s.location_scale(eta);
  if (!std::isfinite(c) || !(w > 0.0) || !std::isfinite(w)) return {0.0, 1.0};
  return {std::isfinite(s.support.lo) ? 0.0 : c, w};
}

}  // namespace detail

inline double ExpFamilySpec::log_normalizer(const std::vector<double>& eta) const {
  if (eta.size() != tau.size()) throw DomainError("expfamily '" + name + "': eta and tau sizes differ");
  if (!detail::all_finite(eta)) throw DivergentNormalizerError("expfamily '" + name + "': eta is not finite at this frame");
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(eta); it != cache_.end()) return it->second;
  }
  if (normalizable && !normalizable(eta))
    throw DivergentNormalizerError("expfamily '" + name + "': normalizer integral diverges at this eta");
  double Z = 0.0;
  try {
    Z = detail::integrate_on_support(
            [&](double X) { return cplx(h(X) * std::exp(detail::eta_dot_tau(*this, eta, X)), 0.0); }, support, 1e-10,
            1e-14, detail::spec_location_scale(*this, eta))
            .real();
  } catch (const std::exception& e) {
    throw DivergentNormalizerError("expfamily '" + name + "': normalizer integral failed (" + e.what() + ")");
  }
  if (!(Z > 0.0) || !std::isfinite(Z)) throw DivergentNormalizerError("expfamily '" + name + "': normalizer is not finite and positive");
  const double A = std::log(Z);
  std::unique_lock lock(cache_mutex_);
  cache_.emplace(eta, A);
  return A;
}

inline cplx charfn_expfamily(const ExpFamilySpec& spec, double t, const FrameParams& frame, const QuadratureConfig& cfg = {}) {
  cfg.check();
  const std::vector<double> eta = spec.eta_map(frame.mu, frame.nu);
  const double A = spec.log_normalizer(eta);
  if (t == 0.0) return 1.0;
  try {
    return detail::integrate_on_support(
        [&](double X) { return spec.h(X) * std::exp(cplx(detail::eta_dot_tau(spec, eta, X) - A, t * X)); }, spec.support,
        1e-11, 1e-12, detail::spec_location_scale(spec, eta));
  } catch (const DivergentNormalizerError&) {
    throw;
  } catch (const std::exception& e) {
    throw QuadratureError(std::string("charfn_expfamily: ") + e.what());
  }
}

// Built-in specs. Each returns a shared pointer because providers share the A(eta) memo.
namespace expfamily {

inline std::shared_ptr<ExpFamilySpec> gamma(double k, double theta) {
  if (!(k > 0.0) || !(theta > 0.0)) throw DomainError("gamma spec: k and theta must be positive");
  auto s = std::make_shared<ExpFamilySpec>();
  s->name = "gamma:k=" + detail::format_number(k) + ",theta=" + detail::format_number(theta);
  s->h = [k](double X) { return X > 0.0 ? std::pow(X, k - 1.0) : (k == 1.0 ? 1.0 : 0.0); };
  s->tau = {[](double X) { return X; }};
  s->eta_map = [theta](double, double) { return std::vector<double>{-1.0 / theta}; };
  s->support = {0.0, std::numeric_limits<double>::infinity()};
  s->normalizable = [](const std::vector<double>& e) { return e[0] < 0.0; };
  s->location_scale = [](const std::vector<double>& e) { return std::pair<double, double>{0.0, -1.0 / e[0]}; };
  return s;
}

inline std::shared_ptr<ExpFamilySpec> exponential(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("exponential spec: lambda must be positive");
  auto s = gamma(1.0, 1.0 / lambda);
  s->name = "exponential:lambda=" + detail::format_number(lambda);
  return s;
}

inline std::shared_ptr<ExpFamilySpec> chisq(double k) {
  if (!(k > 0.0)) throw DomainError("chisq spec: k must be positive");
  auto s = gamma(0.5 * k, 2.0);
  s->name = "chisq:k=" + detail::format_number(k);
  return s;
}

// h = X^{alpha-1}, tau = X, eta = -p(mu, nu).
inline std::shared_ptr<ExpFamilySpec> power(double alpha, std::function<double(double, double)> p, std::string p_text) {
  if (!(alpha > 0.0)) throw DomainError("power spec: alpha must be positive");
  auto s = gamma(alpha, 1.0);
  s->name = "power:alpha=" + detail::format_number(alpha) + ",p=" + p_text;
  s->eta_map = [p = std::move(p)](double mu, double nu) { return std::vector<double>{-p(mu, nu)}; };
  return s;
}

// Gaussian written as h = 1, tau = (X, X^2), eta = (p1, -p2).
inline std::shared_ptr<ExpFamilySpec> gauss_eta(std::function<double(double, double)> p1,
                                                std::function<double(double, double)> p2, std::string text) {
  auto s = std::make_shared<ExpFamilySpec>();
  s->name = "gauss-eta:" + text;
  s->h = [](double) { return 1.0; };
  s->tau = {[](double X) { return X; }, [](double X) { return X * X; }};
  s->eta_map = [p1 = std::move(p1), p2 = std::move(p2)](double mu, double nu) {
    return std::vector<double>{p1(mu, nu), -p2(mu, nu)};
  };
  s->support = {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  s->normalizable = [](const std::vector<double>& e) { return e[1] < 0.0; };
  s->location_scale = [](const std::vector<double>& e) {
    return std::pair<double, double>{-e[0] / (2.0 * e[1]), 1.0 / std::sqrt(-2.0 * e[1])};
  };
  return s;
}

// p2 = 1/(mu^2 + nu^2): the ground-state oscillator tomogram.
inline std::shared_ptr<ExpFamilySpec> gauss_ho() {
  return gauss_eta([](double, double) { return 0.0; }, [](double mu, double nu) { return 1.0 / (mu * mu + nu * nu); },
                   "p1=0,p2=ho");
}

}  // namespace expfamily

// p^alpha / (p - i)^alpha on the principal branch.
inline cplx power_exponential_charfn(double alpha, double p) {
  if (!(alpha > 0.0) || !(p > 0.0)) throw DomainError("power_exponential_charfn: alpha and p must be positive");
  return std::exp(alpha * (std::log(cplx(p, 0.0)) - std::log(cplx(p, -1.0))));
}

// ---------------------------------------------------------------------------
// Providers.

enum class ProviderKind { analytic, numeric, expfamily, mixture, empirical, empirical_family, custom };

inline const char* to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::analytic: return "analytic";
    case ProviderKind::numeric: return "numeric";
    case ProviderKind::expfamily: return "expfamily";
    case ProviderKind::mixture: return "mixture";
    case ProviderKind::empirical: return "empirical";
    case ProviderKind::empirical_family: return "empirical_family";
    case ProviderKind::custom: return "custom";
  }
  return "?";
}

struct FrameLattice {
  UniformGrid mu;
  UniformGrid nu;
};

class CharFnProvider {
 public:
  struct Impl {
    virtual ~Impl() = default;
    virtual cplx eval(double t, double mu, double nu) const = 0;
    virtual ProviderKind kind() const = 0;
    virtual std::string name() const = 0;
    virtual bool empirical() const { return false; }
    virtual std::size_t sample_size() const { return 0; }
    virtual std::optional<FrameLattice> lattice() const { return std::nullopt; }
    virtual bool divergent_at(double, double) const { return false; }
  };

  explicit CharFnProvider(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  cplx operator()(double t, double mu, double nu) const { return impl_->eval(t, mu, nu); }
  cplx operator()(double t, const FrameParams& f) const { return impl_->eval(t, f.mu, f.nu); }

  ProviderKind kind() const { return impl_->kind(); }
  std::string name() const { return impl_->name(); }
  bool is_empirical() const { return impl_->empirical(); }
  // Smallest per-frame sample count among empirical members; 0 otherwise.
  std::size_t sample_size() const { return impl_->sample_size(); }
  // Frames the provider can be evaluated on, when it is restricted to a lattice.
  std::optional<FrameLattice> preferred_lattice() const { return impl_->lattice(); }
  // True where the provider has no regular value and returns a limit instead.
  bool divergent_at(double mu, double nu) const { return impl_->divergent_at(mu, nu); }

  static CharFnProvider analytic(const StateModel& model);
  static CharFnProvider numeric(PdfFamily family, std::string name, const QuadratureConfig& cfg = {});
  static CharFnProvider numeric(const StateModel& model, const QuadratureConfig& cfg = {});
  static CharFnProvider expfamily(std::shared_ptr<const ExpFamilySpec> spec, const QuadratureConfig& cfg = {});
  static CharFnProvider mixture(std::vector<std::pair<double, CharFnProvider>> parts);
  static CharFnProvider empirical(SampleSet samples);
  static CharFnProvider empirical_family(std::vector<SampleSet> sets, FrameLattice lattice);
  static CharFnProvider custom(std::function<cplx(double, double, double)> fn, std::string name);

 private:
  std::shared_ptr<const Impl> impl_;
};

namespace detail {

struct AnalyticImpl final : CharFnProvider::Impl {
  StateModel model;
  explicit AnalyticImpl(StateModel m) : model(std::move(m)) {
    if (is_pho(model)) throw UnsupportedError("analytic provider: no closed-form characteristic function for the PHO");
  }
  cplx eval(double t, double mu, double nu) const override {
    if (t == 0.0) return 1.0;
    return charfn_analytic(model, t, {mu, nu});
  }
  ProviderKind kind() const override { return ProviderKind::analytic; }
  std::string name() const override { return model.descriptor(); }
};

struct NumericImpl final : CharFnProvider::Impl {
  PdfFamily family;
  std::string label;
  QuadratureConfig cfg;
  cplx eval(double t, double mu, double nu) const override {
    if (t == 0.0) return 1.0;
    return charfn_numeric(family({mu, nu}), t, cfg);
  }
  ProviderKind kind() const override { return ProviderKind::numeric; }
  std::string name() const override { return label; }
};

struct ExpFamilyImpl final : CharFnProvider::Impl {
  std::shared_ptr<const ExpFamilySpec> spec;
  QuadratureConfig cfg;
  static constexpr double kLimitRadius = 1e-6;

  // phi(1; .) memo. The frame enters only through eta, so regular frames are
  // keyed by eta (a constant map costs one quadrature); degenerate frames by
  // (mu, nu). The pdf is real, so phi(-1) is the conjugate.
  mutable std::shared_mutex memo_mutex;
  mutable std::map<std::vector<double>, cplx> memo;

  bool divergent_at(double mu, double nu) const override {
    const auto eta = spec->eta_map(mu, nu);
    return !all_finite(eta) || (spec->normalizable && !spec->normalizable(eta));
  }

  cplx eval(double t, double mu, double nu) const override {
    if (t == 0.0) return 1.0;
    if (std::abs(t) != 1.0) return value(t, mu, nu);
    std::vector<double> key = spec->eta_map(mu, nu);
    if (!all_finite(key) || (spec->normalizable && !spec->normalizable(key)))
      key = {std::numeric_limits<double>::infinity(), mu, nu};
    {
      std::shared_lock lock(memo_mutex);
      if (auto it = memo.find(key); it != memo.end()) return t > 0 ? it->second : std::conj(it->second);
    }
    const cplx v = value(1.0, mu, nu);
    {
      std::unique_lock lock(memo_mutex);
      memo.emplace(std::move(key), v);
    }
    return t > 0 ? v : std::conj(v);
  }

  cplx value(double t, double mu, double nu) const {
    if (!divergent_at(mu, nu)) return charfn_expfamily(*spec, t, {mu, nu}, cfg);
    // No regular member here (eta blows up or the normalizer diverges); use the
    // radial limit and insist that it does not depend on the direction of approach.
    std::array<cplx, 4> v;
    try {
      for (int d = 0; d < 4; ++d) {
        const double th = 0.5 * std::numbers::pi * d + 0.25 * std::numbers::pi;
        v[static_cast<std::size_t>(d)] =
            charfn_expfamily(*spec, t, {mu + kLimitRadius * std::cos(th), nu + kLimitRadius * std::sin(th)}, cfg);
      }
    } catch (const Error& e) {
      throw DivergentNormalizerError("expfamily '" + spec->name + "': no finite limit at degenerate frame (" +
                                     format_double(mu) + ", " + format_double(nu) + "): " + e.what());
    }
    cplx mean = 0.0;
    for (auto x : v) mean += 0.25 * x;
    for (auto x : v)
      if (std::abs(x - mean) > 1e-4)
        throw DivergentNormalizerError("expfamily '" + spec->name + "': directional limits disagree at degenerate frame (" +
                                       format_double(mu) + ", " + format_double(nu) + ")");
    return mean;
  }
  ProviderKind kind() const override { return ProviderKind::expfamily; }
  std::string name() const override { return spec->name; }
};

struct MixtureImpl final : CharFnProvider::Impl {
  std::vector<std::pair<double, CharFnProvider>> parts;
  cplx eval(double t, double mu, double nu) const override {
    cplx acc = 0.0;
    for (const auto& [w, p] : parts) acc += w * p(t, mu, nu);
    return acc;
  }
  ProviderKind kind() const override { return ProviderKind::mixture; }
  std::string name() const override {
    std::string s = "mix:";
    for (std::size_t i = 0; i < parts.size(); ++i)
      s += (i ? "|" : "") + detail::format_number(parts[i].first) + "@" + parts[i].second.name();
    return s;
  }
  bool empirical() const override {
    return std::any_of(parts.begin(), parts.end(), [](const auto& p) { return p.second.is_empirical(); });
  }
  std::size_t sample_size() const override {
    std::size_t n = 0;
    for (const auto& p : parts)
      if (p.second.is_empirical()) n = n == 0 ? p.second.sample_size() : std::min(n, p.second.sample_size());
    return n;
  }
  std::optional<FrameLattice> lattice() const override {
    for (const auto& p : parts)
      if (auto l = p.second.preferred_lattice()) return l;
    return std::nullopt;
  }
  bool divergent_at(double mu, double nu) const override {
    return std::any_of(parts.begin(), parts.end(), [&](const auto& p) { return p.second.divergent_at(mu, nu); });
  }
};

inline bool same_frame(const FrameParams& a, double mu, double nu) {
  return std::abs(a.mu - mu) <= 1e-9 * std::max(1.0, std::abs(mu)) && std::abs(a.nu - nu) <= 1e-9 * std::max(1.0, std::abs(nu));
}

inline cplx sample_mean_phase(const std::vector<double>& xs, double t) {
  double c = 0.0, s = 0.0;
  for (double x : xs) {
    c += std::cos(t * x);
    s += std::sin(t * x);
  }
  const double n = static_cast<double>(xs.size());
  return {c / n, s / n};
}

struct EmpiricalImpl final : CharFnProvider::Impl {
  SampleSet samples;
  cplx at_one;
  explicit EmpiricalImpl(SampleSet s) : samples(std::move(s)) {
    samples.check();
    at_one = sample_mean_phase(samples.values, 1.0);
  }
  cplx eval(double t, double mu, double nu) const override {
    if (!same_frame(samples.frame, mu, nu))
      throw FrameMismatchError("empirical provider: samples were drawn at (mu, nu) = (" + format_double(samples.frame.mu) +
                               ", " + format_double(samples.frame.nu) + ")");
    if (t == 0.0) return 1.0;
    if (t == 1.0) return at_one;
    if (t == -1.0) return std::conj(at_one);
    return sample_mean_phase(samples.values, t);
  }
  ProviderKind kind() const override { return ProviderKind::empirical; }
  std::string name() const override { return "empirical(" + samples.model + ")"; }
  bool empirical() const override { return true; }
  std::size_t sample_size() const override { return samples.values.size(); }
};

struct EmpiricalFamilyImpl final : CharFnProvider::Impl {
  std::vector<SampleSet> sets;  // row-major over (mu index, nu index)
  FrameLattice grid;
  std::vector<cplx> at_one;
  std::size_t min_n = 0;

  EmpiricalFamilyImpl(std::vector<SampleSet> s, FrameLattice g) : sets(std::move(s)), grid(g) {
    grid.mu.check("empirical family mu grid");
    grid.nu.check("empirical family nu grid");
    if (sets.size() != static_cast<std::size_t>(grid.mu.nodes) * static_cast<std::size_t>(grid.nu.nodes))
      throw DomainError("empirical family: need one SampleSet per lattice frame");
    at_one.resize(sets.size());
    min_n = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < sets.size(); ++i) {
      sets[i].check();
      const auto mi = static_cast<int>(i / static_cast<std::size_t>(grid.nu.nodes));
      const auto ni = static_cast<int>(i % static_cast<std::size_t>(grid.nu.nodes));
      if (!same_frame(sets[i].frame, grid.mu.at(mi), grid.nu.at(ni)))
        throw DomainError("empirical family: SampleSet frame does not match its lattice slot");
      at_one[i] = sample_mean_phase(sets[i].values, 1.0);
      min_n = std::min(min_n, sets[i].values.size());
    }
  }

  std::optional<std::size_t> index(double mu, double nu) const {
    auto locate = [](const UniformGrid& g, double v) -> std::optional<int> {
      const double step = g.step();
      const double r = step > 0 ? (v - g.lo) / step : 0.0;
      const int i = static_cast<int>(std::lround(r));
      if (i < 0 || i >= g.nodes || std::abs(g.at(i) - v) > 1e-9 * std::max(1.0, std::abs(v))) return std::nullopt;
      return i;
    };
    const auto mi = locate(grid.mu, mu), ni = locate(grid.nu, nu);
    if (!mi || !ni) return std::nullopt;
    return static_cast<std::size_t>(*mi) * static_cast<std::size_t>(grid.nu.nodes) + static_cast<std::size_t>(*ni);
  }

  cplx eval(double t, double mu, double nu) const override {
    const auto i = index(mu, nu);
    if (!i) throw FrameMismatchError("empirical family: no samples at (mu, nu) = (" + format_double(mu) + ", " + format_double(nu) + ")");
    if (t == 0.0) return 1.0;
    if (t == 1.0) return at_one[*i];
    if (t == -1.0) return std::conj(at_one[*i]);
    return sample_mean_phase(sets[*i].values, t);
  }
  ProviderKind kind() const override { return ProviderKind::empirical_family; }
  std::string name() const override { return "empirical-family(" + (sets.empty() ? std::string() : sets.front().model) + ")"; }
  bool empirical() const override { return true; }
  std::size_t sample_size() const override { return min_n; }
  std::optional<FrameLattice> lattice() const override { return grid; }
};

struct CustomImpl final : CharFnProvider::Impl {
  std::function<cplx(double, double, double)> fn;
  std::string label;
  cplx eval(double t, double mu, double nu) const override { return fn(t, mu, nu); }
  ProviderKind kind() const override { return ProviderKind::custom; }
  std::string name() const override { return label; }
};

}  // namespace detail

inline CharFnProvider CharFnProvider::analytic(const StateModel& model) {
  return CharFnProvider(std::make_shared<detail::AnalyticImpl>(model));
}

inline CharFnProvider CharFnProvider::numeric(PdfFamily family, std::string name, const QuadratureConfig& cfg) {
  cfg.check();
  auto impl = std::make_shared<detail::NumericImpl>();
  impl->family = std::move(family);
  impl->label = std::move(name);
  impl->cfg = cfg;
  return CharFnProvider(impl);
}

inline CharFnProvider CharFnProvider::numeric(const StateModel& model, const QuadratureConfig& cfg) {
  return numeric(tomogram_family(model, cfg), "numeric(" + model.descriptor() + ")", cfg);
}

inline CharFnProvider CharFnProvider::expfamily(std::shared_ptr<const ExpFamilySpec> spec, const QuadratureConfig& cfg) {
  if (!spec) throw DomainError("expfamily provider: null spec");
  auto impl = std::make_shared<detail::ExpFamilyImpl>();
  impl->spec = std::move(spec);
  impl->cfg = cfg;
  return CharFnProvider(impl);
}

inline CharFnProvider CharFnProvider::mixture(std::vector<std::pair<double, CharFnProvider>> parts) {
  if (parts.empty()) throw DomainError("mixture: no components");
  double total = 0.0;
  for (const auto& [w, p] : parts) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("mixture: weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("mixture: weights must sum to 1");
  auto impl = std::make_shared<detail::MixtureImpl>();
  impl->parts = std::move(parts);
  return CharFnProvider(impl);
}

inline CharFnProvider CharFnProvider::empirical(SampleSet samples) {
  return CharFnProvider(std::make_shared<detail::EmpiricalImpl>(std::move(samples)));
}

inline CharFnProvider CharFnProvider::empirical_family(std::vector<SampleSet> sets, FrameLattice lattice) {
  return CharFnProvider(std::make_shared<detail::EmpiricalFamilyImpl>(std::move(sets), lattice));
}

inline CharFnProvider CharFnProvider::custom(std::function<cplx(double, double, double)> fn, std::string name) {
  auto impl = std::make_shared<detail::CustomImpl>();
  impl->fn = std::move(fn);
  impl->label = std::move(name);
  return CharFnProvider(impl);
}

// ---------------------------------------------------------------------------
// Descriptor grammar shared with the CLI:
//   provider := state | builtin | "mix:" weighted ("|" weighted)* | "table:" path
//   weighted := number "@" provider-without-mix
// States are served analytically, except the PHO, which goes to quadrature.

namespace detail {

inline std::function<double(double, double)> parse_frame_function(const std::string& text, const char* what) {
  if (text == "ho") return [](double mu, double nu) { return 1.0 / (mu * mu + nu * nu); };
  const double v = parse_double(text, what);
  return [v](double, double) { return v; };
}

inline std::pair<std::vector<double>, std::vector<double>> read_xw_table(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<double> xs, ws;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("X,W", 0) == 0) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("table '" + path + "': expected 'X,W' rows");
    xs.push_back(parse_double(line.substr(0, comma), "table X"));
    ws.push_back(parse_double(line.substr(comma + 1), "table W"));
  }
  return {std::move(xs), std::move(ws)};
}

}  // namespace detail

inline std::shared_ptr<ExpFamilySpec> parse_expfamily(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError("expfamily descriptor needs '<name>:<params>'");
  const std::string kind(text.substr(0, colon));
  auto kv = detail::parse_key_values(text.substr(colon + 1), "expfamily descriptor");
  auto take = [&](const std::string& key, const std::string& fallback = {}) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (fallback.empty()) throw ParseError(kind + ": missing '" + key + "'");
      return fallback;
    }
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  std::shared_ptr<ExpFamilySpec> spec;
  if (kind == "exponential") {
    spec = expfamily::exponential(detail::parse_double(take("lambda"), "lambda"));
  } else if (kind == "gamma") {
    spec = expfamily::gamma(detail::parse_double(take("k"), "k"), detail::parse_double(take("theta", "1"), "theta"));
  } else if (kind == "chisq") {
    spec = expfamily::chisq(detail::parse_double(take("k"), "k"));
  } else if (kind == "power") {
    const double alpha = detail::parse_double(take("alpha"), "alpha");
    const std::string p = take("p");
    spec = expfamily::power(alpha, detail::parse_frame_function(p, "p"), p);
  } else if (kind == "gauss-eta") {
    const std::string p1 = take("p1", "0"), p2 = take("p2");
    spec = expfamily::gauss_eta(detail::parse_frame_function(p1, "p1"), detail::parse_frame_function(p2, "p2"),
                                "p1=" + p1 + ",p2=" + p2);
  } else {
    throw ParseError("unknown expfamily '" + kind + "'");
  }
  if (!kv.empty()) throw ParseError(kind + ": unknown key '" + kv.begin()->first + "'");
  return spec;
}

inline bool is_expfamily_descriptor(std::string_view text) {
  for (const char* k : {"exponential:", "gamma:", "chisq:", "power:", "gauss-eta:"})
    if (text.rfind(k, 0) == 0) return true;
  return false;
}

inline CharFnProvider parse_provider(std::string_view text, const QuadratureConfig& cfg = {}) {
  if (text.rfind("mix:", 0) == 0) {
    std::vector<std::pair<double, CharFnProvider>> parts;
    std::string_view body = text.substr(4);
    while (!body.empty()) {
      const auto bar = body.find('|');
      const auto item = body.substr(0, bar);
      const auto at = item.find('@');
      if (at == std::string_view::npos) throw ParseError("mixture component must look like weight@descriptor");
      const auto inner = item.substr(at + 1);
      if (inner.rfind("mix:", 0) == 0) throw ParseError("nested mixtures are not supported");
      parts.emplace_back(detail::parse_double(item.substr(0, at), "mixture weight"), parse_provider(inner, cfg));
      if (bar == std::string_view::npos) break;
      body.remove_prefix(bar + 1);
    }
    return CharFnProvider::mixture(std::move(parts));
  }
  if (text.rfind("table:", 0) == 0) {
    const std::string path(text.substr(6));
    auto [xs, ws] = detail::read_xw_table(path);
    const PdfHandle pdf = tabulated_pdf(std::move(xs), std::move(ws), std::string(text));
    return CharFnProvider::numeric([pdf](const FrameParams&) { return pdf; }, std::string(text), cfg);
  }
  if (is_expfamily_descriptor(text)) return CharFnProvider::expfamily(parse_expfamily(text), cfg);
  const StateModel m = StateModel::parse(text);
  if (is_pho(m)) return CharFnProvider::numeric(m, cfg);
  return CharFnProvider::analytic(m);
}

}  // namespace tomokit
