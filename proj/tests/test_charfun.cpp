#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tomokit/charfun.hpp"
#include "tomokit/estimation.hpp"

using namespace tomokit;

namespace {

double dist(cplx a, cplx b) { return std::abs(a - b); }

const std::vector<FrameParams>& frames() {
  static const std::vector<FrameParams> f = {{1, 0}, {0, 1}, {0.3, -1.2}, {-2.0, 0.7}, {2.5, 2.5}, {-0.4, -0.1}};
  return f;
}

}  // namespace

TEST(CharFn, UnitAtZeroTime) {
  for (const auto& p : {CharFnProvider::analytic(StateModel::ho(3)), CharFnProvider::numeric(StateModel::pho(10, 1)),
                        CharFnProvider::expfamily(expfamily::gamma(2, 1))})
    for (const auto& f : frames()) EXPECT_EQ(p(0.0, f), cplx(1.0));
}

TEST(CharFn, GroundStateValues) {
  EXPECT_NEAR(dist(CharFnProvider::numeric(StateModel::ho(0))(1.0, 2.0, 0.0), std::exp(-1.0)), 0.0, 1e-9);
  EXPECT_NEAR(dist(CharFnProvider::analytic(StateModel::ho(0))(1.0, 2.0, 0.0), std::exp(-1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(CharFnProvider::analytic(StateModel::ho(1))(1.0, std::sqrt(2.0), 0.0)), 0.0, 1e-15);
}

TEST(CharFn, LaguerreForm) {
  for (int n : {0, 2, 6})
    for (const auto& f : frames()) {
      const double s2 = f.mu * f.mu + f.nu * f.nu;
      const double expect = std::exp(-s2 / 4) * assoc_laguerre(n, 0.0, s2 / 2);
      EXPECT_NEAR(dist(charfn_analytic(StateModel::ho(n), 1.0, f), expect), 0.0, 1e-13);
    }
}

TEST(CharFn, CoherentAtOriginAndCharacteristic) {
  const StateModel c = StateModel::coherent({1.0, -0.5});
  EXPECT_NEAR(dist(charfn_analytic(c, 1.0, {0, 0}), 1.0), 0.0, 1e-15);
  for (const auto& f : frames()) {
    const double m = std::sqrt(2.0) * (f.mu * 1.0 + f.nu * -0.5), v = 0.5 * (f.mu * f.mu + f.nu * f.nu);
    for (double t : {-1.0, 0.5, 1.0}) EXPECT_NEAR(dist(charfn_analytic(c, t, f), std::polar(std::exp(-0.5 * v * t * t), m * t)), 0.0, 1e-14);
  }
}

TEST(CharFn, AnalyticAgreesWithQuadrature) {
  for (const auto& m : {StateModel::ho(0), StateModel::ho(4), StateModel::coherent({0.7, 1.1}), StateModel::crystallized_cat(2.0),
                        StateModel::crystallized_cat({0.4, -0.9})}) {
    const auto a = CharFnProvider::analytic(m), q = CharFnProvider::numeric(m);
    for (const auto& f : frames())
      for (double t : {-1.0, 1.0, 0.37}) EXPECT_NEAR(dist(a(t, f), q(t, f)), 0.0, 1e-7) << m.descriptor();
  }
}

TEST(CharFn, BoundedAndConjugateSymmetric) {
  for (const auto& p : {CharFnProvider::analytic(StateModel::crystallized_cat(1.5)), CharFnProvider::numeric(StateModel::pho(0, 2)),
                        CharFnProvider::expfamily(expfamily::chisq(3))})
    for (const auto& f : frames())
      for (double t : {0.3, 1.0, 2.2}) {
        EXPECT_LE(std::abs(p(t, f)), 1.0 + 1e-9);
        EXPECT_NEAR(dist(p(-t, f), std::conj(p(t, f))), 0.0, 1e-9);
      }
}

TEST(CharFn, MixtureIsLinear) {
  const auto a = CharFnProvider::analytic(StateModel::ho(0)), b = CharFnProvider::analytic(StateModel::coherent(1.0));
  const auto mix = CharFnProvider::mixture({{0.25, a}, {0.75, b}});
  for (const auto& f : frames()) EXPECT_NEAR(dist(mix(1.0, f), 0.25 * a(1.0, f) + 0.75 * b(1.0, f)), 0.0, 1e-15);
  EXPECT_THROW(CharFnProvider::mixture({{-0.5, a}, {1.5, b}}), DomainError);
  EXPECT_THROW(CharFnProvider::mixture({{0.5, a}, {0.6, b}}), DomainError);
}

TEST(CharFn, PowerExponentialClosedForm) {
  EXPECT_NEAR(dist(power_exponential_charfn(1, 1), {0.5, 0.5}), 0.0, 1e-15);
  EXPECT_NEAR(dist(power_exponential_charfn(2, 1), {0.0, 0.5}), 0.0, 1e-15);
  EXPECT_NEAR(dist(power_exponential_charfn(1.5, 1e6), 1.0), 0.0, 1e-5);
}

TEST(CharFn, ExpFamilyMatchesClosedForm) {
  for (double alpha : {0.5, 1.0, 2.0, 3.5})
    for (double p : {0.3, 1.0, 4.0}) {
      const auto prov = CharFnProvider::expfamily(expfamily::power(alpha, [p](double, double) { return p; }, std::to_string(p)));
      const cplx got = prov(1.0, 1.0, 0.0), want = power_exponential_charfn(alpha, p);
      EXPECT_LE(std::abs(got - want), 1e-8 * std::abs(want)) << alpha << " " << p;
    }
}

TEST(CharFn, GaussianSpecIsGroundState) {
  const auto g = CharFnProvider::expfamily(expfamily::gauss_ho());
  for (const auto& f : frames()) EXPECT_NEAR(dist(g(1.0, f), std::exp(-0.25 * (f.mu * f.mu + f.nu * f.nu))), 0.0, 1e-9);
  EXPECT_TRUE(g.divergent_at(0, 0));
  EXPECT_NEAR(dist(g(1.0, 0.0, 0.0), 1.0), 0.0, 1e-6);
}

TEST(CharFn, DivergentPowerLawHasNoLimit) {
  const auto p = CharFnProvider::expfamily(parse_expfamily("power:alpha=1,p=ho"));
  EXPECT_TRUE(p.divergent_at(0, 0));
  // p = 1/(mu^2+nu^2) diverges at the origin, so the limit is the point mass at 0.
  EXPECT_NEAR(dist(p(1.0, 0.0, 0.0), 1.0), 0.0, 1e-4);
}

TEST(CharFn, EmpiricalRequiresItsFrame) {
  const SampleSet s = sample_tomogram(StateModel::ho(0), {1, 0}, 2000, 3);
  const auto p = CharFnProvider::empirical(s);
  EXPECT_TRUE(p.is_empirical());
  EXPECT_EQ(p.sample_size(), 2000u);
  EXPECT_NO_THROW(p(1.0, 1.0, 0.0));
  EXPECT_THROW(p(1.0, 0.5, 0.0), FrameMismatchError);
}

TEST(CharFn, EmpiricalIsSampleMeanOfPhase) {
  SampleSet s;
  s.values = {0.0, 1.0, -2.0};
  s.frame = {1, 1};
  const auto p = CharFnProvider::empirical(s);
  const cplx want = (1.0 + std::polar(1.0, 0.7) + std::polar(1.0, -1.4)) / 3.0;
  EXPECT_NEAR(dist(p(0.7, 1, 1), want), 0.0, 1e-15);
}

TEST(CharFn, ParseProvider) {
  EXPECT_EQ(parse_provider("ho:n=1").kind(), ProviderKind::analytic);
  EXPECT_EQ(parse_provider("pho:a=10,n=1").kind(), ProviderKind::numeric);
  EXPECT_EQ(parse_provider("exponential:lambda=1").kind(), ProviderKind::expfamily);
  EXPECT_EQ(parse_provider("gamma:k=2,theta=1").kind(), ProviderKind::expfamily);
  EXPECT_EQ(parse_provider("gauss-eta:p2=ho").kind(), ProviderKind::expfamily);
  EXPECT_EQ(parse_provider("mix:0.5@ho:n=0|0.5@ho:n=1").kind(), ProviderKind::mixture);
  for (const char* bad : {"mix:0.5ho:n=0", "exponential:", "power:alpha=1", "gamma:k=2,zeta=1", "nope:x=1", "mix:1@mix:1@ho:n=0"})
    EXPECT_THROW(parse_provider(bad), Error) << bad;
}

TEST(CharFn, ProviderKindNames) {
  EXPECT_STREQ(to_string(ProviderKind::empirical_family), "empirical_family");
  EXPECT_STREQ(to_string(ProviderKind::analytic), "analytic");
}
