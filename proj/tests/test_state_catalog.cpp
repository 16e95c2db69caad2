#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tomokit/state_catalog.hpp"

using namespace tomokit;

namespace {

double integrate(const std::function<double(double)>& f, double lo, double hi) {
  double acc = 0.0;
  const int panels = 200;
  for (int i = 0; i < panels; ++i) {
    const double a = lo + (hi - lo) * i / panels, b = lo + (hi - lo) * (i + 1) / panels;
    acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0);
  }
  return acc;
}

double scale(const StateModel& m) {
  double s = 1.0;
  if (auto* h = m.get_if<HarmonicOscillator>()) s = 1.0 + std::sqrt(h->n);
  if (auto* p = m.get_if<PseudoHarmonic>()) s = p->x_omega * (1.0 + std::sqrt(p->n + p->b()));
  if (auto* c = m.get_if<Coherent>()) s = std::max(1.0, std::abs(c->alpha));
  if (auto* c = m.get_if<CrystallizedCat>()) s = std::max(1.0, std::abs(c->alpha));
  return s;
}

double norm2(const StateModel& m) {
  const double L = 12.0 * scale(m);
  return integrate([&](double x) { return std::norm(wavefunction(m, x)); }, -L, L);
}

}  // namespace

TEST(Wavefunction, GroundStateAtOrigin) { EXPECT_NEAR(wavefunction(StateModel::ho(0), 0.0).real(), std::pow(std::numbers::pi, -0.25), 1e-15); }

TEST(Wavefunction, PhoVanishesAtWallAndLeftOfIt) {
  for (double a : {0.0, 10.0, 1000.0})
    for (int n : {0, 3}) {
      EXPECT_EQ(wavefunction(StateModel::pho(a, n), 0.0), cplx(0.0));
      EXPECT_EQ(wavefunction(StateModel::pho(a, n), -1.3), cplx(0.0));
    }
}

TEST(Wavefunction, CoherentZeroIsGroundState) {
  for (double x : {-2.0, 0.3, 1.7}) EXPECT_NEAR(std::abs(wavefunction(StateModel::coherent(0.0), x) - wavefunction(StateModel::ho(0), x)), 0.0, 1e-15);
}

TEST(Wavefunction, HalfOscillatorGroundStateShape) {
  const StateModel m = StateModel::pho(0.0, 0);
  for (double x : {0.2, 1.0, 2.5}) {
    const double expect = 2.0 * std::pow(std::numbers::pi, -0.25) * x * std::exp(-0.5 * x * x);
    EXPECT_NEAR(std::abs(wavefunction(m, x)), expect, 1e-13);
  }
}

TEST(Wavefunction, NormalizedAcrossCatalog) {
  std::vector<StateModel> states;
  for (int n = 0; n <= 10; ++n) states.push_back(StateModel::ho(n));
  for (double a : {0.0, 0.3, 10.0, 100.0, 1000.0})
    for (int n = 0; n <= 3; ++n) states.push_back(StateModel::pho(a, n));
  states.push_back(StateModel::pho(10.0, 2, 1.7));
  for (cplx al : {cplx(0.0), cplx(1.0), cplx(1.0, 0.5), cplx(-1.2, 1.5), cplx(2.0)}) {
    states.push_back(StateModel::coherent(al));
    states.push_back(StateModel::crystallized_cat(al == 0.0 ? cplx(1e-3) : al));
  }
  for (const auto& s : states) EXPECT_NEAR(norm2(s), 1.0, 1e-6) << s.descriptor();
}

TEST(Wavefunction, Orthogonality) {
  for (int m = 0; m <= 5; ++m)
    for (int n = 0; n <= 5; ++n) {
      const double ho = integrate([&](double x) { return (std::conj(wavefunction(StateModel::ho(m), x)) * wavefunction(StateModel::ho(n), x)).real(); }, -15, 15);
      EXPECT_NEAR(ho, m == n ? 1.0 : 0.0, 1e-6) << m << n;
      for (double a : {0.0, 10.0}) {
        const double pho = integrate(
            [&](double x) { return (std::conj(wavefunction(StateModel::pho(a, m), x)) * wavefunction(StateModel::pho(a, n), x)).real(); }, 0, 20);
        EXPECT_NEAR(pho, m == n ? 1.0 : 0.0, 1e-6) << a << " " << m << n;
      }
    }
}

TEST(Normalization, NonCatStatesReturnOne) {
  EXPECT_EQ(normalization_constant(StateModel::ho(3)), 1.0);
  EXPECT_EQ(normalization_constant(StateModel::pho(10, 1)), 1.0);
  EXPECT_EQ(normalization_constant(StateModel::coherent({1, 1})), 1.0);
}

TEST(Normalization, CatMatchesGramMatrix) {
  for (cplx al : {cplx(1e-4), cplx(0.5), cplx(2.0), cplx(1.0, -1.5)}) {
    const StateModel m = StateModel::crystallized_cat(al);
    const auto* c = m.get_if<CrystallizedCat>();
    // <beta|gamma> for coherent states, summed over the three components.
    double gram = 0.0;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const cplx b = c->component(j), g = c->component(k);
        gram += std::exp(-0.5 * std::norm(b) - 0.5 * std::norm(g) + std::conj(b) * g).real();
      }
    EXPECT_NEAR(normalization_constant(m), 1.0 / std::sqrt(gram), 1e-8) << al;
  }
  EXPECT_NEAR(normalization_constant(StateModel::crystallized_cat(1e-6)), 1.0 / 3.0, 1e-8);
}

TEST(Descriptor, RoundTrip) {
  for (const char* d : {"ho:n=2", "pho:a=10,n=1", "pho:a=0.5,n=3,xw=1.5", "coh:re=1,im=0.5", "ccat:re=2", "ccat:re=0.5,im=-1"}) {
    const StateModel m = StateModel::parse(d);
    EXPECT_EQ(StateModel::parse(m.descriptor()).descriptor(), m.descriptor()) << d;
  }
}

TEST(Descriptor, Rejections) {
  for (const char* d : {"ho", "ho:n=-1", "ho:n=1.5", "pho:a=-1,n=0", "pho:a=1,n=0,xw=0", "coh:im=1", "wat:n=1", "ho:n=1,q=2"})
    EXPECT_THROW(StateModel::parse(d), Error) << d;
}

TEST(Support, CoversTheMass) {
  for (const auto& m : {StateModel::ho(10), StateModel::pho(1000, 3), StateModel::coherent({2, -1}), StateModel::crystallized_cat(2.0)}) {
    const Interval s = position_support(m);
    const double inside = integrate([&](double x) { return std::norm(wavefunction(m, x)); }, s.lo, s.hi);
    EXPECT_NEAR(inside, 1.0, 1e-10) << m.descriptor();
  }
}
