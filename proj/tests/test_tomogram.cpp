#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tomokit/tomogram.hpp"

using namespace tomokit;

namespace {

constexpr double kInvSqrtPi = 0.56418958354775628;

// N(center, (mu^2+nu^2)/2) density; the ground-state tomogram shifted by center.
double gaussian(double X, double center, const FrameParams& f) {
  const double v = 0.5 * (f.mu * f.mu + f.nu * f.nu);
  return std::exp(-(X - center) * (X - center) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
}

std::vector<FrameParams> lattice() {
  std::vector<FrameParams> out;
  for (double mu : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0})
    for (double nu : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0})
      if (mu != 0.0 || nu != 0.0) out.push_back({mu, nu});
  return out;
}

}  // namespace

TEST(Tomogram, GroundStatePointValues) {
  const StateModel ho = StateModel::ho(0);
  EXPECT_NEAR(tomogram_numeric(ho, 0.0, {1, 0}), kInvSqrtPi, 1e-12);
  EXPECT_NEAR(tomogram_numeric(ho, 1.0, {1, 1}), 0.24197072451914337, 1e-10);
  EXPECT_NEAR(tomogram_analytic(ho, 1.0, {1, 1}), 0.24197072451914337, 1e-14);
}

TEST(Tomogram, CoherentIsShiftedGaussian) {
  const StateModel c = StateModel::coherent(1.0);
  EXPECT_NEAR(tomogram_numeric(c, std::sqrt(2.0), {1, 0}), kInvSqrtPi, 1e-12);
  const cplx al(0.7, -1.1);
  const StateModel c2 = StateModel::coherent(al);
  for (const auto& f : lattice())
    for (double X : {-3.0, -0.4, 0.0, 1.3, 2.9}) {
      const double center = std::sqrt(2.0) * (f.mu * al.real() + f.nu * al.imag());
      EXPECT_NEAR(tomogram_analytic(c2, X, f), gaussian(X, center, f), 1e-13);
    }
}

TEST(Tomogram, ExcitedStateZeroAndHermiteForm) {
  EXPECT_NEAR(tomogram_analytic(StateModel::ho(1), 0.0, {1, 0}), 0.0, 1e-16);
  // HO(n): psi_n(X/s)^2 / s with s^2 = mu^2 + nu^2.
  for (int n : {1, 4, 9})
    for (const auto& f : {FrameParams{1.0, 0.5}, FrameParams{-0.3, 2.0}}) {
      const double s = std::hypot(f.mu, f.nu);
      for (double X : {-2.0, 0.3, 1.9}) {
        const double y = X / s;
        const double psi = std::pow(std::numbers::pi, -0.25) / std::sqrt(std::pow(2.0, n) * std::tgamma(n + 1.0)) *
                           std::hermite(static_cast<unsigned>(n), y) * std::exp(-0.5 * y * y);
        EXPECT_NEAR(tomogram_analytic(StateModel::ho(n), X, f), psi * psi / s, 1e-12);
      }
    }
}

TEST(Tomogram, AnalyticMatchesQuadratureOnLattice) {
  std::vector<std::pair<StateModel, double>> cases = {
      {StateModel::ho(0), 1e-6},   {StateModel::ho(5), 1e-6},          {StateModel::coherent({1.0, 0.5}), 1e-6},
      {StateModel::crystallized_cat(2.0), 1e-6}, {StateModel::crystallized_cat({0.5, -1.0}), 1e-6},
      {StateModel::pho(0.0, 0), 1e-6}, {StateModel::pho(0.0, 2), 1e-6},   {StateModel::pho(10.0, 1), 1e-4},
      {StateModel::pho(0.3, 2, 1.5), 1e-4}};
  for (const auto& [m, tol] : cases)
    for (const auto& f : lattice()) {
      if (is_pho(m) && f.nu == 0.0) continue;
      for (double X = -8.0; X <= 8.0; X += 1.6) {
        const double a = tomogram_analytic(m, X, f), q = tomogram_numeric(m, X, f);
        EXPECT_LE(std::abs(a - q), tol * std::abs(q) + 1e-12) << m.descriptor() << " (" << f.mu << "," << f.nu << ") X=" << X;
      }
    }
}

TEST(Tomogram, PhoAtZeroNuIsUnsupportedAnalytically) {
  EXPECT_THROW(tomogram_analytic(StateModel::pho(10, 1), 0.5, {1, 0}), UnsupportedError);
  // The dispatcher falls back to the position-density limit.
  const StateModel m = StateModel::pho(10, 1);
  EXPECT_NEAR(tomogram(m, 1.3, {2, 0}), std::norm(wavefunction(m, 0.65)) / 2.0, 1e-14);
}

TEST(Tomogram, DegenerateFrameRejected) {
  EXPECT_THROW(tomogram_numeric(StateModel::ho(0), 0.0, {0, 0}), DegenerateFrameError);
  EXPECT_THROW(tomogram_analytic(StateModel::ho(0), 0.0, {0, 0}), DegenerateFrameError);
}

TEST(Tomogram, LiteralRisingPochhammerDiverges) {
  PhoOptions opt;
  opt.literal_rising_pochhammer = true;
  EXPECT_THROW(detail::pho_tomogram_laguerre(*StateModel::pho(10, 2).get_if<PseudoHarmonic>(), 1.0, {1, 1}, opt), ConvergenceError);
}

TEST(Tomogram, NormalizedOnLattice) {
  for (const auto& m : {StateModel::ho(0), StateModel::ho(7), StateModel::coherent({-1.0, 1.5}), StateModel::crystallized_cat({1.2, 0.4})})
    for (const auto& f : lattice()) EXPECT_NEAR(tomogram_mass(m, f), 1.0, 1e-6) << m.descriptor() << " " << f.mu << "," << f.nu;
  for (const auto& m : {StateModel::pho(0, 0), StateModel::pho(0, 2), StateModel::pho(100, 1)})
    for (const auto& f : {FrameParams{1, 0}, FrameParams{-0.5, 2}, FrameParams{0, 1}, FrameParams{2, -1}})
      EXPECT_NEAR(tomogram_mass(m, f), 1.0, 1e-6) << m.descriptor() << " " << f.mu << "," << f.nu;
}

TEST(Tomogram, Nonnegative) {
  for (const auto& m : {StateModel::ho(3), StateModel::crystallized_cat(2.0), StateModel::pho(0, 1), StateModel::pho(1000, 2)})
    for (const auto& f : {FrameParams{1, 0.5}, FrameParams{-1, 2}})
      for (double X = -8.0; X <= 8.0; X += 0.25) EXPECT_GE(tomogram(m, X, f), -1e-10);
}

TEST(Tomogram, CatDiagonalTermsAreCoherentTomograms) {
  const StateModel cat = StateModel::crystallized_cat({1.3, 0.2});
  const auto* c = cat.get_if<CrystallizedCat>();
  for (int j = 0; j < 3; ++j) {
    const StateModel coh = StateModel::coherent(c->component(j));
    for (double X : {-1.0, 0.2, 2.5}) {
      const cplx t = cat_tomogram_term(cat, j, j, X, {0.8, -0.6});
      EXPECT_NEAR(t.real(), tomogram_analytic(coh, X, {0.8, -0.6}), 1e-14);
      EXPECT_NEAR(t.imag(), 0.0, 1e-15);
    }
  }
}

TEST(Tomogram, Homogeneity) {
  for (const auto& m : {StateModel::ho(2), StateModel::coherent({0.4, -0.9})})
    for (double lam : {0.5, 2.0, 3.7})
      for (double X : {-1.5, 0.0, 0.8}) {
        const FrameParams f{0.6, 1.1};
        EXPECT_NEAR(tomogram_numeric(m, X, {lam * f.mu, lam * f.nu}), tomogram_numeric(m, X / lam, f) / lam, 1e-10);
      }
}

TEST(OpticalFrame, Substitutions) {
  const StateModel ho = StateModel::ho(0);
  for (double X : {-1.0, 0.5}) EXPECT_NEAR(optical_tomogram(ho, X, std::numbers::pi / 2), tomogram_analytic(ho, X, {0, 1}), 1e-14);
  for (double phi : {0.0, 0.7, 2.0, 4.0}) EXPECT_NEAR(optical_tomogram(ho, 0.0, phi), kInvSqrtPi, 1e-13);
  const StateModel c = StateModel::coherent(1.0);
  for (double X : {-0.3, 0.9}) EXPECT_NEAR(optical_tomogram(c, X, 0.0), optical_tomogram(c, -X, std::numbers::pi), 1e-13);
}

TEST(OpticalFrame, Squeeze) {
  const auto f1 = frame_from_squeeze(1.0, 0.4);
  EXPECT_DOUBLE_EQ(f1.mu, std::cos(0.4));
  EXPECT_DOUBLE_EQ(f1.nu, std::sin(0.4));
  const auto f2 = frame_from_squeeze(2.0, 0.0);
  EXPECT_EQ(f2.mu, 2.0);
  EXPECT_EQ(f2.nu, 0.0);
  const auto f3 = frame_from_squeeze(2.0, std::numbers::pi / 2);
  EXPECT_NEAR(f3.mu, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(f3.nu, 0.5);
  EXPECT_THROW(frame_from_squeeze(0.0, 1.0), DomainError);
  EXPECT_THROW(frame_from_squeeze(-1.0, 1.0), DomainError);
}

TEST(TomogramGrid, CsvHeaderAndProvenance) {
  const auto rows = tomogram_grid(StateModel::ho(0), {-1.0, 0.0, 1.0}, {1, 0});
  const std::string csv = tomogram_csv(rows, Provenance{"test", "cfg"});
  EXPECT_EQ(csv.rfind("# provenance ", 0), 0u);
  EXPECT_NE(csv.find("\nX,mu,nu,W\n"), std::string::npos);
  EXPECT_EQ(tomogram_json(rows, Provenance{"test", "cfg"})["records"].size(), 3u);
}
