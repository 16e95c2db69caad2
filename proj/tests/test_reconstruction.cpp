#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tomokit/reconstruction.hpp"

using namespace tomokit;

namespace {
const UniformGrid kY{-6.0, 6.0, 121};
}

TEST(Element, GroundStateValues) {
  const auto p = CharFnProvider::analytic(StateModel::ho(0));
  EXPECT_NEAR(density_matrix_element(p, 0, 0).real(), 0.5641895835477563, 1e-10);
  // psi_0(1) psi_0(-1) = e^{-1}/sqrt(pi)
  const cplx v = density_matrix_element(p, 1, -1);
  EXPECT_NEAR(v.real(), std::exp(-1.0) / std::sqrt(std::numbers::pi), 1e-10);
  EXPECT_NEAR(v.real(), 0.2075537487, 1e-9);
  EXPECT_NEAR(v.imag(), 0.0, 1e-12);
}

TEST(Element, SwapConjugates) {
  for (const auto& m : {StateModel::coherent({1.0, 0.5}), StateModel::crystallized_cat({1.2, -0.3})}) {
    const auto p = CharFnProvider::analytic(m);
    for (auto [y, y2] : {std::pair{0.3, -1.1}, std::pair{2.0, 0.5}}) {
      const cplx a = density_matrix_element(p, y, y2), b = density_matrix_element(p, y2, y);
      EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(a - wavefunction(m, y) * std::conj(wavefunction(m, y2))), 0.0, 1e-9);
    }
  }
}

TEST(Grid, RoundTripMatchesOracle) {
  for (const auto& m : {StateModel::ho(0), StateModel::ho(3), StateModel::coherent({1.0, 0.5}), StateModel::crystallized_cat(2.0),
                        StateModel::crystallized_cat({0.7, 0.7})}) {
    const auto g = density_matrix_grid(CharFnProvider::analytic(m), kY);
    EXPECT_LE(g.sup_distance(pure_state_oracle(m, kY)), 1e-6) << m.descriptor();
    EXPECT_NEAR(g.trace, 1.0, 1e-3) << m.descriptor();
    EXPECT_LE(g.hermiticity_defect, 1e-6);
    EXPECT_GE(g.min_eigenvalue(), -1e-6);
    EXPECT_NEAR(g.eigenvalues.front(), 1.0, 1e-3);
  }
}

TEST(Grid, MixtureSpectrum) {
  const auto mix = CharFnProvider::mixture(
      {{0.5, CharFnProvider::analytic(StateModel::ho(0))}, {0.5, CharFnProvider::analytic(StateModel::ho(1))}});
  const auto g = density_matrix_grid(mix, kY);
  ASSERT_GE(g.eigenvalues.size(), 3u);
  EXPECT_NEAR(g.eigenvalues[0], 0.5, 1e-3);
  EXPECT_NEAR(g.eigenvalues[1], 0.5, 1e-3);
  EXPECT_NEAR(g.eigenvalues[2], 0.0, 1e-3);
  EXPECT_NEAR(g.purity_from_spectrum(), 0.5, 2e-3);
}

TEST(Grid, DiagonalAgreesWithValidator) {
  const auto p = CharFnProvider::analytic(StateModel::crystallized_cat({1.0, 0.4}));
  const auto g = density_matrix_grid(p, kY);
  const auto d = check_diag_positivity(p, kY.values(), ValidationConfig{}.lattice.mu);
  for (int i = 0; i < kY.nodes; ++i) EXPECT_NEAR(g.values(i, i).real(), d.values[static_cast<std::size_t>(i)], 1e-8);
}

TEST(Grid, HermiticityFollowsFromCondition) {
  const auto p = CharFnProvider::analytic(StateModel::coherent({-0.8, 1.3}));
  const auto grid = UniformGrid{-6, 6, 25}.values();
  ASSERT_LE(check_hermiticity(p, grid, grid), 1e-8);
  EXPECT_LE(density_matrix_grid(p, kY).hermiticity_defect, 1e-6);
}

TEST(Purity, Examples) {
  for (int n : {0, 2, 5}) EXPECT_NEAR(purity(CharFnProvider::analytic(StateModel::ho(n))), 1.0, 1e-3) << n;
  const auto h0 = CharFnProvider::analytic(StateModel::ho(0)), h1 = CharFnProvider::analytic(StateModel::ho(1));
  EXPECT_NEAR(purity(CharFnProvider::mixture({{0.5, h0}, {0.5, h1}})), 0.5, 1e-3);
  EXPECT_NEAR(purity(CharFnProvider::mixture({{0.9, h0}, {0.1, h1}})), 0.82, 1e-3);
}

TEST(Purity, AgreesWithSpectrum) {
  const auto h0 = CharFnProvider::analytic(StateModel::ho(0)), c = CharFnProvider::analytic(StateModel::coherent(1.0));
  for (const auto& p : {CharFnProvider::mixture({{0.3, h0}, {0.7, c}}), CharFnProvider::analytic(StateModel::crystallized_cat(1.5))}) {
    const double s = density_matrix_grid(p, kY).purity_from_spectrum();
    EXPECT_NEAR(purity(p), s, 2e-3);
  }
}

TEST(Fidelity, Examples) {
  const auto h0 = CharFnProvider::analytic(StateModel::ho(0)), h1 = CharFnProvider::analytic(StateModel::ho(1));
  EXPECT_NEAR(overlap_fidelity(h0, h0), 1.0, 1e-3);
  EXPECT_NEAR(overlap_fidelity(h0, h1), 0.0, 1e-3);
  EXPECT_NEAR(overlap_fidelity(h0, CharFnProvider::analytic(StateModel::coherent(1.0))), std::exp(-1.0), 1e-3);
}

TEST(Oracle, Properties) {
  const auto g = pure_state_oracle(StateModel::ho(0), kY);
  EXPECT_NEAR(g.values(60, 60).real(), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
  for (const auto& m : {StateModel::ho(4), StateModel::coherent({1, 1}), StateModel::crystallized_cat(2.0)}) {
    const auto o = pure_state_oracle(m, kY);
    EXPECT_EQ(o.hermiticity_defect, 0.0);
    EXPECT_NEAR(o.trace, 1.0, 1e-6) << m.descriptor();
  }
}

TEST(Serialization, JsonAndCsv) {
  const auto g = pure_state_oracle(StateModel::ho(0), UniformGrid{-1, 1, 3});
  const Provenance prov{"test", "cfg"};
  const json j = g.to_json(prov);
  EXPECT_EQ(j["y_nodes"].size(), 3u);
  EXPECT_EQ(j["values"].size(), 9u);
  EXPECT_EQ(j["values"][0].size(), 2u);
  const std::string csv = g.abs_csv(prov);
  EXPECT_NE(csv.find("\ny,y2,abs_rho\n"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
}
