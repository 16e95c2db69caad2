#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tomokit/charfun.hpp"
#include "tomokit/grid.hpp"
#include "tomokit/io.hpp"
#include "tomokit/parallel.hpp"
#include "tomokit/state_catalog.hpp"
#include "tomokit/validator.hpp"

namespace tomokit {

// rho(y_i, y_j) on a uniform grid, with the diagnostics the kernel should satisfy.
struct DensityMatrixGrid {
  std::vector<double> y_nodes;
  Eigen::MatrixXcd values;
  double dy = 0.0;
  double trace = 0.0;               // sum_i rho(y_i, y_i) dy
  double hermiticity_defect = 0.0;  // max |rho - rho^dagger|
  std::vector<double> eigenvalues;  // of (rho + rho^dagger)/2 * dy, descending

  double min_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
  double purity_from_spectrum() const {
    double s = 0.0;
    for (double l : eigenvalues) s += l * l;
    return s;
  }

  void finalize() {
    const auto n = values.rows();
    trace = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) trace += values(i, i).real() * dy;
    hermiticity_defect = (values - values.adjoint()).cwiseAbs().maxCoeff();
    const Eigen::MatrixXcd h = 0.5 * (values + values.adjoint()) * dy;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("density matrix eigensolver failed");
    eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(eigenvalues.rbegin(), eigenvalues.rend());
  }

  double sup_distance(const DensityMatrixGrid& o) const {
    if (o.values.rows() != values.rows()) throw DomainError("density matrix grids differ in size");
    return (values - o.values).cwiseAbs().maxCoeff();
  }

  json to_json(const Provenance& prov) const {
    json rows = json::array();  // row-major [re, im] pairs
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      for (Eigen::Index j = 0; j < values.cols(); ++j) rows.push_back({values(i, j).real(), values(i, j).imag()});
    return {{"provenance", prov.to_json()},
            {"y_nodes", y_nodes},
            {"dy", dy},
            {"layout", "row-major"},
            {"values", rows},
            {"trace", trace},
            {"hermiticity_defect", hermiticity_defect},
            {"eigenvalues", eigenvalues}};
  }

  // |rho(y, y')| as long-form rows.
  std::string abs_csv(const Provenance& prov) const {
    std::string s = prov.csv_comment() + "y,y2,abs_rho\n";
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      for (Eigen::Index j = 0; j < values.cols(); ++j)
        s += format_double(y_nodes[static_cast<std::size_t>(i)]) + "," + format_double(y_nodes[static_cast<std::size_t>(j)]) +
             "," + format_double(std::abs(values(i, j))) + "\n";
    return s;
  }
};

// rho(y, y') = (1/2pi) int phi(1; mu, y - y') e^{-i mu (y + y')/2} dmu, trapezoid
// rule on the mu grid of cfg.lattice.
inline cplx density_matrix_element(const CharFnProvider& p, double y, double y2, const ValidationConfig& cfg = {},
                                   double* boundary = nullptr) {
  const UniformGrid mu = cfg.effective_lattice(p).mu;
  const auto w = trapezoid_weights(mu);
  cplx acc = 0.0;
  double edge = 0.0;
  for (int i = 0; i < mu.nodes; ++i) {
    const double m = mu.at(i);
    const cplx v = p(1.0, m, y - y2);
    if (i == 0 || i + 1 == mu.nodes) edge = std::max(edge, std::abs(v));
    acc += w[static_cast<std::size_t>(i)] * v * std::polar(1.0, -0.5 * m * (y + y2));
  }
  if (boundary) *boundary = edge;
  return acc / (2.0 * std::numbers::pi);
}

// Full grid. phi(1; mu, y_i - y_j) depends on i - j only, so it is tabulated
// once per offset and reused along each diagonal.
inline DensityMatrixGrid density_matrix_grid(const CharFnProvider& p, const UniformGrid& y, const ValidationConfig& cfg = {}) {
  y.check("y grid");
  const UniformGrid mu = cfg.effective_lattice(p).mu;
  const auto mus = mu.values();
  const auto w = trapezoid_weights(mu);
  const int n = y.nodes;
  const double dy = y.step();
  const auto offsets = static_cast<std::size_t>(2 * n - 1);

  std::vector<std::vector<cplx>> table(offsets);  // table[d + n - 1][m] = w_m phi(1; mu_m, d dy)
  parallel_for(offsets, [&](std::size_t k) {
    const double nu = (static_cast<double>(k) - (n - 1)) * dy;
    auto& row = table[k];
    row.resize(mus.size());
    for (std::size_t m = 0; m < mus.size(); ++m) row[m] = w[m] * p(1.0, mus[m], nu);
  });

  DensityMatrixGrid g;
  g.y_nodes = y.values();
  g.dy = dy;
  g.values.resize(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    for (int j = 0; j < n; ++j) {
      const auto& row = table[static_cast<std::size_t>(static_cast<int>(i) - j + n - 1)];
      const double s = 0.5 * (g.y_nodes[i] + g.y_nodes[static_cast<std::size_t>(j)]);
      cplx acc = 0.0;
      for (std::size_t m = 0; m < mus.size(); ++m) acc += row[m] * std::polar(1.0, -mus[m] * s);
      g.values(static_cast<Eigen::Index>(i), j) = acc / (2.0 * std::numbers::pi);
    }
  });
  g.finalize();
  return g;
}

// Tr(rho^2) through the lattice double integral of phi.
inline double purity(const CharFnProvider& p, const ValidationConfig& cfg = {}) {
  return check_overlap(p, p, cfg.effective_lattice(p)).value;
}

// (1/2pi) iint phi2(1;mu,nu) phi1(-1;-mu,-nu) dmu dnu, exactly as written. For
// real tomograms phi1(-1;-mu,-nu) = phi1(1;mu,nu), so this is the unconjugated
// product of the two functions; it coincides with Tr(rho1 rho2) whenever one
// of the two functions is real (for instance an oscillator eigenstate).
inline double overlap_fidelity(const CharFnProvider& p1, const CharFnProvider& p2, const ValidationConfig& cfg = {}) {
  return detail::lattice_double_integral(cfg.effective_lattice(p1),
                                         [&](double mu, double nu) { return p2(1.0, mu, nu) * p1(-1.0, -mu, -nu); })
      .value;
}

// Test oracle psi(y) psi*(y') for catalog states.
inline DensityMatrixGrid pure_state_oracle(const StateModel& model, const UniformGrid& y) {
  y.check("y grid");
  DensityMatrixGrid g;
  g.y_nodes = y.values();
  g.dy = y.step();
  const auto n = static_cast<Eigen::Index>(g.y_nodes.size());
  Eigen::VectorXcd psi(n);
  for (Eigen::Index i = 0; i < n; ++i) psi(i) = wavefunction(model, g.y_nodes[static_cast<std::size_t>(i)]);
  g.values = psi * psi.adjoint();
  g.finalize();
  return g;
}

}  // namespace tomokit
