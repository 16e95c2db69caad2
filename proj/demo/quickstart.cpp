// Tomogram of a cat state, its characteristic function through the gate, a
// density-matrix round trip and a small sampling experiment.
#include <cstdio>

#include "tomokit/tomokit.hpp"

int main() {
  using namespace tomokit;

  const StateModel cat = StateModel::crystallized_cat({1.5, 0.0});
  const FrameParams f = optical_frame(0.3);
  std::printf("W(0.5 | phi=0.3) = %.10f (quadrature %.10f)\n", tomogram_analytic(cat, 0.5, f), tomogram_numeric(cat, 0.5, f));
  std::printf("mass at that frame = %.12f\n", tomogram_mass(cat, f));

  const CharFnProvider phi = CharFnProvider::analytic(cat);
  const ValidationReport r = validate(phi);
  std::printf("gate: overall=%s purity=%.6f diag_min=%.2e\n", r.overall ? "pass" : "fail", r.purity.value, r.diag_min());

  const auto exp_report = validate(CharFnProvider::expfamily(expfamily::exponential(1.0)));
  std::printf("exponential(1): trace witness = (%.3f, %.3f), overall=%s\n", exp_report.trace_check.value.real(),
              exp_report.trace_check.value.imag(), exp_report.overall ? "pass" : "fail");

  const UniformGrid y{-4.0, 4.0, 81};
  const auto rho = density_matrix_grid(phi, y);
  std::printf("rho: trace=%.6f  largest eigenvalue=%.6f  sup|rho - psi psi*|=%.2e\n", rho.trace, rho.eigenvalues.front(),
              rho.sup_distance(pure_state_oracle(cat, y)));

  const SampleSet s = sample_tomogram(StateModel::ho(0), {1.0, 0.0}, 20000, 7);
  const PdfHandle exact = tomogram_pdf(StateModel::ho(0), {1.0, 0.0});
  std::printf("HO(0), n=20000: KS=%.4f  L1(kde)=%.4f  phi_hat(1)=%.4f (exact %.4f)\n",
              distance(empirical_distribution(s), exact, Metric::KS), distance(kde_estimate(s), exact, Metric::L1),
              empirical_charfn(s)(1.0, s.frame).real(), std::exp(-0.25));
}
