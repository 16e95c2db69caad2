#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "tomokit/estimation.hpp"
#include "tomokit/validator.hpp"

using namespace tomokit;

namespace {

const StateModel kHo0 = StateModel::ho(0);
const FrameParams kFrame{1.0, 0.0};

const SampleSet& big_ho0() {
  static const SampleSet s = sample_tomogram(kHo0, kFrame, 100000, 42);
  return s;
}

double sample_variance(const std::vector<double>& xs) {
  const auto [m, sd] = detail::mean_sd(xs);
  return sd * sd;
}

}  // namespace

TEST(Sampling, GroundStateMoments) {
  const auto& s = big_ho0();
  ASSERT_EQ(s.values.size(), 100000u);
  EXPECT_LE(std::abs(detail::mean_sd(s.values).first), 0.01);
  EXPECT_LE(std::abs(sample_variance(s.values) - 0.5), 0.02);
}

TEST(Sampling, CoherentMean) {
  const SampleSet s = sample_tomogram(StateModel::coherent(1.0), kFrame, 100000, 7);
  EXPECT_NEAR(detail::mean_sd(s.values).first, std::sqrt(2.0), 0.01);
}

TEST(Sampling, Deterministic) {
  const SampleSet a = sample_tomogram(StateModel::crystallized_cat(1.5), {0.3, 0.8}, 5000, 99);
  const SampleSet b = sample_tomogram(StateModel::crystallized_cat(1.5), {0.3, 0.8}, 5000, 99);
  EXPECT_EQ(a.values, b.values);
  const SampleSet c = sample_tomogram(StateModel::crystallized_cat(1.5), {0.3, 0.8}, 5000, 100);
  EXPECT_NE(a.values, c.values);
}

TEST(Sampling, RejectsBadInput) {
  EXPECT_THROW(sample_tomogram(kHo0, {0, 0}, 10, 1), DegenerateFrameError);
  EXPECT_THROW(sample_tomogram(kHo0, kFrame, 0, 1), DomainError);
}

TEST(Sampling, UniformIsTopFiftyThreeBits) {
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(uniform01(a), static_cast<double>(b() >> 11) / 9007199254740992.0);
}

TEST(Histogram, IntegratesToOneAndConverges) {
  const auto& s = big_ho0();
  const PdfHandle h = histogram_estimate(s);
  const double width = (h.hi - h.lo) / 64;
  double sum = 0.0;
  for (int i = 0; i < 64; ++i) sum += h.density(h.lo + (i + 0.5) * width) * width;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_NEAR(h.cdf(h.hi), 1.0, 1e-12);
  EXPECT_LE(distance(h, tomogram_pdf(kHo0, kFrame), Metric::L1), 0.05);
}

TEST(Histogram, ErrorShrinksWithSampleSize) {
  const PdfHandle exact = tomogram_pdf(kHo0, kFrame);
  const double big = distance(histogram_estimate(big_ho0()), exact, Metric::L1);
  int larger = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    if (distance(histogram_estimate(sample_tomogram(kHo0, kFrame, 100, seed)), exact, Metric::L1) > big) ++larger;
  EXPECT_EQ(larger, 20);
}

TEST(Histogram, Rejections) {
  SampleSet one;
  one.values = {1.0};
  EXPECT_THROW(histogram_estimate(one), DomainError);
  SampleSet flat;
  flat.values = {1.0, 1.0, 1.0};
  EXPECT_THROW(histogram_estimate(flat), DomainError);
  EstimatorConfig bad;
  bad.bins = 1;
  EXPECT_THROW(histogram_estimate(big_ho0(), bad), DomainError);
}

TEST(Kde, IntegratesToOneAndConverges) {
  const PdfHandle k = kde_estimate(big_ho0());
  EXPECT_NEAR(pdf_mass(k), 1.0, 1e-6);
  EXPECT_LE(distance(k, tomogram_pdf(kHo0, kFrame), Metric::L1), 0.03);
  EXPECT_NEAR(normal_reference_bandwidth(big_ho0()),
              1.06 * detail::mean_sd(big_ho0().values).second * std::pow(100000.0, -0.2), 1e-15);
}

TEST(Kde, ErrorShrinksWithSampleSize) {
  const PdfHandle exact = tomogram_pdf(kHo0, kFrame);
  const double big = distance(kde_estimate(big_ho0()), exact, Metric::L1);
  int larger = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    if (distance(kde_estimate(sample_tomogram(kHo0, kFrame, 100, seed)), exact, Metric::L1) > big) ++larger;
  EXPECT_EQ(larger, 20);
}

TEST(Kde, ZeroVarianceRejected) {
  SampleSet flat;
  flat.values = {2.0, 2.0, 2.0};
  EXPECT_THROW(kde_estimate(flat), DomainError);
}

TEST(Kde, Deterministic) {
  const PdfHandle a = kde_estimate(big_ho0()), b = kde_estimate(big_ho0());
  for (double x : {-1.0, 0.0, 0.7}) EXPECT_EQ(a.density(x), b.density(x));
}

TEST(EmpiricalCharFn, Examples) {
  const SampleSet s = sample_tomogram(kHo0, kFrame, 10000, 11);
  const auto p = empirical_charfn(s);
  EXPECT_EQ(p(0.0, kFrame), cplx(1.0));
  EXPECT_NEAR(std::abs(p(1.0, kFrame) - std::exp(-0.25)), 0.0, 0.02);
  EXPECT_THROW(p(1.0, 1.0, 0.5), FrameMismatchError);
}

TEST(Distance, KolmogorovSmirnov) {
  EXPECT_LE(distance(empirical_distribution(big_ho0()), tomogram_pdf(kHo0, kFrame), Metric::KS), 0.01);
}

TEST(Distance, SymmetricAndZeroOnSelf) {
  const PdfHandle a = kde_estimate(big_ho0()), b = tomogram_pdf(kHo0, kFrame), h = histogram_estimate(big_ho0());
  EXPECT_EQ(distance(a, a, Metric::L1), 0.0);
  EXPECT_EQ(distance(a, a, Metric::KS), 0.0);
  EXPECT_NEAR(distance(a, b, Metric::L1), distance(b, a, Metric::L1), 1e-15);
  EXPECT_NEAR(distance(h, b, Metric::KS), distance(b, h, Metric::KS), 1e-15);
  const PdfHandle e = empirical_distribution(big_ho0());
  EXPECT_EQ(distance(e, e, Metric::KS), 0.0);
  EXPECT_THROW(distance(e, b, Metric::L1), DomainError);
  EXPECT_EQ(parse_metric("ks"), Metric::KS);
  EXPECT_THROW(parse_metric("L2"), ParseError);
}

TEST(SampleFiles, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "tomokit_sample_test";
  std::filesystem::create_directories(dir);
  const auto csv = dir / "s.csv";
  const SampleSet s = sample_tomogram(StateModel::coherent({0.5, -1.0}), {0.25, 1.5}, 300, 1234567890123ull);
  write_sample_set(s, csv, Provenance{"test", "cfg"});
  const SampleSet r = read_sample_set(csv);
  EXPECT_EQ(r.values, s.values);
  EXPECT_EQ(r.frame.mu, s.frame.mu);
  EXPECT_EQ(r.frame.nu, s.frame.nu);
  EXPECT_EQ(r.model, s.model);
  EXPECT_EQ(r.seed, s.seed);
  std::filesystem::remove_all(dir);
}

TEST(EmpiricalFamily, PassesValidationAtEmpiricalTolerance) {
  for (const auto& m : {StateModel::ho(1), StateModel::coherent({1.0, 0.5}), StateModel::crystallized_cat(1.0)}) {
    const auto lattice = default_sample_lattice();
    const auto p = CharFnProvider::empirical_family(sample_family(m, lattice, 100000, 2024), lattice);
    const auto r = validate(p);
    EXPECT_TRUE(r.overall) << m.descriptor() << "\n" << r.to_json().dump(1);
    EXPECT_TRUE(r.trace_check.pass);
  }
}
