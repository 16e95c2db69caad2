#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tomokit/charfun.hpp"
#include "tomokit/errors.hpp"
#include "tomokit/grid.hpp"
#include "tomokit/io.hpp"
#include "tomokit/parallel.hpp"
#include "tomokit/pdf.hpp"
#include "tomokit/sample_set.hpp"
#include "tomokit/state_catalog.hpp"
#include "tomokit/tomogram.hpp"

namespace tomokit {

// Uniform on [0, 1) from the top 53 bits of one mt19937_64 output. Spelled out
// (rather than std::uniform_real_distribution) so the stream is identical on
// every standard library.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// SplitMix64 finalizer; derives independent per-frame seeds from one seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// n draws by inverse transform on a 4096-node CDF table over the tomogram support.
inline SampleSet sample_tomogram(const StateModel& model, const FrameParams& frame, std::size_t n, std::uint64_t seed,
                                 const QuadratureConfig& cfg = {}) {
  detail::require_frame(frame);
  if (n == 0) throw DomainError("sample_tomogram: need at least one sample");
  const Interval sup = tomogram_support(model, frame, cfg);
  const CdfTable table([&](double X) { return tomogram(model, X, frame, cfg); }, sup.lo, sup.hi, kCdfNodes);
  std::mt19937_64 rng(seed);
  SampleSet s;
  s.frame = frame;
  s.model = model.descriptor();
  s.seed = seed;
  s.values.resize(n);
  for (auto& v : s.values) v = table.inverse(uniform01(rng));
  return s;
}

// One SampleSet per frame of the lattice (row-major: mu index, then nu index),
// frame i seeded with splitmix64(seed + i). The degenerate frame (0, 0) holds
// the point mass at X = 0.
inline std::vector<SampleSet> sample_family(const StateModel& model, const FrameLattice& lattice, std::size_t n,
                                            std::uint64_t seed, const QuadratureConfig& cfg = {}) {
  lattice.mu.check("mu lattice");
  lattice.nu.check("nu lattice");
  const auto nn = static_cast<std::size_t>(lattice.nu.nodes);
  std::vector<SampleSet> sets(static_cast<std::size_t>(lattice.mu.nodes) * nn);
  parallel_for(sets.size(), [&](std::size_t i) {
    const FrameParams f{lattice.mu.at(static_cast<int>(i / nn)), lattice.nu.at(static_cast<int>(i % nn))};
    const std::uint64_t s = splitmix64(seed + i);
    if (f.degenerate()) {
      sets[i] = SampleSet{std::vector<double>(n, 0.0), f, model.descriptor(), s};
    } else {
      sets[i] = sample_tomogram(model, f, n, s, cfg);
    }
  });
  return sets;
}

inline FrameLattice default_sample_lattice() { return {{-6.0, 6.0, 25}, {-6.0, 6.0, 25}}; }

struct EstimatorConfig {
  int bins = 64;
  std::optional<double> bandwidth;  // nullopt: normal-reference rule
  std::optional<Interval> range;    // nullopt: sample range (histogram) or sample range padded by 8h (kde)

  void check() const {
    if (bins < 2) throw DomainError("estimator: bins must be >= 2");
    if (bandwidth && !(*bandwidth > 0.0 && std::isfinite(*bandwidth))) throw DomainError("estimator: bandwidth must be positive");
    if (range && !(range->hi > range->lo)) throw DomainError("estimator: empty range");
  }
};

namespace detail {

inline std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= static_cast<double>(xs.size() - 1);
  return {m, std::sqrt(v)};
}

inline void require_samples(const SampleSet& s, const char* who) {
  s.check();
  if (s.values.size() < 2) throw DomainError(std::string(who) + ": need at least two samples");
}

}  // namespace detail

// Bin counts / (n * width); samples outside cfg.range are dropped before
// normalizing, so the estimate integrates to one over the range.
inline PdfHandle histogram_estimate(const SampleSet& s, const EstimatorConfig& cfg = {}) {
  cfg.check();
  detail::require_samples(s, "histogram_estimate");
  const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
  const double lo = cfg.range ? cfg.range->lo : *mn, hi = cfg.range ? cfg.range->hi : *mx;
  if (!(hi > lo)) throw DomainError("histogram_estimate: samples span an empty range");
  const double width = (hi - lo) / cfg.bins;
  std::vector<double> counts(static_cast<std::size_t>(cfg.bins), 0.0);
  double kept = 0.0;
  for (double x : s.values) {
    if (x < lo || x > hi) continue;
    const auto b = std::min(static_cast<std::size_t>((x - lo) / width), counts.size() - 1);
    counts[b] += 1.0;
    kept += 1.0;
  }
  if (kept == 0.0) throw DomainError("histogram_estimate: no samples inside the range");
  auto dens = std::make_shared<std::vector<double>>(counts.size());
  auto cum = std::make_shared<std::vector<double>>(counts.size() + 1, 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    (*dens)[i] = counts[i] / (kept * width);
    (*cum)[i + 1] = (*cum)[i] + counts[i] / kept;
  }
  PdfHandle p;
  p.name = "histogram(" + s.model + ")";
  p.lo = lo;
  p.hi = hi;
  p.density = [dens, lo, hi, width](double x) {
    if (x < lo || x > hi) return 0.0;
    return (*dens)[std::min(static_cast<std::size_t>((x - lo) / width), dens->size() - 1)];
  };
  p.cdf = [dens, cum, lo, hi, width](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const auto i = std::min(static_cast<std::size_t>((x - lo) / width), dens->size() - 1);
    return (*cum)[i] + (*dens)[i] * (x - lo - static_cast<double>(i) * width);
  };
  return p;
}

inline double normal_reference_bandwidth(const SampleSet& s) {
  detail::require_samples(s, "bandwidth");
  const double sd = detail::mean_sd(s.values).second;
  if (!(sd > 0.0)) throw DomainError("kde_estimate: samples have zero variance");
  return 1.06 * sd * std::pow(static_cast<double>(s.values.size()), -0.2);
}

// Gaussian kernel estimate. Samples are first spread onto a fine grid by
// linear binning (spacing h/16), which keeps evaluation cost independent of
// n while moving each kernel center by at most h/32.
inline PdfHandle kde_estimate(const SampleSet& s, const EstimatorConfig& cfg = {}) {
  cfg.check();
  detail::require_samples(s, "kde_estimate");
  const double h = cfg.bandwidth ? *cfg.bandwidth : normal_reference_bandwidth(s);
  const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
  const double g_lo = *mn - h, g_hi = *mx + h;
  const double dx = h / 16.0;
  const auto m = static_cast<std::size_t>(std::ceil((g_hi - g_lo) / dx)) + 2;
  auto w = std::make_shared<std::vector<double>>(m, 0.0);
  const double inv_n = 1.0 / static_cast<double>(s.values.size());
  for (double x : s.values) {
    const double r = (x - g_lo) / dx;
    const auto i = static_cast<std::size_t>(r);
    const double f = r - static_cast<double>(i);
    (*w)[i] += (1.0 - f) * inv_n;
    (*w)[i + 1] += f * inv_n;
  }
  PdfHandle p;
  p.name = "kde(" + s.model + ")";
  p.lo = cfg.range ? cfg.range->lo : g_lo - 8.0 * h;
  p.hi = cfg.range ? cfg.range->hi : g_hi + 8.0 * h;
  const double reach = 9.0 * h;
  p.density = [w, g_lo, dx, h, reach](double x) {
    const double r = (x - g_lo) / dx;
    const auto a = static_cast<std::ptrdiff_t>(std::floor(r - reach / dx));
    const auto b = static_cast<std::ptrdiff_t>(std::ceil(r + reach / dx));
    const auto lo_i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(a, 0));
    const auto hi_i = std::min(static_cast<std::size_t>(std::max<std::ptrdiff_t>(b, 0)), w->size() - 1);
    double acc = 0.0;
    for (std::size_t i = lo_i; i <= hi_i; ++i) {
      if ((*w)[i] == 0.0) continue;
      const double z = (x - (g_lo + static_cast<double>(i) * dx)) / h;
      acc += (*w)[i] * std::exp(-0.5 * z * z);
    }
    return acc / (h * std::sqrt(2.0 * std::numbers::pi));
  };
  p.cdf = [w, g_lo, dx, h](double x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w->size(); ++i)
      if ((*w)[i] != 0.0) acc += (*w)[i] * 0.5 * std::erfc(-(x - (g_lo + static_cast<double>(i) * dx)) / (h * std::numbers::sqrt2));
    return acc;
  };
  return p;
}

// The empirical measure: equal atoms at the samples, step CDF, no density.
inline PdfHandle empirical_distribution(const SampleSet& s) {
  s.check();
  auto sorted = std::make_shared<std::vector<double>>(s.values);
  std::sort(sorted->begin(), sorted->end());
  PdfHandle p;
  p.name = "empirical(" + s.model + ")";
  p.lo = sorted->front();
  p.hi = sorted->back();
  p.has_density = false;
  p.density = [](double) { return 0.0; };
  p.cdf = [sorted](double x) {
    return static_cast<double>(std::upper_bound(sorted->begin(), sorted->end(), x) - sorted->begin()) /
           static_cast<double>(sorted->size());
  };
  p.atoms = sorted;
  return p;
}

inline CharFnProvider empirical_charfn(const SampleSet& s) { return CharFnProvider::empirical(s); }

enum class Metric { L1, KS };

inline constexpr int kDistanceNodes = 20001;

// L1 = int |p - q| and KS = sup |P - Q|, both on one shared grid over the union
// of the two bulks. When a side is an empirical measure KS is taken exactly
// over its atoms (both one-sided limits); L1 needs two densities.
inline double distance(const PdfHandle& p, const PdfHandle& q, Metric metric) {
  if (metric == Metric::KS) {
    auto atom_ks = [](const PdfHandle& e, const PdfHandle& other) {
      const auto& xs = *e.atoms;
      const double n = static_cast<double>(xs.size());
      double d = 0.0;
      for (std::size_t i = 0; i < xs.size();) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        const double g = other.cdf(xs[i]);
        const double g_left = other.atoms ? other.cdf(std::nextafter(xs[i], -std::numeric_limits<double>::infinity())) : g;
        d = std::max({d, std::abs(static_cast<double>(j) / n - g), std::abs(static_cast<double>(i) / n - g_left)});
        i = j;
      }
      return d;
    };
    if (p.atoms && q.atoms) return std::max(atom_ks(p, q), atom_ks(q, p));
    if (p.atoms) return atom_ks(p, q);
    if (q.atoms) return atom_ks(q, p);
  } else if (!p.has_density || !q.has_density) {
    throw DomainError("distance: L1 needs two densities; use KS for empirical measures");
  }
  const double lo = std::min(p.lo, q.lo), hi = std::max(p.hi, q.hi);
  if (!(hi > lo)) return 0.0;
  const UniformGrid g{lo, hi, kDistanceNodes};
  const auto xs = g.values();
  std::vector<double> diff(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    diff[i] = metric == Metric::KS ? std::abs(p.cdf(xs[i]) - q.cdf(xs[i])) : std::abs(p.density(xs[i]) - q.density(xs[i]));
  });
  if (metric == Metric::KS) return *std::max_element(diff.begin(), diff.end());
  const auto w = trapezoid_weights(g);
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) acc += w[i] * diff[i];
  return acc;
}

inline Metric parse_metric(std::string_view s) {
  if (s == "L1" || s == "l1") return Metric::L1;
  if (s == "KS" || s == "ks") return Metric::KS;
  throw ParseError("metric must be L1 or KS, got '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// SampleSet files: CSV with one X column, plus a JSON sidecar <csv>.json.

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) { return csv.string() + ".json"; }

inline void write_sample_set(const SampleSet& s, const std::filesystem::path& csv, const Provenance& prov) {
  s.check();
  std::string body = prov.csv_comment() + "X\n";
  for (double v : s.values) body += format_double(v) + "\n";
  const json meta = {{"provenance", prov.to_json()},
                     {"frame", {{"mu", s.frame.mu}, {"nu", s.frame.nu}}},
                     {"model", s.model},
                     {"seed", s.seed},
                     {"n", s.values.size()}};
  atomic_write(csv, body);
  atomic_write(sidecar_path(csv), meta.dump(2) + "\n");
}

inline SampleSet read_sample_set(const std::filesystem::path& csv) {
  SampleSet s;
  std::istringstream in(read_file(csv));
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "X") throw ParseError("sample CSV '" + csv.string() + "': expected header 'X'");
      header = true;
      continue;
    }
    s.values.push_back(detail::parse_double(line, "sample value"));
  }
  try {
    const json meta = json::parse(read_file(sidecar_path(csv)));
    s.frame = {meta.at("frame").at("mu").get<double>(), meta.at("frame").at("nu").get<double>()};
    s.model = meta.at("model").get<std::string>();
    s.seed = meta.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError("sample sidecar for '" + csv.string() + "': " + e.what());
  }
  s.check();
  return s;
}

}  // namespace tomokit
