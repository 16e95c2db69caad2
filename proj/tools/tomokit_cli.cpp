#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tomokit/tomokit.hpp"

namespace {

using namespace tomokit;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct Options {
  std::string state;
  std::string charfn;
  std::string charfn2;
  std::optional<double> mu, nu, phi, squeeze;
  std::string x_grid;
  std::string grid;
  std::string tol;
  std::uint64_t seed = 42;
  std::size_t n_samples = 100000;
  int bins = 64;
  std::string bandwidth = "auto";
  std::string method = "both";
  std::string input;
  std::string out;
  std::string format;
  int fig = 1;
  std::string n_list;
  std::string a_list = "0,10,100,1000";
  double t = 1.0;
};

struct Output {
  std::string csv;
  json doc;
  bool has_csv = false;
};

FrameParams resolve_frame(const Options& o, FrameParams fallback = {1.0, 0.0}) {
  if (o.phi) {
    if (o.mu || o.nu) throw ParseError("give either --phi [--squeeze] or --mu/--nu, not both");
    return o.squeeze ? frame_from_squeeze(*o.squeeze, *o.phi) : optical_frame(*o.phi);
  }
  if (o.squeeze) throw ParseError("--squeeze needs --phi");
  return {o.mu.value_or(fallback.mu), o.nu.value_or(fallback.nu)};
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if constexpr (std::is_integral_v<T>)
      out.push_back(static_cast<T>(tomokit::detail::parse_integer(item, what)));
    else
      out.push_back(tomokit::detail::parse_double(item, what));
  }
  if (out.empty()) throw ParseError(std::string(what) + ": empty list");
  return out;
}

// "1e-6" sets every threshold; "trace=1e-6,hermiticity=1e-8,..." sets named ones.
Tolerances apply_tol(Tolerances t, const std::string& text) {
  if (text.empty()) return t;
  if (text.find('=') == std::string::npos) {
    const double v = tomokit::detail::parse_double(text, "--tol");
    return {v, v, v, v, v, t.boundary};
  }
  for (const auto& [k, v] : tomokit::detail::parse_key_values(text, "--tol")) {
    const double x = tomokit::detail::parse_double(v, "--tol");
    if (k == "trace") t.trace = x;
    else if (k == "hermiticity") t.hermiticity = x;
    else if (k == "purity") t.purity = x;
    else if (k == "diag") t.diag = x;
    else if (k == "diag_imag") t.diag_imag = x;
    else if (k == "boundary") t.boundary = x;
    else throw ParseError("--tol: unknown key '" + k + "'");
  }
  return t;
}

ValidationConfig validation_config(const Options& o) {
  ValidationConfig cfg;
  if (!o.grid.empty()) {
    const auto g = UniformGrid::parse(o.grid);
    cfg.lattice = {g, g};
    cfg.prefer_provider_lattice = false;
  }
  if (!o.x_grid.empty()) cfg.y = UniformGrid::parse(o.x_grid);
  return cfg;
}

std::string require(const std::string& v, const char* flag) {
  if (v.empty()) throw ParseError(std::string(flag) + " is required");
  return v;
}

Output cmd_tomogram(const Options& o, const Provenance& prov) {
  const StateModel m = StateModel::parse(require(o.state, "--state"));
  const FrameParams f = resolve_frame(o);
  const UniformGrid g = o.x_grid.empty() ? UniformGrid{-6.0, 6.0, 241} : UniformGrid::parse(o.x_grid);
  const auto rows = tomogram_grid(m, g.values(), f);
  return {tomogram_csv(rows, prov), tomogram_json(rows, prov), true};
}

Output cmd_charfun(const Options& o, const Provenance& prov) {
  const CharFnProvider p = parse_provider(require(o.charfn, "--charfn"));
  std::vector<FrameParams> frames;
  if (!o.grid.empty()) {
    const auto g = UniformGrid::parse(o.grid);
    for (double mu : g.values())
      for (double nu : g.values()) frames.push_back({mu, nu});
  } else {
    frames.push_back(resolve_frame(o));
  }
  std::vector<cplx> vals(frames.size());
  parallel_for(frames.size(), [&](std::size_t i) { vals[i] = p(o.t, frames[i]); });
  Output out;
  out.has_csv = true;
  out.csv = prov.csv_comment() + "t,mu,nu,re,im\n";
  json rec = json::array();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    out.csv += format_double(o.t) + "," + format_double(frames[i].mu) + "," + format_double(frames[i].nu) + "," +
               format_double(vals[i].real()) + "," + format_double(vals[i].imag()) + "\n";
    rec.push_back({{"t", o.t}, {"mu", frames[i].mu}, {"nu", frames[i].nu}, {"value", {vals[i].real(), vals[i].imag()}}});
  }
  out.doc = {{"provenance", prov.to_json()}, {"provider", p.name()}, {"records", rec}};
  return out;
}

Output cmd_validate(const Options& o, const Provenance& prov, int& exit_code) {
  const CharFnProvider p = parse_provider(require(o.charfn, "--charfn"));
  ValidationConfig cfg = validation_config(o);
  if (!o.tol.empty()) cfg.tolerances = apply_tol(default_tolerances(p), o.tol);
  const ValidationReport r = validate(p, cfg);
  exit_code = r.overall ? 0 : kExitFail;
  json doc = r.to_json();
  doc["provenance"] = prov.to_json();
  return {{}, doc, false};
}

Output cmd_purity(const Options& o, const Provenance& prov) {
  const CharFnProvider p = parse_provider(require(o.charfn, "--charfn"));
  const ValidationConfig cfg = validation_config(o);
  const OverlapCheck r = check_overlap(p, p, cfg.effective_lattice(p));
  return {{}, {{"provenance", prov.to_json()}, {"provider", p.name()}, {"purity", r.value}, {"imag", r.imag}, {"boundary_max", r.boundary_max}}, false};
}

Output cmd_overlap(const Options& o, const Provenance& prov) {
  const CharFnProvider p1 = parse_provider(require(o.charfn, "--charfn"));
  const CharFnProvider p2 = parse_provider(require(o.charfn2, "--charfn2"));
  const ValidationConfig cfg = validation_config(o);
  const OverlapCheck r = check_overlap(p1, p2, cfg.effective_lattice(p1));
  return {{},
          {{"provenance", prov.to_json()},
           {"provider1", p1.name()},
           {"provider2", p2.name()},
           {"overlap", r.value},
           {"overlap_fidelity", overlap_fidelity(p1, p2, cfg)},
           {"boundary_max", r.boundary_max}},
          false};
}

Output cmd_reconstruct(const Options& o, const Provenance& prov) {
  const CharFnProvider p = parse_provider(require(o.charfn, "--charfn"));
  const ValidationConfig cfg = validation_config(o);
  const DensityMatrixGrid g = density_matrix_grid(p, cfg.y, cfg);
  json doc = g.to_json(prov);
  doc["provider"] = p.name();
  return {g.abs_csv(prov), doc, true};
}

Output cmd_sample(const Options& o, const Provenance& prov) {
  const StateModel m = StateModel::parse(require(o.state, "--state"));
  const SampleSet s = sample_tomogram(m, resolve_frame(o), o.n_samples, o.seed);
  if (o.out.empty()) throw ParseError("sample: --out is required (a CSV plus a .json sidecar are written)");
  write_sample_set(s, o.out, prov);
  return {{}, {}, false};
}

Output cmd_estimate(const Options& o, const Provenance& prov) {
  const SampleSet s = read_sample_set(require(o.input, "--in"));
  EstimatorConfig ec;
  ec.bins = o.bins;
  if (o.bandwidth != "auto") ec.bandwidth = tomokit::detail::parse_double(o.bandwidth, "--bandwidth");
  const bool want_hist = o.method == "hist" || o.method == "both";
  const bool want_kde = o.method == "kde" || o.method == "both";
  if (!want_hist && !want_kde) throw ParseError("--method must be hist, kde or both");
  std::optional<PdfHandle> hist, kde, exact;
  if (want_hist) hist = histogram_estimate(s, ec);
  if (want_kde) kde = kde_estimate(s, ec);
  std::optional<StateModel> model;
  try {
    model = StateModel::parse(s.model);
  } catch (const ParseError&) {
  }
  if (model && !s.frame.degenerate()) exact = tomogram_pdf(*model, s.frame);
  const PdfHandle emp = empirical_distribution(s);

  UniformGrid g = o.x_grid.empty() ? UniformGrid{emp.lo, emp.hi, 401} : UniformGrid::parse(o.x_grid);
  Output out;
  out.has_csv = true;
  out.csv = prov.csv_comment() + "X" + (hist ? ",histogram" : "") + (kde ? ",kde" : "") + (exact ? ",analytic" : "") + "\n";
  for (double x : g.values()) {
    out.csv += format_double(x);
    if (hist) out.csv += "," + format_double(hist->density(x));
    if (kde) out.csv += "," + format_double(kde->density(x));
    if (exact) out.csv += "," + format_double(exact->density(x));
    out.csv += "\n";
  }
  json d = json::object();
  if (exact) {
    d["ks_empirical"] = distance(emp, *exact, Metric::KS);
    if (hist) d["l1_histogram"] = distance(*hist, *exact, Metric::L1);
    if (kde) d["l1_kde"] = distance(*kde, *exact, Metric::L1);
  }
  const cplx phi = empirical_charfn(s)(1.0, s.frame);
  out.doc = {{"provenance", prov.to_json()},
             {"model", s.model},
             {"frame", {{"mu", s.frame.mu}, {"nu", s.frame.nu}}},
             {"n", s.values.size()},
             {"bins", ec.bins},
             {"bandwidth", kde ? json(ec.bandwidth.value_or(normal_reference_bandwidth(s))) : json(nullptr)},
             {"empirical_charfn_t1", {phi.real(), phi.imag()}},
             {"distances", d}};
  return out;
}

Output cmd_figures(const Options& o, const Provenance& prov) {
  const auto ns = parse_list<int>(o.n_list.empty() ? (o.fig == 1 ? "0,1,2,10" : "0,1") : o.n_list, "--n");
  const auto as = parse_list<double>(o.a_list, "--a");
  const FrameParams f = resolve_frame(o, default_figure_frame());
  std::optional<UniformGrid> g;
  if (!o.x_grid.empty()) g = UniformGrid::parse(o.x_grid);
  const auto curves = figure_curves(figure_models(o.fig, ns, as), f, g);
  return {figure_csv(curves, f, prov), figure_json(curves, f, prov), true};
}

std::string canonical_config(const std::string& sub, const Options& o) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("-"); };
  std::ostringstream ss;
  ss << "sub=" << sub << ";state=" << o.state << ";charfn=" << o.charfn << ";charfn2=" << o.charfn2 << ";mu=" << opt(o.mu)
     << ";nu=" << opt(o.nu) << ";phi=" << opt(o.phi) << ";squeeze=" << opt(o.squeeze) << ";x=" << o.x_grid << ";grid=" << o.grid
     << ";tol=" << o.tol << ";seed=" << o.seed << ";n=" << o.n_samples << ";bins=" << o.bins << ";bw=" << o.bandwidth
     << ";method=" << o.method << ";in=" << o.input << ";fig=" << o.fig << ";ns=" << o.n_list << ";as=" << o.a_list
     << ";t=" << format_double(o.t);
  return ss.str();
}

void emit(const Output& out, const Options& o) {
  std::string fmt = o.format;
  if (fmt.empty()) {
    const bool json_ext = std::filesystem::path(o.out).extension() == ".json";
    fmt = (!out.has_csv || json_ext) ? "json" : "csv";
  }
  if (fmt == "csv" && !out.has_csv) throw ParseError("this subcommand only produces JSON");
  const std::string body = fmt == "csv" ? out.csv : out.doc.dump(2) + "\n";
  if (o.out.empty())
    std::cout << body;
  else
    atomic_write(o.out, body);
}

void numeric_failure(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tomokit: tomograms, characteristic functions and the quantum-pdf gate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tomokit::kVersion));
  Options o;

  auto frame_flags = [&](CLI::App* c) {
    c->add_option("--mu", o.mu, "frame mu");
    c->add_option("--nu", o.nu, "frame nu");
    c->add_option("--phi", o.phi, "optical angle (mu = s cos phi, nu = sin phi / s)");
    c->add_option("--squeeze", o.squeeze, "squeeze s > 0 used with --phi");
  };
  auto io_flags = [&](CLI::App* c) {
    c->add_option("--out", o.out, "output path (stdout if omitted)");
    c->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto lattice_flags = [&](CLI::App* c) {
    c->add_option("--grid", o.grid, "mu and nu lattice min:max:count");
    c->add_option("--x", o.x_grid, "y grid min:max:count");
  };

  auto* tomo = app.add_subcommand("tomogram", "tabulate W(X|mu,nu)");
  tomo->add_option("--state", o.state, "state descriptor")->required();
  tomo->add_option("--x", o.x_grid, "X grid min:max:count");
  frame_flags(tomo);
  io_flags(tomo);

  auto* cf = app.add_subcommand("charfun", "characteristic function at one frame or over --grid");
  cf->add_option("--charfn", o.charfn, "provider descriptor")->required();
  cf->add_option("--t", o.t, "argument t");
  cf->add_option("--grid", o.grid, "square lattice min:max:count for mu and nu");
  frame_flags(cf);
  io_flags(cf);

  auto* val = app.add_subcommand("validate", "run the quantum-pdf gate; exit 0 iff every condition passes");
  val->add_option("--charfn", o.charfn, "provider descriptor")->required();
  val->add_option("--tol", o.tol, "threshold override: a number or key=value list");
  lattice_flags(val);
  io_flags(val);

  auto* pur = app.add_subcommand("purity", "Tr rho^2 from the characteristic function");
  pur->add_option("--charfn", o.charfn, "provider descriptor")->required();
  lattice_flags(pur);
  io_flags(pur);

  auto* ov = app.add_subcommand("overlap", "Tr rho1 rho2 and the literal overlap fidelity");
  ov->add_option("--charfn", o.charfn, "first provider")->required();
  ov->add_option("--charfn2", o.charfn2, "second provider")->required();
  lattice_flags(ov);
  io_flags(ov);

  auto* rec = app.add_subcommand("reconstruct", "density matrix rho(y, y') on the --x grid");
  rec->add_option("--charfn", o.charfn, "provider descriptor")->required();
  lattice_flags(rec);
  io_flags(rec);

  auto* smp = app.add_subcommand("sample", "draw X at one frame (CSV + JSON sidecar)");
  smp->add_option("--state", o.state, "state descriptor")->required();
  smp->add_option("--seed", o.seed, "mt19937_64 seed");
  smp->add_option("--n-samples", o.n_samples, "number of draws")->check(CLI::PositiveNumber);
  frame_flags(smp);
  smp->add_option("--out", o.out, "CSV path")->required();

  auto* est = app.add_subcommand("estimate", "histogram / kernel estimates from a sample file");
  est->add_option("--in", o.input, "sample CSV written by `sample`")->required();
  est->add_option("--bins", o.bins, "histogram bins")->check(CLI::Range(2, 1 << 24));
  est->add_option("--bandwidth", o.bandwidth, "kernel bandwidth or auto");
  est->add_option("--method", o.method, "hist, kde or both");
  est->add_option("--x", o.x_grid, "evaluation grid min:max:count");
  io_flags(est);

  auto* figs = app.add_subcommand("figures", "data for the PHO figures");
  figs->add_option("--fig", o.fig, "1 (half oscillator levels) or 2 (HO vs PHO over a)")->check(CLI::IsMember({1, 2}));
  figs->add_option("--n", o.n_list, "comma-separated levels");
  figs->add_option("--a", o.a_list, "comma-separated a values (fig 2)");
  figs->add_option("--x", o.x_grid, "X grid min:max:count (default: union of supports, 2001 nodes)");
  frame_flags(figs);
  io_flags(figs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  std::string cmdline;
  for (int i = 0; i < argc; ++i) cmdline += (i ? " " : "") + std::string(argv[i]);
  const std::string sub = app.get_subcommands().front()->get_name();
  const Provenance prov{cmdline, canonical_config(sub, o)};

  try {
    int code = 0;
    Output out;
    if (sub == "tomogram") out = cmd_tomogram(o, prov);
    else if (sub == "charfun") out = cmd_charfun(o, prov);
    else if (sub == "validate") out = cmd_validate(o, prov, code);
    else if (sub == "purity") out = cmd_purity(o, prov);
    else if (sub == "overlap") out = cmd_overlap(o, prov);
    else if (sub == "reconstruct") out = cmd_reconstruct(o, prov);
    else if (sub == "sample") return (cmd_sample(o, prov), 0);
    else if (sub == "estimate") out = cmd_estimate(o, prov);
    else if (sub == "figures") out = cmd_figures(o, prov);
    emit(out, o);
    return code;
  } catch (const ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    numeric_failure(e.kind(), e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    numeric_failure("internal", e.what());
    return kExitNumeric;
  }
}
