// htlab: batch front end for the library. Every run writes its results plus
// <prefix>.manifest.json into the output directory; wall-clock data lives only
// under the manifest's "timing" key so all other bytes are reproducible.

#include <fftw3.h>
#include <gsl/gsl_version.h>

#include <Eigen/Core>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "htlab/acceptance.hpp"
#include "htlab/counterexample.hpp"
#include "htlab/errors.hpp"
#include "htlab/estimates.hpp"
#include "htlab/io.hpp"
#include "htlab/kernel.hpp"
#include "htlab/parallel.hpp"
#include "htlab/twisted.hpp"

#ifndef HTLAB_VERSION
#define HTLAB_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace htlab;

namespace {

/// Exit codes.
constexpr int kExitOk = 0, kExitFailed = 1, kExitConfig = 2, kExitAccuracy = 3, kExitError = 4;

struct Common {
  std::string out;
  std::string prefix;
  int threads = 0;
  std::uint64_t seed = 0;
  bool gnuplot = false;
};

struct Range {
  int lo = 0, hi = 0;
};

Range parse_range(const std::string& s, const char* flag) {
  Range r;
  const auto dots = s.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      r.lo = r.hi = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } else {
      r.lo = std::stoi(s.substr(0, dots), &used);
      if (used != dots) throw std::invalid_argument(s);
      const std::string tail = s.substr(dots + 2);
      r.hi = std::stoi(tail, &used);
      if (used != tail.size()) throw std::invalid_argument(s);
    }
  } catch (const std::logic_error&) {
    throw DomainError(std::string(flag) + ": expected <int> or <int>..<int>, got '" + s + "'");
  }
  if (r.hi < r.lo) throw DomainError(std::string(flag) + ": empty range '" + s + "'");
  return r;
}

MultiIndex parse_multi_index(const std::string& s, int n) {
  MultiIndex nu;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      nu.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw DomainError("--nu: expected comma-separated integers, got '" + s + "'");
    }
  }
  if (nu.size() == 1 && nu[0] == 0) nu.assign(static_cast<std::size_t>(n), 0);
  if (static_cast<int>(nu.size()) != n) throw DomainError("--nu must have n = " + std::to_string(n) + " entries");
  return nu;
}

std::string multi_index_str(const MultiIndex& nu) {
  std::string s;
  for (std::size_t i = 0; i < nu.size(); ++i) s += (i ? "," : "") + std::to_string(nu[i]);
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

json load_json_arg(const std::string& s) {
  if (!s.empty() && s.front() == '{') {
    try {
      return json::parse(s);
    } catch (const json::exception& e) {
      throw FormatError(std::string("inline JSON: ") + e.what());
    }
  }
  return read_json_file(s);
}

MultiplierSpec load_multiplier(const std::string& s) {
  try {
    return MultiplierSpec::from_json(load_json_arg(s));
  } catch (const json::exception& e) {
    throw FormatError(std::string("multiplier: ") + e.what());
  }
}

/// Grid over g1 x g2: closed symmetric [-T, T] axes on g1 and periodic [-P/2, P/2) axes on g2.
Grid product_grid(const HTypeGroup& G, int N, double T, int Nu, double P) {
  if (N < 3 || N % 2 == 0 || T <= 0 || Nu < 2 || P <= 0)
    throw DomainError("grid needs odd N >= 3, T > 0, Nu >= 2, P > 0");
  std::vector<Axis> axes;
  for (int i = 0; i < G.d1(); ++i) axes.push_back(Axis{-T, T, static_cast<std::size_t>(N), false});
  for (int i = 0; i < G.d2(); ++i) axes.push_back(Axis{-P / 2, P / 2, static_cast<std::size_t>(Nu), true});
  return Grid(axes, G.d1());
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json versions() {
  return {{"htlab", HTLAB_VERSION},
          {"gsl", GSL_VERSION},
          {"fftw", std::string(fftw_version)},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

/// Collects artifacts and writes the manifest when the run ends, successful or not.
class Run {
 public:
  Run(std::string subcommand, const Common& c, std::vector<std::string> argv)
      : sub_(std::move(subcommand)), common_(c), argv_(std::move(argv)), t0_(std::chrono::steady_clock::now()) {
    started_ = utc_now();
    fs::create_directories(c.out);
  }

  json config = json::object();

  std::string path(const std::string& ext) const { return (fs::path(common_.out) / (common_.prefix + ext)).string(); }

  void write(const std::string& ext, const std::string& kind, const std::string& text) {
    const std::string p = path(ext);
    write_text_file(p, text);
    artifacts_.push_back({{"path", fs::path(p).filename().string()}, {"kind", kind}});
  }
  void note(const std::string& file, const std::string& kind) {
    artifacts_.push_back({{"path", fs::path(file).filename().string()}, {"kind", kind}});
  }
  void scan(const ScanReport& r) {
    write(".json", "scan-json", dump_json(r.to_json()));
    write(".csv", "scan-csv", r.to_csv());
    if (common_.gnuplot) write(".dat", "gnuplot", r.to_gnuplot());
  }

  void finish(const std::string& status, const json& error = nullptr) {
    json m;
    m["tool"] = "htlab";
    m["subcommand"] = sub_;
    m["argv"] = argv_;
    m["versions"] = versions();
    m["seed"] = common_.seed;
    m["threads"] = common_.threads;
    m["config"] = config;
    m["artifacts"] = artifacts_;
    m["status"] = status;
    m["partial"] = status != "ok" && !artifacts_.empty();
    if (!error.is_null()) m["error"] = error;
    m["timing"] = {{"started_utc", started_},
                   {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count()}};
    write_text_file(path(".manifest.json"), dump_json(m));
  }

 private:
  std::string sub_;
  Common common_;
  std::vector<std::string> argv_;
  std::chrono::steady_clock::time_point t0_;
  std::string started_;
  json artifacts_ = json::array();
};

json structured_error(const std::string& type, const std::string& message, const std::string& sub) {
  return {{"type", type}, {"message", message}, {"subcommand", sub}};
}

void report_error(const json& e) { std::cerr << json{{"error", e}}.dump() << "\n"; }

// ------------------------------------------------------------------ subcommands

struct GroupCheckArgs {
  std::string group = "heisenberg-1";
  int cases = 1000;
};

int group_check(Run& run, const GroupCheckArgs& a, std::uint64_t seed) {
  const HTypeGroup G = HTypeGroup::load(a.group);
  if (a.cases < 1) throw DomainError("--cases must be positive");
  run.config = {{"group", G.to_json()}, {"cases", a.cases}};
  const ValidationReport v = validate_htype(G.J());
  const GroupPropertyReport p = group_property_suite(G, a.cases, seed);
  const bool pass = v.pass && p.pass;
  const json out = {{"group", G.name()},
                    {"n", G.n()},
                    {"d2", G.d2()},
                    {"validation", {{"pass", v.pass}, {"residual", v.residual}, {"message", v.message}}},
                    {"properties",
                     {{"cases", p.cases},
                      {"associativity", p.associativity},
                      {"inverse", p.inverse},
                      {"homogeneity", p.homogeneity},
                      {"automorphism", p.automorphism},
                      {"left_invariance", p.left_invariance},
                      {"quasi_triangle", p.quasi_triangle},
                      {"volume_ratio", p.volume_ratio},
                      {"pass", p.pass}}},
                    {"pass", pass}};
  run.write(".json", "group-check", dump_json(out));
  std::cout << (pass ? "pass" : "fail") << "\n";
  return pass ? kExitOk : kExitFailed;
}

struct KernelArgs {
  std::string group = "heisenberg-1";
  std::string multiplier = R"({"kind":"bump","center":1,"halfwidth":0.5})";
  std::string calculus = "truncated";
  int ell = 0;
  double mu_min = 1.0 / 1024;
  double x_max = 0, u_max = 0;
  std::vector<double> grid;  // N, T, Nu, P
};

int kernel(Run& run, const KernelArgs& a) {
  const HTypeGroup G = HTypeGroup::load(a.group);
  const MultiplierSpec F = load_multiplier(a.multiplier);
  JointMultiplier M;
  if (a.calculus == "truncated")
    M = JointMultiplier::truncated(F, a.ell);
  else if (a.calculus == "sqrtL")
    M = JointMultiplier::of_sqrtL(F);
  else
    M = JointMultiplier::of_L(F);
  KernelOptions ko;
  ko.mu_min = a.mu_min;
  ko.x_max = a.x_max;
  ko.u_max = a.u_max;
  run.config = {{"group", G.to_json()},      {"multiplier", F.description()}, {"calculus", a.calculus},
                {"ell", a.ell},              {"mu_min", a.mu_min},           {"x_max", a.x_max},
                {"u_max", a.u_max},          {"grid", a.grid}};
  Grid grid;
  const Grid* gp = nullptr;
  if (!a.grid.empty()) {
    if (a.grid.size() != 4) throw DomainError("--grid takes N,T,Nu,P");
    grid = product_grid(G, static_cast<int>(a.grid[0]), a.grid[1], static_cast<int>(a.grid[2]), a.grid[3]);
    gp = &grid;
  }
  const KernelTable K = synthesize_kernel(M, G, gp, ko);
  const json prov = {{"subcommand", "kernel"}, {"config", run.config}};
  for (const std::string& p : export_kernel(run.path(""), K, prov)) run.note(p, "kernel");
  const json summary = {{"terms", K.term_count()},
                        {"spectral_norm_sq", K.spectral_norm_sq()},
                        {"excluded_norm_sq", K.excluded_norm_sq},
                        {"grid_norm_sq", K.has_samples() ? json(K.grid_norm_sq()) : json(nullptr)}};
  run.write(".json", "kernel-summary", dump_json(summary));
  return kExitOk;
}

struct ScanArgs {
  std::string group = "heisenberg-1";
  std::string multiplier = R"({"kind":"bump","center":1,"halfwidth":0.5})";
  std::string ell = "2..7";
  double alpha = 0.0;
  std::string weight = "power";
  double p = 1.0;
  int trials = 16;
  bool force = false;
};

int plancherel_scan(Run& run, const ScanArgs& a) {
  const HTypeGroup G = HTypeGroup::load(a.group);
  const MultiplierSpec F = load_multiplier(a.multiplier);
  const Range r = parse_range(a.ell, "--ell");
  run.config = {{"group", G.to_json()}, {"multiplier", F.description()}, {"alpha", a.alpha},
                {"ell", {r.lo, r.hi}},  {"weight", a.weight}};
  const Weight w = a.weight == "above-one" ? Weight::PowerAboveOne : Weight::Power;
  ScanReport rep = weighted_plancherel_scan(F, G, a.alpha, r.lo, r.hi, w);
  rep.metadata["expected_slope"] = a.alpha - 0.5 * G.d2();
  run.scan(rep);
  std::cout << "slope " << format_double(rep.slope) << "\n";
  return kExitOk;
}

int restriction(Run& run, const ScanArgs& a, std::uint64_t seed) {
  const HTypeGroup G = HTypeGroup::load(a.group);
  const MultiplierSpec F = load_multiplier(a.multiplier);
  const Range r = parse_range(a.ell, "--ell");
  run.config = {{"group", G.to_json()}, {"multiplier", F.description()}, {"p", a.p},
                {"ell", {r.lo, r.hi}},  {"trials", a.trials},           {"force", a.force}};
  const double expected = -G.d2() * (1.0 / a.p - 0.5);
  ScanReport rep;
  if (a.p == 1.0) {
    rep = restriction_scan(F, G, r.lo, r.hi);
  } else {
    rep.variable = "ell";
    rep.quantity = "gaussian_lower_bound";
    json rows = json::array();
    for (int ell = r.lo; ell <= r.hi; ++ell) {
      const LowerBound lb = restriction_lower_bound(F, G, ell, a.p, a.trials, seed, a.force);
      rep.add(ell, lb.value);
      rows.push_back({{"ell", ell},
                      {"sigma", lb.sigma},
                      {"tau", lb.tau},
                      {"shape", lb.shape},
                      {"ratio", lb.ratio},
                      {"outside_range", lb.outside_range}});
    }
    rep.fit();
    rep.metadata["lower_bounds"] = rows;
  }
  rep.metadata["expected_slope"] = expected;
  run.scan(rep);
  std::cout << "slope " << format_double(rep.slope) << "\n";
  return kExitOk;
}

struct DiscreteArgs {
  int n = 1;
  std::string k = "0..20";
  double rho = 1.0;
};

int discrete(Run& run, const DiscreteArgs& a) {
  const Range r = parse_range(a.k, "--k");
  run.config = {{"n", a.n}, {"k", {r.lo, r.hi}}, {"rho", a.rho}};
  std::string csv = "k,value,quadrature,shape,ratio\r\n";
  json rows = json::array();
  for (int k = r.lo; k <= r.hi; ++k) {
    const DiscreteRestriction d = discrete_restriction_p1(a.n, k, a.rho);
    csv += std::to_string(k) + "," + format_double(d.value) + "," + format_double(d.quadrature) + "," +
           format_double(d.shape) + "," + format_double(d.ratio) + "\r\n";
    rows.push_back(
        {{"k", k}, {"value", d.value}, {"quadrature", d.quadrature}, {"shape", d.shape}, {"ratio", d.ratio}});
  }
  run.write(".json", "table-json", dump_json({{"n", a.n}, {"rho", a.rho}, {"rows", rows}}));
  run.write(".csv", "table-csv", csv);
  return kExitOk;
}

struct SupportArgs {
  std::string group = "heisenberg-1";
  std::string multiplier = R"({"kind":"bump","center":1,"halfwidth":0.5})";
  int iota = 5;
  int ell = 3;
  std::vector<double> c{0.25, 0.5, 1, 2, 3, 4, 6, 8};
};

int essential_support(Run& run, const SupportArgs& a) {
  const HTypeGroup G = HTypeGroup::load(a.group);
  const MultiplierSpec F = load_multiplier(a.multiplier);
  run.config = {{"group", G.to_json()}, {"multiplier", F.description()}, {"iota", a.iota}, {"ell", a.ell}, {"c", a.c}};
  ScanReport rep = essential_support_scan(F, G, a.iota, a.ell, a.c);
  rep.metadata["theta"] = kSupportTheta;
  run.scan(rep);
  return kExitOk;
}

struct PropagationArgs {
  std::string group = "heisenberg-1";
  double t = 1.0;
  double radius = 1.0;
  int cutoff = 4;
  std::vector<double> kappa{1, 2, 3, 4};
  std::vector<double> grid{65, 8, 256, 32};
  bool save_initial = false;
};

int propagation(Run& run, const PropagationArgs& a) {
  const HTypeGroup G = HTypeGroup::load(a.group);
  if (a.grid.size() != 4) throw DomainError("--grid takes N,T,Nu,P");
  run.config = {{"group", G.to_json()}, {"t", a.t},         {"radius", a.radius},
                {"cutoff", a.cutoff},   {"kappa", a.kappa}, {"grid", a.grid}};
  const Grid g = product_grid(G, static_cast<int>(a.grid[0]), a.grid[1], static_cast<int>(a.grid[2]), a.grid[3]);
  PropagationOptions po;
  po.cutoff = a.cutoff;
  po.radius = a.radius;
  po.kappas = a.kappa;
  const GridFunction f = quasi_ball_bump(g, G, a.radius);
  if (a.save_initial) {
    write_grid_function(run.path(".initial.htgf"), f);
    write_text_file(run.path(".initial.htgf.json"),
                    dump_json(grid_sidecar(f, Precision::Complex128, {{"subcommand", "propagation"}, {"config", run.config}})));
    run.note(run.path(".initial.htgf"), "grid-function");
    run.note(run.path(".initial.htgf.json"), "grid-sidecar");
  }
  const PropagationReport r = propagation_check(G, f, a.t, po);
  run.write(".json", "propagation",
            dump_json({{"t", r.t},
                       {"kappas", r.kappas},
                       {"outside", r.outside},
                       {"leakage", r.leakage},
                       {"wrap_fraction", r.wrap_fraction},
                       {"relative_change", r.relative_change},
                       {"theta", kPropagationTheta}}));
  return kExitOk;
}

struct CounterexampleArgs {
  int n = 1;
  std::string nu = "0";
  std::string ladder = "0..12";
  std::string C = "3";
  std::vector<double> grid;  // N, T
  bool conjugation = false;
};

int counterexample(Run& run, const CounterexampleArgs& a) {
  if (a.n < 1 || a.n > 2) throw DomainError("--n must be 1 or 2");
  const MultiIndex nu = parse_multi_index(a.nu, a.n);
  const Range r = parse_range(a.ladder, "--ladder");
  if (r.lo < 0) throw DomainError("--ladder must be nonnegative");
  const Rational C = Rational::parse(a.C);
  Grid g = desk_grid(a.n);
  if (!a.grid.empty()) {
    if (a.grid.size() != 2) throw DomainError("--grid takes N,T");
    g = Grid::symmetric(2 * a.n, a.grid[1], static_cast<std::size_t>(a.grid[0]));
  }
  run.config = {{"n", a.n},          {"nu", nu},       {"ladder", {r.lo, r.hi}},
                {"C", C.str()},      {"grid", a.grid}, {"conjugation", a.conjugation}};
  int nu_abs = 0;
  for (int v : nu) nu_abs += v;

  std::string csv =
      "nu,nup,eigA,eigH,ratio,form_A,form_H,grad_sq,potential,eig_error,identity_error,summands_ok,"
      "conjugation_residual,rescaling_residual\r\n";
  json rows = json::array();
  std::vector<int> levels;
  for (int m = r.lo; m <= r.hi; ++m) {
    levels.push_back(m);
    if (nu_abs + m > kCounterexampleBudget) continue;  // exact refutation only beyond the grid budget
    MultiIndex nup(static_cast<std::size_t>(a.n), 0);
    nup[0] = m;
    const CounterexampleRow row = counterexample_row(nu, nup, g);
    json conj = nullptr;
    std::string c1, c2;
    if (a.conjugation && a.n == 1) {
      const ConjugationReport cr = fourier_conjugation_check(nu, nup, conjugation_grid());
      conj = {{"residual", cr.residual}, {"relative", cr.relative}, {"rescaling", cr.rescaling}};
      c1 = format_double(cr.relative);
      c2 = format_double(cr.rescaling);
    }
    csv += csv_field(multi_index_str(nu)) + "," + csv_field(multi_index_str(nup)) + "," +
           std::to_string(row.eig_a) + "," + std::to_string(row.eig_h) + "," + row.ratio.str() + "," +
           format_double(row.form_a) + "," + format_double(row.form_h) + "," + format_double(row.grad_sq) + "," +
           format_double(row.potential) + "," + format_double(row.eig_error) + "," +
           format_double(row.identity_error) + "," + (row.summands_ok ? "true" : "false") + "," + c1 + "," + c2 +
           "\r\n";
    rows.push_back({{"nu", nu},
                    {"nup", nup},
                    {"eigA", row.eig_a},
                    {"eigH", row.eig_h},
                    {"ratio", row.ratio.str()},
                    {"form_A", row.form_a},
                    {"form_H", row.form_h},
                    {"grad_sq", row.grad_sq},
                    {"potential", row.potential},
                    {"eig_error", row.eig_error},
                    {"identity_error", row.identity_error},
                    {"summands_ok", row.summands_ok},
                    {"coarse_grid", (row.flags & kFlagCoarseGrid) != 0},
                    {"conjugation", conj}});
  }
  const RefutationReport ref = refutation_scan(a.n, nu, levels, C);
  json steps = json::array();
  for (const auto& s : ref.steps) steps.push_back({{"level", s.level}, {"ratio", s.ratio.str()}});
  run.write(".csv", "table-csv", csv);
  run.write(".json", "table-json",
            dump_json({{"rows", rows},
                       {"refutation",
                        {{"target", ref.target.str()},
                         {"first", ref.first},
                         {"inconclusive", ref.inconclusive},
                         {"increasing", ref.increasing},
                         {"steps", steps}}}}));
  if (ref.inconclusive)
    std::cout << "inconclusive: no ratio above " << ref.target.str() << " on the ladder\n";
  else
    std::cout << "ratio exceeds C^2 = " << ref.target.str() << " first at |nu'| = " << ref.first << "\n";
  return kExitOk;
}

int selftest(Run& run, const std::vector<int>& ids) {
  run.config = {{"criteria", ids}};
  int failed = 0;
  json results = json::array();
  run_acceptance(ids, [&](const CriterionResult& r) {
    std::cout << format_result(r) << std::endl;
    if (!r.pass) ++failed;
    results.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
  });
  run.write(".json", "selftest", dump_json({{"results", results}, {"failed", failed}}));
  return failed ? kExitFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral multipliers on Heisenberg-type groups: experiments with reproducible outputs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HTLAB_VERSION);

  Common common;
  const char* env_out = std::getenv("HTLAB_OUT");
  common.out = env_out && *env_out ? env_out : "htlab-out";
  auto add_common = [&](CLI::App* s) {
    s->add_option("--out", common.out, "output directory (default $HTLAB_OUT or ./htlab-out)");
    s->add_option("--prefix", common.prefix, "file name prefix (default: the subcommand name)");
    s->add_option("--threads", common.threads, "thread cap (0 = available parallelism)")->check(CLI::NonNegativeNumber);
    s->add_option("--seed", common.seed, "random seed");
    s->add_flag("--gnuplot", common.gnuplot, "also write a two-column gnuplot data file");
  };

  GroupCheckArgs gc;
  auto* s_gc = app.add_subcommand("group-check", "validate the structure matrices and run the group property suite");
  s_gc->add_option("--group", gc.group, "heisenberg-<n>, quaternionic, or a JSON file");
  s_gc->add_option("--cases", gc.cases, "random cases per property");
  add_common(s_gc);

  KernelArgs ka;
  auto* s_k = app.add_subcommand("kernel", "synthesize a convolution kernel and export it");
  s_k->add_option("--group", ka.group);
  s_k->add_option("--multiplier", ka.multiplier, "multiplier JSON (inline or file)");
  s_k->add_option("--calculus", ka.calculus, "truncated: F(sqrt L) chi_ell(L/|U|); sqrtL: F(sqrt L); L: F(L)")
      ->check(CLI::IsMember({"truncated", "sqrtL", "L"}));
  s_k->add_option("--ell", ka.ell);
  s_k->add_option("--mu-min", ka.mu_min)->check(CLI::NonNegativeNumber);
  s_k->add_option("--x-max", ka.x_max)->check(CLI::NonNegativeNumber);
  s_k->add_option("--u-max", ka.u_max)->check(CLI::NonNegativeNumber);
  s_k->add_option("--grid", ka.grid, "N,T,Nu,P: sample on [-T,T]^d1 x [-P/2,P/2)^d2")->delimiter(',');
  add_common(s_k);

  ScanArgs pa;
  auto* s_p = app.add_subcommand("plancherel-scan", "weighted Plancherel norms of the truncated kernels over ell");
  s_p->add_option("--group", pa.group);
  s_p->add_option("--multiplier", pa.multiplier);
  s_p->add_option("--alpha", pa.alpha)->check(CLI::Range(0.0, 4.0));
  s_p->add_option("--ell", pa.ell, "a..b");
  s_p->add_option("--weight", pa.weight)->check(CLI::IsMember({"power", "above-one"}));
  add_common(s_p);

  ScanArgs ra;
  auto* s_r = app.add_subcommand("restriction-scan", "p -> 2 norms of the truncated multipliers over ell");
  s_r->add_option("--group", ra.group);
  s_r->add_option("--multiplier", ra.multiplier);
  s_r->add_option("--p", ra.p)->check(CLI::Range(1.0, 2.0));
  s_r->add_option("--ell", ra.ell, "a..b");
  s_r->add_option("--trials", ra.trials, "Gaussian test functions per ell (p > 1)")->check(CLI::PositiveNumber);
  s_r->add_flag("--force", ra.force, "allow p outside the restriction range");
  add_common(s_r);

  DiscreteArgs da;
  auto* s_d = app.add_subcommand("discrete-restriction", "norms of the twisted projections at p = 1");
  s_d->add_option("--n", da.n)->check(CLI::Range(1, 8));
  s_d->add_option("--k", da.k, "a..b");
  s_d->add_option("--rho", da.rho)->check(CLI::PositiveNumber);
  add_common(s_d);

  SupportArgs sa;
  auto* s_s = app.add_subcommand("essential-support", "kernel mass outside |x| > c 2^ell");
  s_s->add_option("--group", sa.group);
  s_s->add_option("--multiplier", sa.multiplier);
  s_s->add_option("--iota", sa.iota)->check(CLI::NonNegativeNumber);
  s_s->add_option("--ell", sa.ell);
  s_s->add_option("--c", sa.c)->delimiter(',');
  add_common(s_s);

  PropagationArgs pr;
  auto* s_w = app.add_subcommand("propagation", "finite propagation of cos(t sqrt L) on a quasi-ball bump");
  s_w->add_option("--group", pr.group);
  s_w->add_option("--t", pr.t);
  s_w->add_option("--radius", pr.radius)->check(CLI::PositiveNumber);
  s_w->add_option("--cutoff", pr.cutoff);
  s_w->add_option("--kappa", pr.kappa)->delimiter(',');
  s_w->add_option("--grid", pr.grid, "N,T,Nu,P")->delimiter(',');
  s_w->add_flag("--save-initial", pr.save_initial, "write the initial bump as a binary grid container");
  add_common(s_w);

  CounterexampleArgs ca;
  auto* s_c = app.add_subcommand("counterexample", "eigenvalue ratios and quadratic forms of the twisted Laplacian");
  s_c->add_option("--n", ca.n);
  s_c->add_option("--nu", ca.nu, "comma-separated multi-index; 0 means the zero index");
  s_c->add_option("--ladder", ca.ladder, "a..b values of |nu'|");
  s_c->add_option("--C", ca.C, "constant to refute (integer or p/q)");
  s_c->add_option("--grid", ca.grid, "N,T")->delimiter(',');
  s_c->add_flag("--conjugation", ca.conjugation, "add Fourier conjugation residuals (n = 1)");
  add_common(s_c);

  std::vector<int> ids;
  auto* s_t = app.add_subcommand("selftest", "run the acceptance criteria");
  s_t->add_option("ids", ids, "criterion ids (default all)");
  add_common(s_t);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error(structured_error("ConfigError", e.what(), ""));
    return kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  if (common.prefix.empty()) common.prefix = name;
  if (common.threads > 0) set_thread_cap(common.threads);
  const std::vector<std::string> args(argv, argv + argc);

  std::unique_ptr<Run> run;
  try {
    run = std::make_unique<Run>(name, common, args);
  } catch (const std::exception& e) {
    report_error(structured_error("OutputError", e.what(), name));
    return kExitError;
  }

  auto fail = [&](const char* type, const std::string& msg, int code) {
    const json err = structured_error(type, msg, name);
    report_error(err);
    try {
      run->finish("error", err);
    } catch (const std::exception&) {
    }
    return code;
  };

  int status = kExitOk;
  try {
    if (name == "group-check") status = group_check(*run, gc, common.seed);
    else if (name == "kernel") status = kernel(*run, ka);
    else if (name == "plancherel-scan") status = plancherel_scan(*run, pa);
    else if (name == "restriction-scan") status = restriction(*run, ra, common.seed);
    else if (name == "discrete-restriction") status = discrete(*run, da);
    else if (name == "essential-support") status = essential_support(*run, sa);
    else if (name == "propagation") status = propagation(*run, pr);
    else if (name == "counterexample") status = counterexample(*run, ca);
    else status = selftest(*run, ids);
  } catch (const AccuracyError& e) {
    return fail("AccuracyError", e.what(), kExitAccuracy);
  } catch (const DomainError& e) {
    return fail("DomainError", e.what(), kExitConfig);
  } catch (const FormatError& e) {
    return fail("FormatError", e.what(), kExitConfig);
  } catch (const StructuralError& e) {
    return fail("StructuralError", e.what(), kExitConfig);
  } catch (const BudgetError& e) {
    return fail("BudgetError", e.what(), kExitConfig);
  } catch (const GridMismatch& e) {
    return fail("GridMismatch", e.what(), kExitConfig);
  } catch (const std::exception& e) {
    return fail("Error", e.what(), kExitError);
  }
  run->finish(status == kExitOk ? "ok" : "failed");
  return status;
}
