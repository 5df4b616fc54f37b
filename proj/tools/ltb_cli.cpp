#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ltb/accretive.hpp"
#include "ltb/bcr.hpp"
#include "ltb/dyadic.hpp"
#include "ltb/geometry.hpp"
#include "ltb/haar.hpp"
#include "ltb/io.hpp"
#include "ltb/op.hpp"
#include "ltb/stopping.hpp"

namespace fs = std::filesystem;
using namespace ltb;

namespace {

constexpr int kMaxDepth = 12;

struct RunConfig {
  std::string space_kind = "uniform-line";
  std::string space_file;
  GenParams gen;
  double delta = 0.5;
  int max_depth = kMaxDepth;
  KernelSpec kernel;
  SystemSpec system;
  StoppingParams stopping;
  int tau_points = 10;
  GeometryOptions geometry;
  std::string out = "ltb-out";
  std::uint64_t seed = 1;
};

// exit status 2
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class T>
void take(const Json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void apply_config_file(RunConfig& c, const std::string& path) {
  Json j = read_json(path);
  try {
    if (j.contains("space")) {
      const Json& s = j["space"];
      take(s, "kind", c.space_kind);
      take(s, "file", c.space_file);
      take(s, "n", c.gen.n);
      take(s, "h", c.gen.h);
      take(s, "nx", c.gen.nx);
      take(s, "ny", c.gen.ny);
      take(s, "circumference", c.gen.circumference);
      take(s, "level", c.gen.level);
      take(s, "jitter", c.gen.jitter);
      if (s.contains("segments")) c.gen.segments = s["segments"].get<std::vector<std::array<double, 2>>>();
      if (s.contains("vertices")) c.gen.vertices = s["vertices"].get<std::vector<std::array<double, 2>>>();
    }
    take(j, "delta", c.delta);
    take(j, "max_depth", c.max_depth);
    if (j.contains("kernel")) {
      const Json& k = j["kernel"];
      if (k.contains("kind")) c.kernel.kind = parse_kernel(k["kind"].get<std::string>());
      take(k, "alpha", c.kernel.alpha);
      take(k, "c_size", c.kernel.c_size);
      if (k.contains("matrix_file")) c.kernel.custom = load_matrix_csv(k["matrix_file"].get<std::string>());
    }
    if (j.contains("system")) {
      const Json& s = j["system"];
      if (s.contains("kind")) c.system.kind = parse_system(s["kind"].get<std::string>());
      take(s, "amplitude", c.system.amplitude);
      take(s, "p", c.system.p);
      take(s, "q", c.system.q);
      take(s, "frequency", c.system.frequency);
    }
    if (j.contains("stopping")) {
      const Json& s = j["stopping"];
      take(s, "delta_stop", c.stopping.delta_stop);
      take(s, "c_stop", c.stopping.c_stop);
      take(s, "maximal_variant", c.stopping.maximal_variant);
    }
    if (j.contains("bcr")) take(j["bcr"], "tau_sweep", c.tau_points);
    if (j.contains("geometry")) {
      const Json& g = j["geometry"];
      take(g, "centers", c.geometry.centers);
      take(g, "x_grid", c.geometry.x_grid);
      take(g, "floor_factor", c.geometry.floor_factor);
      take(g, "eta_min", c.geometry.thresholds.eta_min);
      take(g, "residual_max", c.geometry.thresholds.residual_max);
      take(g, "geodesic_threshold", c.geometry.geodesic_threshold);
      take(g, "nu", c.geometry.nu);
      take(g, "trials", c.geometry.trials);
    }
    take(j, "out", c.out);
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void validate(const RunConfig& c) {
  if (!(c.delta > 0 && c.delta < 1)) throw ConfigError("delta must lie in (0, 1)");
  if (c.max_depth < 1 || c.max_depth > kMaxDepth) throw ConfigError("max_depth must lie in [1, 12]");
  if (c.tau_points < 2 || c.tau_points > 1000) throw ConfigError("tau sweep needs between 2 and 1000 points");
  if (!(c.system.p > 1) || !(c.system.q > 1)) throw ConfigError("p and q must exceed 1");
}

// Objects shared between suites, built on demand in dependency order.
class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg) : c_(std::move(cfg)) { fs::create_directories(c_.out); }

  const RunConfig& config() const { return c_; }
  std::string path(const std::string& name) const { return (fs::path(c_.out) / name).string(); }

  const PointSpace& space() {
    if (!space_) {
      GenParams p = c_.gen;
      p.seed = c_.seed;
      if (c_.space_kind == "matrix-file") p.file = c_.space_file;
      space_ = generate(c_.space_kind, p);
    }
    return *space_;
  }
  const DyadicTree& tree() {
    if (!tree_) tree_ = build_tree(space(), c_.delta, c_.max_depth);
    return *tree_;
  }
  const KernelOperator& op() {
    if (!op_) op_ = assemble(space(), c_.kernel);
    return *op_;
  }
  const AccretiveSystem& system() {
    if (!sys_) sys_ = std::make_unique<AccretiveSystem>(space(), tree(), c_.system);
    return *sys_;
  }
  const StoppingDecomposition& stopping(int side) {
    auto& d = side == 1 ? d1_ : d2_;
    if (!d) d = stopping_for_system(system(), op(), side, tree().root(), c_.stopping);
    return *d;
  }
  const BcrContext& bcr() {
    if (!ctx_) ctx_ = std::make_unique<BcrContext>(system(), op(), stopping(1), stopping(2));
    return *ctx_;
  }
  CVec random_fn(std::uint64_t salt) {
    std::mt19937_64 rng(c_.seed * 0x9e3779b97f4a7c15ULL + salt);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CVec v(space().size());
    for (int i = 0; i < v.size(); ++i) v[i] = cplx(u(rng), u(rng));
    return v;
  }

  Json report;
  bool hard_failure = false;

  void hard(bool ok, const std::string& what) {
    if (!ok) {
      hard_failure = true;
      std::fprintf(stderr, "invariant violated: %s\n", what.c_str());
    }
  }

 private:
  RunConfig c_;
  std::optional<PointSpace> space_;
  std::optional<DyadicTree> tree_;
  std::optional<KernelOperator> op_;
  std::unique_ptr<AccretiveSystem> sys_;
  std::optional<StoppingDecomposition> d1_, d2_;
  std::unique_ptr<BcrContext> ctx_;
};

void run_build_space(Pipeline& p) {
  const PointSpace& s = p.space();
  save_space_json(s, p.path("space.json"));
  MetricCheck mc = check_metric(s);
  DoublingReport dr = doubling_constant(s);
  p.hard(mc.ok, "metric axioms");
  p.report["space"] = {{"kind", s.kind()},
                       {"n", s.size()},
                       {"diameter", s.diameter()},
                       {"resolution", s.resolution()},
                       {"total_mass", s.total_mass()},
                       {"metric_ok", mc.ok},
                       {"doubling", {{"tag", "C_D"}, {"value", number(dr.constant)}}},
                       {"lambda_ratio", number(dr.lambda_ratio)}};
}

void run_build_tree(Pipeline& p) {
  const PointSpace& s = p.space();
  const DyadicTree& t = p.tree();
  write_json(to_json(t), p.path("tree.json"));
  TreeValidation v = validate_tree(s, t);
  p.hard(v.ok(), "dyadic cube properties: " + v.detail);
  BoundaryProfile bp = tree_boundary_profile(s, t, default_boundary_grid());
  CsvWriter csv({"t", "ratio"});
  for (std::size_t k = 0; k < bp.t.size(); ++k) csv.row(std::vector<double>{bp.t[k], bp.ratio[k]});
  csv.save(p.path("small_boundary.csv"));
  p.report["tree"] = {{"depth", t.depth()},
                      {"complete", t.complete},
                      {"cubes", t.cubes.size()},
                      {"valid", v.ok()},
                      {"C1", number(v.C1)},
                      {"a0", number(v.a0)},
                      {"CX", {{"tag", "5.1"}, {"value", number(t.CX)}}},
                      {"small_boundary", {{"C", number(bp.C)}, {"eta", number(bp.eta)}, {"residual", number(bp.residual)}}}};
}

void run_assemble(Pipeline& p) {
  const KernelOperator& op = p.op();
  save_matrix_csv(op.kernel(), p.path("kernel.csv"));
  StandardEstimates se = check_standard_estimates(p.space(), p.tree(), op, 10000, p.config().seed);
  p.report["operator"] = {{"kernel", kernel_name(op.spec().kind)},
                          {"l2_norm", number(op.l2_norm())},
                          {"size", {{"tag", "2.1"}, {"value", number(se.size_constant)}}},
                          {"holder", {{"tag", "2.2"}, {"value", number(se.holder_constant)}, {"triples", se.triples}}},
                          {"decay", {{"tag", "2.5"}, {"value", number(se.prop23_ratio)}, {"samples", se.prop23_samples}}}};
}

void run_wavelets(Pipeline& p) {
  const PointSpace& s = p.space();
  const DyadicTree& t = p.tree();
  CVec b = p.system().b_dense(1, t.root());
  std::vector<int> spa;
  for (const Cube& Q : t.cubes)
    if (is_spa(s, t, b, Q.id, p.config().stopping.delta_stop)) spa.push_back(Q.id);
  HaarSystem hs = build_haar_system(s, t, b, spa, p.config().stopping.delta_stop);
  write_json(to_json(hs), p.path("wavelets.json"));
  CVec f = p.random_fn(1);
  double r5 = 0.0;
  for (const WaveletEntry& e : hs.entries) {
    if (e.count() == 0) continue;
    SparseFn d = adapted_difference(s, t, b, e.cube, f, p.config().stopping.delta_stop);
    SparseFn w = synthesis(t, e, analysis(s, t, e, f));
    for (std::size_t k = 0; k < d.size(); ++k) r5 = std::max(r5, std::abs(d.val[k] - w.val[k]));
  }
  p.hard(r5 <= 1e-9, "wavelet reconstruction");
  p.report["wavelets"] = {{"spa_cubes", spa.size()}, {"reconstruction", {{"tag", "5.1(5)"}, {"residual", number(r5)}}}};
}

void run_verify_accretive(Pipeline& p) {
  const AccretiveSystem& sys = p.system();
  SizeReport sz = verify_size(sys, p.op());
  DualNormReport d34 = verify_34(sys, p.op(), sys.q());
  WbpReport wbp = verify_wbp(sys, p.op());
  p.hard(sz.normalization_error <= 1e-10, "(3.1) normalisation");
  p.report["accretive"] = {{"system", system_name(sys.spec().kind)},
                           {"amplitude", sys.spec().amplitude},
                           {"3.1", number(sz.normalization_error)},
                           {"3.2", number(sz.c32)},
                           {"3.3", number(sz.c33)},
                           {"3.7", number(sz.c37)},
                           {"3.4", {{"nu", d34.nu}, {"value", number(d34.constant)}, {"configs", d34.configs}}},
                           {"3.5", number(wbp.c35)},
                           {"3.6", number(wbp.c36)}};
}

void run_stopping(Pipeline& p) {
  const PointSpace& s = p.space();
  const DyadicTree& t = p.tree();
  const AccretiveSystem& sys = p.system();
  const double CA = verify_size(sys, p.op()).c32;
  Json sides = Json::array();
  for (int side = 1; side <= 2; ++side) {
    const StoppingDecomposition& d = p.stopping(side);
    Json j = to_json(d);
    PackingReport pr = packing_report(s, t, d);
    CVec f = p.random_fn(10 + side);
    f /= f.cwiseAbs().maxCoeff();
    Decomposition55 dc = decomposition_55(s, t, d, sys, f);
    Lemma56Report lr = lemma_56_suite(s, t, d, sys, f, CA);
    p.hard(pr.trichotomy_ok && pr.maximality_ok, "trichotomy and maximality of tops");
    p.hard(pr.buffer_packing_ok, "(5.4) buffer packing");
    p.hard(dc.residual <= 1e-10, "(5.5) decomposition");
    p.hard(std::max({lr.res58, lr.res59, lr.res510}) <= 1e-12, "(5.8)-(5.10)");
    j["5.4"] = {{"buffer_mass", pr.buffer_mass}, {"root_mass", pr.root_mass}, {"ok", pr.buffer_packing_ok}};
    j["5.5"] = {{"residual", number(dc.residual)}, {"coefficients", number(dc.coefficient_constant)}};
    j["5.7"] = {{"ratio", number(lr.ratio57)}, {"bound", number(lr.bound)}};
    j["5.8"] = number(lr.res58);
    j["5.9"] = number(lr.res59);
    j["5.10"] = number(lr.res510);
    j["5.11"] = number(lr.ratio511);
    sides.push_back(std::move(j));
  }
  write_json(sides, p.path("stopping.json"));
  p.report["stopping"] = {{"tops", {p.stopping(1).tops.size(), p.stopping(2).tops.size()}},
                          {"eps", {number(p.stopping(1).eps), number(p.stopping(2).eps)}},
                          {"degenerate", p.stopping(1).degenerate || p.stopping(2).degenerate}};
}

void run_bcr(Pipeline& p) {
  const BcrContext& ctx = p.bcr();
  CVec f = p.random_fn(21), g = p.random_fn(22);
  BcrDecomposition dec = bcr_terms(ctx, f, g);
  AppendixBReport ab = appendix_b_ratios(ctx, f, g);
  p.hard(dec.residual <= 1e-8, "telescoping identity");
  Json j = to_json(dec);
  j["appendix_b"] = to_json(ab);
  write_json(j, p.path("bcr.json"));
  p.report["bcr"] = {{"telescoping_residual", number(dec.residual)},
                     {"w_duality", number(dec.w_duality)},
                     {"beta_cancellation", number(dec.v_split.beta_cancellation)},
                     {"appendix_b", to_json(ab)}};
}

void run_compress_sweep(Pipeline& p) {
  const BcrContext& ctx = p.bcr();
  CVec f = p.random_fn(21), g = p.random_fn(22);
  BcrDecomposition dec = bcr_terms(ctx, f, g);
  auto w = contribution_weights(ctx, dec);
  auto sweep = compression_sweep(dec, w, default_tau_grid(w, p.config().tau_points));
  CsvWriter csv({"tau", "kept_fraction", "relative_error", "abs_error", "dropped_mass"});
  bool monotone = true;
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const auto& pt = sweep[k];
    csv.row(std::vector<double>{pt.tau, pt.kept_fraction, pt.relative_error, pt.abs_error, pt.dropped_mass});
    if (k > 0 && pt.abs_error > sweep[k - 1].abs_error * (1 + 1e-9)) monotone = false;
  }
  csv.save(p.path("compression.csv"));
  p.report["compression"] = {{"points", sweep.size()}, {"weighted_pairs", sweep.empty() ? 0 : sweep[0].weighted},
                             {"error_monotone", monotone}};
}

void run_geometry(Pipeline& p) {
  const PointSpace& s = p.space();
  ImplicationReport r = implication_study(s, p.config().geometry);
  write_json(to_json(r), p.path("geometry.json"));
  CsvWriter geo({"u", "C"});
  for (std::size_t k = 0; k < r.geodesic.u.size(); ++k) geo.row(std::vector<double>{r.geodesic.u[k], r.geodesic.C[k]});
  geo.save(p.path("geodesic.csv"));
  auto profile_csv = [&](const DecayProfile& d, const std::string& name) {
    CsvWriter c({"x", "ratio"});
    for (std::size_t k = 0; k < d.x.size(); ++k) c.row(std::vector<double>{d.x[k], d.ratio[k]});
    c.save(p.path(name));
  };
  profile_csv(r.relative_annular, "relative_annular.csv");
  profile_csv(r.relative_layer, "relative_layer.csv");
  profile_csv(r.annular, "annular.csv");
  profile_csv(r.layer, "layer.csv");
  auto status = [](bool b) { return b ? "PASS" : "FAIL"; };
  p.report["geometry"] = {{"resolution", s.resolution()},
                          {"monotone_geodesic", status(r.geodesic.pass)},
                          {"relative_annular", status(r.relative_annular.pass)},
                          {"relative_layer", status(r.relative_layer.pass)},
                          {"hardy", status(r.hardy_bounded)},
                          {"violations", r.violations}};
  std::printf("monotone geodesic: %s (C = %.4g)\n", status(r.geodesic.pass), r.geodesic.overall);
  std::printf("relative annular decay: %s (eta = %.3f)\n", status(r.relative_annular.pass), r.relative_annular.fit.eta);
  std::printf("relative layer decay: %s (eta = %.3f)\n", status(r.relative_layer.pass), r.relative_layer.fit.eta);
  std::printf("ball Hardy: %s (max %.4g, spread %.3f)\n", status(r.hardy_bounded), r.hardy.max_value, r.hardy.spread);
}

using Suite = void (*)(Pipeline&);

const std::vector<std::pair<std::string, Suite>>& suites() {
  static const std::vector<std::pair<std::string, Suite>> all = {
      {"build-space", run_build_space},   {"build-tree", run_build_tree}, {"assemble", run_assemble},
      {"wavelets", run_wavelets},         {"verify-accretive", run_verify_accretive},
      {"stopping", run_stopping},         {"bcr", run_bcr},               {"compress-sweep", run_compress_sweep},
      {"geometry", run_geometry}};
  return all;
}

int execute(RunConfig cfg, const std::vector<std::string>& which) {
  validate(cfg);
  Pipeline p(std::move(cfg));
  p.report["schema"] = kReportSchema;
  p.report["seed"] = p.config().seed;
  for (const auto& [name, fn] : suites()) {
    if (std::find(which.begin(), which.end(), name) == which.end()) continue;
    try {
      fn(p);
    } catch (const Degenerate& e) {
      p.report["skipped"][name] = e.what();
      std::fprintf(stderr, "%s skipped: %s\n", name.c_str(), e.what());
    } catch (const InvalidArgument& e) {
      p.report["skipped"][name] = e.what();
      std::fprintf(stderr, "%s skipped: %s\n", name.c_str(), e.what());
    }
  }
  p.report["hard_invariants_ok"] = !p.hard_failure;
  write_json(p.report, p.path("report.json"));
  return p.hard_failure ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local Tb toolkit on finite metric measure spaces"};
  app.require_subcommand(1, 1);

  RunConfig cfg;
  std::string config_file, space_kind, space_file, kernel, system, suite;
  std::optional<std::uint64_t> seed;
  std::optional<int> n, tau;
  std::optional<double> delta, p, q, amplitude;
  std::string out;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "global seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--suite", suite, "comma separated suites for 'all'");
    sub->add_option("--space", space_kind, "generator kind or matrix-file");
    sub->add_option("--space-file", space_file, "JSON space document (points or distance_matrix)");
    sub->add_option("--n", n, "point count for line and circle generators");
    sub->add_option("--delta", delta, "dyadic parameter in (0, 1)");
    sub->add_option("--kernel", kernel, "cauchy-1d, hardy-size, riesz-like-2d");
    sub->add_option("--system", system, "constant-one, oscillatory, square-wave, radial-bump");
    sub->add_option("--p", p, "exponent p");
    sub->add_option("--q", q, "exponent q");
    sub->add_option("--amplitude", amplitude, "accretive system amplitude");
    sub->add_option("--tau-sweep", tau, "number of compression thresholds");
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, fn] : suites()) subs.push_back(app.add_subcommand(name, "run the " + name + " suite"));
  subs.push_back(app.add_subcommand("all", "run every suite in dependency order"));
  for (CLI::App* s : subs) common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!config_file.empty()) apply_config_file(cfg, config_file);
    if (!space_kind.empty()) cfg.space_kind = space_kind;
    if (!space_file.empty()) {
      cfg.space_kind = "matrix-file";
      cfg.space_file = space_file;
    }
    if (cfg.space_kind == "matrix-file" && cfg.space_file.empty()) throw ConfigError("matrix-file needs space.file");
    if (n) cfg.gen.n = *n;
    if (delta) cfg.delta = *delta;
    if (!kernel.empty()) cfg.kernel.kind = parse_kernel(kernel);
    if (!system.empty()) cfg.system.kind = parse_system(system);
    if (p) cfg.system.p = *p;
    if (q) cfg.system.q = *q;
    if (amplitude) cfg.system.amplitude = *amplitude;
    if (tau) cfg.tau_points = *tau;
    if (seed) cfg.seed = *seed;
    if (!out.empty()) cfg.out = out;
    cfg.system.seed = cfg.seed;
    cfg.geometry.seed = cfg.seed;

    std::vector<std::string> which;
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "all") {
      if (suite.empty()) {
        for (const auto& s : suites()) which.push_back(s.first);
      } else {
        std::stringstream ss(suite);
        std::string item;
        while (std::getline(ss, item, ',')) {
          bool known = false;
          for (const auto& s : suites()) known = known || s.first == item;
          if (!known) throw ConfigError("unknown suite: " + item);
          which.push_back(item);
        }
      }
    } else {
      which.push_back(cmd);
    }
    return execute(cfg, which);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
