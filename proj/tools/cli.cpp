#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "secnet/csv.hpp"
#include "secnet/dynamics.hpp"
#include "secnet/errors.hpp"
#include "secnet/exact.hpp"
#include "secnet/experiment.hpp"
#include "secnet/graph.hpp"
#include "secnet/meanfield.hpp"
#include "secnet/netgen.hpp"
#include "secnet/parallel.hpp"
#include "secnet/rareevent.hpp"

namespace secnet::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<unsigned> workers;
  bool quiet = false;
};

struct ModelArgs {
  std::string graph;
  double e = 0.0;
  double c = 0.0;
  std::size_t gens = 100;
  std::string z0;
  std::string source = "post";
};

struct Context {
  Common common;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::vector<std::string> argv;
  std::ostream* out = nullptr;
  CLI::App* sub = nullptr;

  fs::path path(const std::string& name) const { return fs::path(common.out) / name; }

  void write(const std::string& name, const std::string& text) const {
    write_text(path(name), text);
    if (!common.quiet) *out << "wrote " << path(name).string() << "\n";
  }

  void manifest(Json extra = Json::object()) const {
    Json doc;
    doc["tool"] = "secnet";
    doc["version"] = kVersion;
    doc["command"] = sub->get_name();
    doc["argv"] = argv;
    doc["seed"] = seed;
    Json config;
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
      const auto& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& results = opt->results();
        config[name] = results.size() == 1 ? Json(results.front()) : Json(results);
      } else if (!opt->get_default_str().empty()) {
        config[name] = opt->get_default_str();
      } else if (opt->get_type_size() == 0) {
        config[name] = false;
      }
    }
    doc["config"] = config;
    for (auto& [key, value] : extra.items()) doc[key] = value;
    write_text(path("manifest.json"), doc.dump(2) + "\n");
  }
};

std::uint64_t entropy_seed() {
  std::random_device device;
  return (static_cast<std::uint64_t>(device()) << 32) ^ device();
}

/// Drops --out/--workers (which do not affect results) and pins the seed.
std::vector<std::string> manifest_argv(const std::vector<std::string>& args, std::uint64_t seed) {
  std::vector<std::string> kept;
  bool has_seed = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a == "--out" || a == "--workers") {
      ++i;
      continue;
    }
    if (a.rfind("--out=", 0) == 0 || a.rfind("--workers=", 0) == 0) continue;
    if (a == "--seed" || a.rfind("--seed=", 0) == 0) has_seed = true;
    kept.push_back(a);
  }
  if (!has_seed) {
    kept.push_back("--seed");
    kept.push_back(std::to_string(seed));
  }
  return kept;
}

Population population_from_hex(std::size_t n, const std::string& hex) {
  if (hex.empty()) return Population::all_occupied(n);
  std::string digits = hex;
  if (digits.rfind("0x", 0) == 0) digits = digits.substr(2);
  Population z(n);
  for (std::size_t k = 0; k < digits.size(); ++k) {
    const char ch = static_cast<char>(std::tolower(static_cast<unsigned char>(digits[digits.size() - 1 - k])));
    int value = 0;
    if (ch >= '0' && ch <= '9') value = ch - '0';
    else if (ch >= 'a' && ch <= 'f') value = ch - 'a' + 10;
    else throw InvalidArgument("--z0 must be a hexadecimal occupancy mask");
    for (int bit = 0; bit < 4; ++bit) {
      if (!(value >> bit & 1)) continue;
      const std::size_t i = 4 * k + static_cast<std::size_t>(bit);
      if (i >= n) throw InvalidArgument("--z0 has bits beyond n");
      z.occupy(static_cast<Node>(i));
    }
  }
  return z;
}

Params model_params(const ModelArgs& m) {
  Params p{m.e, m.c, colonisation_source_from_string(m.source)};
  p.validate();
  return p;
}

std::vector<double> default_grid(double max, std::size_t steps) {
  std::vector<double> grid;
  for (std::size_t k = 1; k <= steps; ++k) grid.push_back(max * static_cast<double>(k) / static_cast<double>(steps));
  return grid;
}

Json estimate_json(const Estimate& est) {
  Json doc;
  doc["method"] = std::string(to_string(est.method));
  doc["value"] = est.value;
  doc["std_error"] = est.std_error;
  doc["n_work"] = est.n_work;
  doc["replicates"] = est.replicates;
  return doc;
}

void add_model_options(CLI::App* sub, ModelArgs& m, bool with_source) {
  sub->add_option("--graph", m.graph, "Graph file (.json or edge list)")->required();
  sub->add_option("--e", m.e, "Extinction rate")->required();
  sub->add_option("--c", m.c, "Colonisation rate")->required();
  sub->add_option("--gens", m.gens, "Number of generations")->capture_default_str();
  sub->add_option("--z0", m.z0, "Initial occupancy as a hex mask (default: all occupied)");
  if (with_source)
    sub->add_option("--source", m.source, "Colonisation source: post or pre")->capture_default_str();
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string kind;
  std::size_t n = 0;
  std::optional<std::size_t> edges;
  std::optional<double> density;
  double power = 1.0;
  std::size_t communities = 2;
  double ratio = 10.0;
  std::string format = "json";
  std::string pa_sequence = "sequential";
};

void cmd_generate(Context& ctx, const GenerateArgs& a) {
  if (a.edges.has_value() == a.density.has_value()) throw InvalidArgument("give exactly one of --edges or --density");
  TopologySpec spec{topology_from_string(a.kind), a.n, a.edges ? *a.edges : edges_for_density(a.n, *a.density),
                    a.power, a.communities, a.ratio};
  spec.validate();
  auto rng = Rng::stream(ctx.seed, {0});
  GeneratorOptions opts;
  opts.pa_sequence = pa_sequence_from_string(a.pa_sequence);
  const Graph g = generate(spec, rng, opts);
  const auto metrics = graph_metrics(g);
  fs::create_directories(ctx.common.out);
  const std::string name = a.format == "json" ? "graph.json" : "graph.edges";
  write_graph(ctx.path(name), g);
  if (!ctx.common.quiet) *ctx.out << "wrote " << ctx.path(name).string() << "\n";
  ctx.write("metrics.json", to_json(metrics));
  ctx.manifest();
  *ctx.out << to_string(spec.kind) << " n=" << g.n() << " edges=" << g.edges().size()
           << " max_degree=" << metrics.max_degree << " lambda_A1=" << format_number(metrics.lambda_a1) << "\n";
}

struct ExactArgs {
  ModelArgs model;
  std::size_t max_n = kDefaultExactCap;
};

void cmd_exact(Context& ctx, const ExactArgs& a) {
  const Graph g = read_graph(a.model.graph);
  const Params params = model_params(a.model);
  const auto z0 = population_from_hex(g.n(), a.model.z0).mask();
  const auto tm = build_transition(g, params, a.max_n);
  const bool spectral = params.e > 0.0 && params.e < 1.0 && params.c > 0.0 && g.is_connected();
  const auto horizon = finite_horizon(tm, z0, a.model.gens, spectral && a.model.gens >= 50);

  fs::create_directories(ctx.common.out);
  ctx.write("horizon.csv", horizon.to_csv());
  Json summary;
  const auto& last = horizon.rows.back();
  summary["p_persist"] = last.p_persist;
  summary["p_extinct"] = last.p_extinct;
  summary["mean_occ"] = last.mean_occ;
  summary["cond_mean_occ"] = last.cond_mean_occ;
  if (spectral) {
    const auto q = qsd(tm);
    ctx.write("qsd.csv", q.to_csv(g.n()));
    summary["lambda_R1"] = q.lambda1;
    summary["lambda_R2_modulus"] = q.lambda2_modulus;
    summary["lambda_R2_converged"] = q.lambda2_converged;
    summary["qsd_residual"] = q.residual;
    if (z0 != 0) summary["mean_extinction_time"] = mean_extinction_time(tm, z0);
    if (a.model.gens >= 50) {
      const auto report = convergence_diagnostics(q, horizon);
      summary["tail_ratio"] = report.tail_ratio;
      summary["max_ratio_deviation"] = report.max_ratio_deviation;
      summary["tv_at_horizon"] = report.tv_at_horizon;
      summary["spectral_ratio"] = report.spectral_ratio;
      summary["quasi_stationary_regime"] = report.quasi_stationary_regime;
    }
  }
  ctx.write("summary.json", summary.dump(2) + "\n");
  ctx.manifest();
  *ctx.out << "P(#Z_" << a.model.gens << ">0)=" << format_number(last.p_persist)
           << " E(#Z_" << a.model.gens << ")=" << format_number(last.mean_occ) << "\n";
}

struct SimulateArgs {
  ModelArgs model;
  std::size_t reps = 10'000;
  bool trajectory = false;
};

void cmd_simulate(Context& ctx, const SimulateArgs& a) {
  const Graph g = read_graph(a.model.graph);
  const Params params = model_params(a.model);
  const auto z0 = population_from_hex(g.n(), a.model.z0);
  const auto report = estimate_crude(g, params, z0, a.model.gens, a.reps, ctx.seed, ctx.workers);
  fs::create_directories(ctx.common.out);
  ctx.write("estimates.csv", report.to_csv());
  if (a.trajectory) {
    auto rng = Rng::stream(ctx.seed, {~std::uint64_t{0}});
    ctx.write("trajectory.csv", simulate(g, params, z0, a.model.gens, rng).to_csv());
  }
  ctx.manifest();
  const auto& p = report.final_persistence();
  const auto& o = report.final_occupancy();
  *ctx.out << "persistence=" << format_number(p.value) << " (se " << format_number(p.std_error) << ")"
           << " occupancy=" << format_number(o.value) << " (se " << format_number(o.std_error) << ")\n";
}

struct RareArgs {
  ModelArgs model;
  std::string method;
  std::size_t particles = 1000;
  std::size_t batches = 20;
  bool literal = false;
  std::size_t trajectories = 10'000;
  std::optional<double> twist_from;
  std::optional<double> twist_to;
  std::vector<std::size_t> thresholds;
  std::size_t successes = 100;
  std::size_t replications = 20;
  std::size_t work_cap = 10'000'000;
};

void cmd_rare(Context& ctx, const RareArgs& a) {
  const Graph g = read_graph(a.model.graph);
  const Params params = model_params(a.model);
  const auto z0 = population_from_hex(g.n(), a.model.z0);
  const std::size_t T = a.model.gens;
  Json doc;
  std::string diagnostics;
  Estimate headline;
  if (a.method == "ips") {
    IpsOptions opts{a.particles, a.batches, a.literal, ctx.workers};
    const auto r = ips_persistence(g, params, z0, T, ctx.seed, opts);
    doc["persistence"] = estimate_json(r.persistence);
    doc["extinction"] = estimate_json(r.extinction);
    doc["conditional_occupancy"] = estimate_json(r.conditional_occupancy);
    doc["degenerate_batches"] = r.degenerate_batches;
    if (r.degenerate()) doc["warning"] = "every particle died in one step in some batch; increase --particles";
    diagnostics = r.diagnostics_csv();
    headline = r.persistence;
  } else if (a.method == "is") {
    auto schedule = TwistSchedule::default_for(params.e, T);
    if (a.twist_from || a.twist_to)
      schedule = TwistSchedule::linear(a.twist_from.value_or(params.e), a.twist_to.value_or(a.twist_from.value_or(params.e)), T);
    const auto r = is_extinction(g, params, z0, T, schedule, a.trajectories, ctx.seed, ctx.workers);
    doc["extinction"] = estimate_json(r.extinction);
    doc["effective_sample_size"] = r.effective_sample_size;
    doc["max_weight"] = r.max_weight;
    doc["hits"] = r.hits;
    doc["twist"] = schedule.rates;
    diagnostics = r.diagnostics_csv();
    headline = r.extinction;
  } else if (a.method == "split") {
    SplittingConfig config{a.thresholds, a.successes, a.replications, a.work_cap};
    const auto r = split_extinction(g, params, z0, T, config, ctx.seed, ctx.workers);
    doc["extinction"] = estimate_json(r.extinction);
    doc["thresholds"] = config.levels();
    diagnostics = r.diagnostics_csv();
    headline = r.extinction;
  } else {
    throw InvalidArgument("--method must be ips, is or split");
  }
  fs::create_directories(ctx.common.out);
  ctx.write("rare.json", doc.dump(2) + "\n");
  ctx.write("diagnostics.csv", diagnostics);
  ctx.manifest();
  *ctx.out << (a.method == "ips" ? "persistence=" : "extinction=") << format_number(headline.value) << " (se "
           << format_number(headline.std_error) << ")\n";
}

struct MeanfieldArgs {
  ModelArgs model;
  double p0 = 1.0;
};

void cmd_meanfield(Context& ctx, const MeanfieldArgs& a) {
  const Graph g = read_graph(a.model.graph);
  const Params params = model_params(a.model);
  std::vector<double> p0(g.n(), a.p0);
  if (!a.model.z0.empty()) {
    const auto z = population_from_hex(g.n(), a.model.z0);
    for (std::size_t i = 0; i < g.n(); ++i) p0[i] = z.occupied(static_cast<Node>(i)) ? 1.0 : 0.0;
  }
  const auto traj = mf_iterate(g, params, p0, a.model.gens);
  fs::create_directories(ctx.common.out);
  ctx.write("trajectory.csv", traj.to_csv());
  if (g.is_connected()) {
    const auto report = mf_threshold(g, params);
    ctx.write("threshold.json", report.to_json());
    *ctx.out << "regime=" << to_string(report.regime) << " e/c_eff=" << format_number(report.ratio)
             << " lambda_A1=" << format_number(report.lambda_a1) << "\n";
  }
  ctx.manifest();
}

struct ExperimentArgs {
  std::string design;
  std::string preset;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> replicates;
  std::size_t max_order = 4;
};

void cmd_experiment(Context& ctx, const ExperimentArgs& a, bool seed_given) {
  if (a.design.empty() == a.preset.empty()) throw InvalidArgument("give exactly one of --design or --preset");
  Design design;
  bool design_has_seed = false;
  if (!a.design.empty()) {
    std::string text;
    try {
      text = read_text(a.design);
    } catch (const Error& ex) {
      throw IoError(ex.what());
    }
    design = Design::from_json(text);
    design_has_seed = Json::parse(text).contains("seed");
  } else {
    design = preset(a.preset);
  }
  if (a.reps) design.estimator.n_reps = *a.reps;
  if (a.replicates) design.replicates = *a.replicates;
  if (seed_given || !design_has_seed) design.seed = ctx.seed;
  ctx.seed = design.seed;
  ctx.argv = manifest_argv(ctx.argv, ctx.seed);
  design.validate();

  const auto rows = run_factorial(design, ctx.workers);
  fs::create_directories(ctx.common.out);
  ctx.write("design.json", design.to_json());
  ctx.write("results.csv", results_csv(rows));
  ctx.write("timings.csv", timings_csv(rows));
  for (auto response : {Response::LogitPersistence, Response::Occupancy}) {
    try {
      const auto table = variance_decomposition(rows, response, a.max_order);
      ctx.write("variance_" + std::string(to_string(response)) + ".csv", table.to_csv());
    } catch (const InvalidArgument& ex) {
      *ctx.out << "variance decomposition skipped: " << ex.what() << "\n";
    }
  }
  ctx.write("compare.csv", compare_csv(scenario_compare(rows)));
  ctx.manifest(Json{{"design", Json::parse(design.to_json())}});
  const auto failed = std::count_if(rows.begin(), rows.end(), [](const ResultRow& r) { return !r.error.empty(); });
  *ctx.out << rows.size() << " rows, " << failed << " with errors\n";
}

struct HeatmapArgs {
  ModelArgs model;
  std::vector<double> e_grid;
  std::vector<double> c_grid;
  std::size_t steps = 20;
  double e_max = 0.5;
  double c_max = 0.5;
  std::size_t max_n = kDefaultExactCap;
  std::size_t reps = 10'000;
};

void cmd_heatmap(Context& ctx, const HeatmapArgs& a) {
  const Graph g = read_graph(a.model.graph);
  const auto z0 = population_from_hex(g.n(), a.model.z0);
  const auto e_grid = a.e_grid.empty() ? default_grid(a.e_max, a.steps) : a.e_grid;
  const auto c_grid = a.c_grid.empty() ? default_grid(a.c_max, a.steps) : a.c_grid;
  for (double e : e_grid)
    for (double c : c_grid) Params{e, c}.validate();
  const bool exact = g.n() <= a.max_n && g.n() <= kMaxMatrixFreeN;
  const auto map = exact ? extinction_heatmap(g, e_grid, c_grid, a.model.gens, z0.mask(), ctx.workers, a.max_n)
                         : simulated_heatmap(g, e_grid, c_grid, a.model.gens, z0, a.reps, ctx.seed, ctx.workers);
  fs::create_directories(ctx.common.out);
  ctx.write("heatmap.csv", map.to_csv());
  ctx.write("contour.csv", map.contour_csv());
  ctx.manifest(Json{{"heatmap_method", exact ? "exact" : "crude"}});
  *ctx.out << (exact ? "exact" : "crude") << " heatmap " << e_grid.size() << "x" << c_grid.size()
           << ", lambda_A1=" << format_number(map.lambda_a1) << "\n";
}

int fail(std::ostream& err, int code, const std::string& message) {
  err << "secnet: " << message << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extinction-colonisation dynamics on networks", "secnet"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  auto* seed_opt = app.add_option("--seed", common.seed, "Master seed (drawn from entropy when absent)");
  app.add_option("--out", common.out, "Output directory")->capture_default_str();
  app.add_option("--workers", common.workers, "Worker threads (default: SECNET_WORKERS or hardware)");
  app.add_flag("--quiet", common.quiet, "Only print the result line");

  GenerateArgs gen;
  auto* sub_gen = app.add_subcommand("generate", "Generate a connected network with a fixed edge count");
  sub_gen->add_option("--kind", gen.kind, "er, com, lat or pa")->required();
  sub_gen->add_option("--n", gen.n, "Number of patches")->required();
  sub_gen->add_option("--edges", gen.edges, "Number of edges");
  sub_gen->add_option("--density", gen.density, "Edge density in (0, 1]");
  sub_gen->add_option("--power", gen.power, "Preferential attachment power")->capture_default_str();
  sub_gen->add_option("--communities", gen.communities, "Number of communities")->capture_default_str();
  sub_gen->add_option("--ratio", gen.ratio, "Intra/inter community pair weight")->capture_default_str();
  sub_gen->add_option("--pa-sequence", gen.pa_sequence, "PA edge-count law: sequential or uniform")
      ->capture_default_str();
  sub_gen->add_option("--format", gen.format, "json or edges")->capture_default_str()->check(
      CLI::IsMember({"json", "edges"}));

  ExactArgs ex;
  auto* sub_exact = app.add_subcommand("exact", "Exact finite-horizon, quasi-stationary and extinction-time analysis");
  add_model_options(sub_exact, ex.model, false);
  sub_exact->add_option("--max-n", ex.max_n, "Largest patch count accepted")->capture_default_str();

  SimulateArgs sim;
  auto* sub_sim = app.add_subcommand("simulate", "Crude Monte Carlo estimates");
  add_model_options(sub_sim, sim.model, true);
  sub_sim->add_option("--reps", sim.reps, "Number of trajectories")->capture_default_str();
  sub_sim->add_flag("--trajectory", sim.trajectory, "Also write one sample trajectory");

  RareArgs rare;
  auto* sub_rare = app.add_subcommand("rare", "Rare-event estimators (particle system, importance sampling, splitting)");
  add_model_options(sub_rare, rare.model, true);
  sub_rare->add_option("--method", rare.method, "ips, is or split")->required()->check(
      CLI::IsMember({"ips", "is", "split"}));
  sub_rare->add_option("--particles", rare.particles, "ips: particles per batch")->capture_default_str();
  sub_rare->add_option("--batches", rare.batches, "ips: independent batches")->capture_default_str();
  sub_rare->add_flag("--literal", rare.literal, "ips: report the plain product of death fractions");
  sub_rare->add_option("--trajectories", rare.trajectories, "is: number of trajectories")->capture_default_str();
  sub_rare->add_option("--twist-from", rare.twist_from, "is: twisted rate at t=1 (default e)");
  sub_rare->add_option("--twist-to", rare.twist_to, "is: twisted rate at the horizon (default min(3e, 0.9))");
  sub_rare->add_option("--thresholds", rare.thresholds, "split: occupancy thresholds")->delimiter(',');
  sub_rare->add_option("--successes", rare.successes, "split: successes per level")->capture_default_str();
  sub_rare->add_option("--replications", rare.replications, "split: whole-run replications")->capture_default_str();
  sub_rare->add_option("--work-cap", rare.work_cap, "split: attempts allowed per level")->capture_default_str();

  MeanfieldArgs mf;
  auto* sub_mf = app.add_subcommand("meanfield", "Mean-field recurrence and threshold report");
  add_model_options(sub_mf, mf.model, true);
  sub_mf->add_option("--p0", mf.p0, "Uniform initial occupancy probability")->capture_default_str();

  ExperimentArgs exp;
  auto* sub_exp = app.add_subcommand("experiment", "Factorial experiment from a design file or preset");
  sub_exp->add_option("--design", exp.design, "Design JSON file");
  sub_exp->add_option("--preset", exp.preset, "Named design")->check(CLI::IsMember(preset_names()));
  sub_exp->add_option("--reps", exp.reps, "Override crude trajectories per row");
  sub_exp->add_option("--replicates", exp.replicates, "Override replicate networks per cell");
  sub_exp->add_option("--max-order", exp.max_order, "Highest interaction order in the variance table")
      ->capture_default_str();

  HeatmapArgs hm;
  auto* sub_hm = app.add_subcommand("heatmap", "Extinction probability over an (e, c) grid");
  sub_hm->add_option("--graph", hm.model.graph, "Graph file")->required();
  sub_hm->add_option("--gens", hm.model.gens, "Number of generations")->capture_default_str();
  sub_hm->add_option("--z0", hm.model.z0, "Initial occupancy as a hex mask");
  sub_hm->add_option("--e-grid", hm.e_grid, "Extinction rates")->delimiter(',');
  sub_hm->add_option("--c-grid", hm.c_grid, "Colonisation rates")->delimiter(',');
  sub_hm->add_option("--steps", hm.steps, "Default grid size per axis")->capture_default_str();
  sub_hm->add_option("--e-max", hm.e_max, "Default grid upper bound for e")->capture_default_str();
  sub_hm->add_option("--c-max", hm.c_max, "Default grid upper bound for c")->capture_default_str();
  sub_hm->add_option("--max-n", hm.max_n, "Exact cap; larger graphs are simulated")->capture_default_str();
  sub_hm->add_option("--reps", hm.reps, "Trajectories per grid point when simulating")->capture_default_str();

  std::string manifest_path;
  auto* sub_rerun = app.add_subcommand("rerun", "Repeat a run from its manifest.json");
  sub_rerun->add_option("--manifest", manifest_path, "Manifest file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, kUsage, e.what());
  }

  Context ctx;
  ctx.common = common;
  ctx.out = &out;
  ctx.workers = common.workers.value_or(default_workers());
  if (ctx.workers == 0) return fail(err, kUsage, "--workers must be positive");
  ctx.seed = common.seed.value_or(entropy_seed());
  ctx.argv = manifest_argv(args, ctx.seed);

  try {
    if (sub_rerun->parsed()) {
      Json doc;
      try {
        doc = Json::parse(read_text(manifest_path));
      } catch (const nlohmann::json::exception& e) {
        throw IoError(manifest_path + ": " + e.what());
      }
      auto replay = doc.at("argv").get<std::vector<std::string>>();
      replay.push_back("--out");
      replay.push_back(common.out);
      if (common.workers) {
        replay.push_back("--workers");
        replay.push_back(std::to_string(*common.workers));
      }
      return run(replay, out, err);
    }
    if (sub_gen->parsed()) {
      ctx.sub = sub_gen;
      cmd_generate(ctx, gen);
    } else if (sub_exact->parsed()) {
      ctx.sub = sub_exact;
      cmd_exact(ctx, ex);
    } else if (sub_sim->parsed()) {
      ctx.sub = sub_sim;
      cmd_simulate(ctx, sim);
    } else if (sub_rare->parsed()) {
      ctx.sub = sub_rare;
      cmd_rare(ctx, rare);
    } else if (sub_mf->parsed()) {
      ctx.sub = sub_mf;
      cmd_meanfield(ctx, mf);
    } else if (sub_exp->parsed()) {
      ctx.sub = sub_exp;
      ctx.argv = args;
      cmd_experiment(ctx, exp, seed_opt->count() > 0);
    } else if (sub_hm->parsed()) {
      ctx.sub = sub_hm;
      cmd_heatmap(ctx, hm);
    }
  } catch (const InvalidArgument& e) {
    return fail(err, kUsage, e.what());
  } catch (const IoError& e) {
    return fail(err, kIo, e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(err, kIo, e.what());
  } catch (const Error& e) {
    return fail(err, kModule, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(err, kIo, e.what());
  } catch (const std::exception& e) {
    return fail(err, kInternal, e.what());
  }
  return kOk;
}

}  // namespace secnet::cli
