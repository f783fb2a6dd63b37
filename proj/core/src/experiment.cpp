#include "secnet/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include <json.hpp>

#include "secnet/csv.hpp"
#include "secnet/errors.hpp"
#include "secnet/parallel.hpp"
#include "secnet/rareevent.hpp"

namespace secnet {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint64_t kNetworkStream = 0x6e6574;  // "net"
constexpr std::uint64_t kSimStream = 0x73696d;      // "sim"

std::string default_label(const TopologyFactor& t) {
  std::string label(to_string(t.kind));
  std::transform(label.begin(), label.end(), label.begin(), [](unsigned char ch) { return std::toupper(ch); });
  if (t.kind == Topology::PA) label += format_number(t.power);
  return label;
}

EstimatorConfig::Mode mode_from_string(std::string_view name) {
  if (name == "auto") return EstimatorConfig::Mode::Auto;
  if (name == "exact") return EstimatorConfig::Mode::Exact;
  if (name == "crude") return EstimatorConfig::Mode::Crude;
  throw InvalidArgument("unknown estimator method '" + std::string(name) + "' (expected auto, exact or crude)");
}

template <typename T>
T get_or(const Json& doc, const char* key, T fallback) {
  return doc.contains(key) ? doc.at(key).get<T>() : fallback;
}

}  // namespace

std::string_view to_string(EstimatorConfig::Mode mode) noexcept {
  switch (mode) {
    case EstimatorConfig::Mode::Auto: return "auto";
    case EstimatorConfig::Mode::Exact: return "exact";
    case EstimatorConfig::Mode::Crude: return "crude";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Design

std::size_t Design::n_edges_at(std::size_t d_index) const {
  return edge_counts.empty() ? edges_for_density(n, densities.at(d_index)) : edge_counts.at(d_index);
}

void Design::validate() const {
  if (n < 2) throw InvalidArgument("design needs n >= 2");
  if (e_grid.empty()) throw InvalidArgument("design needs at least one e value");
  if (c_grid.empty() == ec_ratios.empty()) throw InvalidArgument("design needs exactly one of c or ec_ratio grids");
  if (densities.empty() == edge_counts.empty())
    throw InvalidArgument("design needs exactly one of density or n_edges grids");
  if (topologies.empty()) throw InvalidArgument("design needs at least one topology");
  if (replicates < 1) throw InvalidArgument("design needs replicates >= 1");
  if (initial_occupied && (*initial_occupied < 1 || *initial_occupied > n))
    throw InvalidArgument("initial_occupied must lie in [1, n]");
  if (estimator.n_reps < 2) throw InvalidArgument("estimator n_reps must be >= 2");
  for (double r : ec_ratios)
    if (!(r > 0.0)) throw InvalidArgument("ec_ratio values must be positive");
  for (double d : densities)
    if (!(d > 0.0 && d <= 1.0)) throw InvalidArgument("density values must lie in (0, 1]");
  for (const auto& cell : design_cells(*this)) Params{cell.e, cell.c, source}.validate();
  for (std::size_t d = 0; d < d_levels(); ++d) {
    for (const auto& t : topologies) {
      TopologySpec spec{t.kind, n, n_edges_at(d), t.power, t.n_communities, t.intra_inter_ratio};
      spec.validate();
    }
  }
  std::vector<std::string> labels;
  for (const auto& t : topologies) labels.push_back(t.label.empty() ? default_label(t) : t.label);
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
    throw InvalidArgument("topology labels must be distinct");
}

std::string Design::to_json() const {
  Json doc;
  doc["name"] = name;
  doc["n"] = n;
  doc["n_gen"] = n_gen;
  doc["e"] = e_grid;
  if (ec_ratios.empty()) doc["c"] = c_grid;
  else doc["ec_ratio"] = ec_ratios;
  if (edge_counts.empty()) doc["density"] = densities;
  else doc["n_edges"] = edge_counts;
  Json topo = Json::array();
  for (const auto& t : topologies) {
    Json entry;
    entry["label"] = t.label.empty() ? default_label(t) : t.label;
    entry["kind"] = std::string(to_string(t.kind));
    if (t.kind == Topology::PA) entry["power"] = t.power;
    if (t.kind == Topology::COM) {
      entry["n_communities"] = t.n_communities;
      entry["ratio"] = t.intra_inter_ratio;
    }
    topo.push_back(entry);
  }
  doc["topologies"] = topo;
  doc["replicates"] = replicates;
  doc["seed"] = seed;
  if (initial_occupied) doc["initial_occupied"] = *initial_occupied;
  doc["source"] = std::string(to_string(source));
  doc["pa_sequence"] = std::string(to_string(pa_sequence));
  Json est;
  est["method"] = std::string(to_string(estimator.mode));
  est["n_reps"] = estimator.n_reps;
  est["exact_cap"] = estimator.exact_cap;
  est["event_threshold"] = estimator.event_threshold;
  est["ips_particles"] = estimator.ips_particles;
  est["ips_batches"] = estimator.ips_batches;
  est["is_trajectories"] = estimator.is_trajectories;
  doc["estimator"] = est;
  return doc.dump(2) + "\n";
}

Design Design::from_json(std::string_view text) {
  Design design;
  try {
    const auto doc = Json::parse(text);
    design.name = get_or<std::string>(doc, "name", "");
    design.n = doc.at("n").get<std::size_t>();
    design.n_gen = doc.at("n_gen").get<std::size_t>();
    design.e_grid = doc.at("e").get<std::vector<double>>();
    if (doc.contains("c")) design.c_grid = doc.at("c").get<std::vector<double>>();
    if (doc.contains("ec_ratio")) design.ec_ratios = doc.at("ec_ratio").get<std::vector<double>>();
    if (doc.contains("density")) design.densities = doc.at("density").get<std::vector<double>>();
    if (doc.contains("n_edges")) design.edge_counts = doc.at("n_edges").get<std::vector<std::size_t>>();
    for (const auto& entry : doc.at("topologies")) {
      TopologyFactor t;
      t.kind = topology_from_string(entry.at("kind").get<std::string>());
      t.power = get_or<double>(entry, "power", 1.0);
      t.n_communities = get_or<std::size_t>(entry, "n_communities", 2);
      t.intra_inter_ratio = get_or<double>(entry, "ratio", 10.0);
      t.label = get_or<std::string>(entry, "label", default_label(t));
      design.topologies.push_back(t);
    }
    design.replicates = get_or<std::size_t>(doc, "replicates", 10);
    design.seed = get_or<std::uint64_t>(doc, "seed", 1);
    if (doc.contains("initial_occupied")) design.initial_occupied = doc.at("initial_occupied").get<std::size_t>();
    design.source = colonisation_source_from_string(get_or<std::string>(doc, "source", "post"));
    design.pa_sequence = pa_sequence_from_string(get_or<std::string>(doc, "pa_sequence", "sequential"));
    if (doc.contains("estimator")) {
      const auto& est = doc.at("estimator");
      auto& cfg = design.estimator;
      cfg.mode = mode_from_string(get_or<std::string>(est, "method", "auto"));
      cfg.n_reps = get_or<std::size_t>(est, "n_reps", cfg.n_reps);
      cfg.exact_cap = get_or<std::size_t>(est, "exact_cap", cfg.exact_cap);
      cfg.event_threshold = get_or<std::size_t>(est, "event_threshold", cfg.event_threshold);
      cfg.ips_particles = get_or<std::size_t>(est, "ips_particles", cfg.ips_particles);
      cfg.ips_batches = get_or<std::size_t>(est, "ips_batches", cfg.ips_batches);
      cfg.is_trajectories = get_or<std::size_t>(est, "is_trajectories", cfg.is_trajectories);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("invalid design JSON: ") + ex.what());
  }
  design.validate();
  return design;
}

std::vector<Cell> design_cells(const Design& design) {
  std::vector<Cell> cells;
  cells.reserve(design.cell_count());
  for (std::size_t ie = 0; ie < design.e_grid.size(); ++ie) {
    for (std::size_t ic = 0; ic < design.c_levels(); ++ic) {
      for (std::size_t id = 0; id < design.d_levels(); ++id) {
        for (std::size_t it = 0; it < design.topologies.size(); ++it) {
          Cell cell;
          cell.index = cells.size();
          cell.e_level = ie;
          cell.c_level = ic;
          cell.d_level = id;
          cell.topology_level = it;
          cell.e = design.e_grid[ie];
          cell.c = design.ec_ratios.empty() ? design.c_grid[ic] : cell.e / design.ec_ratios[ic];
          cell.n_edges = design.n_edges_at(id);
          cells.push_back(cell);
        }
      }
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Factorial run

namespace {

struct Network {
  std::optional<Graph> graph;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

Population initial_state(const Design& design) {
  Population z(design.n);
  const std::size_t k = design.initial_occupied.value_or(design.n);
  for (std::size_t i = 0; i < k; ++i) z.occupy(static_cast<Node>(i));
  return z;
}

void estimate_row(const Design& design, const Graph& graph, const Params& params, const Population& z0,
                  std::uint64_t seed, ResultRow& row) {
  const auto& cfg = design.estimator;
  const bool exact_possible = params.source == ColonisationSource::PostExtinction && design.n <= kMaxMatrixFreeN;
  const bool use_exact = cfg.mode == EstimatorConfig::Mode::Exact ||
                         (cfg.mode == EstimatorConfig::Mode::Auto && design.n <= cfg.exact_cap && exact_possible);
  if (use_exact) {
    if (!exact_possible) throw CapacityError("exact method unavailable for this design");
    const auto table = finite_horizon(graph, params, z0.mask(), design.n_gen);
    const auto& last = table.rows.back();
    row.method = Method::Exact;
    row.persistence = {last.p_persist, 0.0, Method::Exact, 0, 0};
    row.occupancy = {last.mean_occ, 0.0, Method::Exact, 0, 0};
    row.conditional_occupancy = last.cond_mean_occ;
    return;
  }

  const auto crude = estimate_crude(graph, params, z0, design.n_gen, cfg.n_reps, seed, 1);
  const std::size_t survivors = crude.survivors.back();
  const std::size_t extinct = cfg.n_reps - survivors;
  row.method = Method::Crude;
  row.persistence = crude.final_persistence();
  row.occupancy = crude.final_occupancy();
  row.conditional_occupancy = crude.final_conditional_occupancy().value;
  row.n_events = std::min(survivors, extinct);

  if (design.n_gen == 0) return;
  if (survivors < cfg.event_threshold && params.e > 0.0) {
    IpsOptions opts;
    opts.particles = cfg.ips_particles;
    opts.batches = cfg.ips_batches;
    const auto ips = ips_persistence(graph, params, z0, design.n_gen, derive_seed(seed, {1}), opts);
    const double p = ips.persistence.value;
    const double cond = ips.conditional_occupancy.value;
    row.method = Method::IPS;
    row.persistence = ips.persistence;
    row.occupancy = {p * cond,
                     std::hypot(cond * ips.persistence.std_error, p * ips.conditional_occupancy.std_error),
                     Method::IPS, ips.persistence.n_work, ips.persistence.replicates};
    row.conditional_occupancy = cond;
  } else if (extinct < cfg.event_threshold && params.e > 0.0 && params.e < 1.0) {
    const auto schedule = TwistSchedule::default_for(params.e, design.n_gen);
    const auto is = is_extinction(graph, params, z0, design.n_gen, schedule, cfg.is_trajectories,
                                  derive_seed(seed, {2}), 1);
    row.method = Method::IS;
    row.persistence = {1.0 - is.extinction.value, is.extinction.std_error, Method::IS, is.extinction.n_work,
                       is.extinction.replicates};
    row.conditional_occupancy = row.persistence.value > 0.0 ? row.occupancy.value / row.persistence.value : 0.0;
  }
}

}  // namespace

std::vector<ResultRow> run_factorial(const Design& design, unsigned workers) {
  design.validate();
  const auto cells = design_cells(design);
  const std::size_t n_topo = design.topologies.size();
  const std::size_t n_dens = design.d_levels();
  const std::size_t reps = design.replicates;

  std::vector<Network> networks(n_topo * n_dens * reps);
  parallel_for(networks.size(), workers, [&](std::size_t g) {
    const std::size_t r = g % reps;
    const std::size_t d = (g / reps) % n_dens;
    const std::size_t t = g / (reps * n_dens);
    const auto& factor = design.topologies[t];
    auto& net = networks[g];
    try {
      TopologySpec spec{factor.kind, design.n, design.n_edges_at(d), factor.power, factor.n_communities,
                        factor.intra_inter_ratio};
      auto rng = Rng::stream(design.seed, {kNetworkStream, d, r});
      GeneratorOptions gen_opts;
      gen_opts.pa_sequence = design.pa_sequence;
      net.graph = generate(spec, rng, gen_opts);
      net.lambda = leading_adjacency_eigenvalue(*net.graph);
    } catch (const Error& ex) {
      net.error = ex.what();
    }
  });

  const Population z0 = initial_state(design);
  const double pairs = static_cast<double>(design.n) * static_cast<double>(design.n - 1) / 2.0;
  std::vector<ResultRow> rows(cells.size() * reps);
  parallel_for(rows.size(), workers, [&](std::size_t index) {
    const auto start = std::chrono::steady_clock::now();
    const auto& cell = cells[index / reps];
    const std::size_t rep = index % reps;
    const auto& factor = design.topologies[cell.topology_level];
    const auto& net = networks[(cell.topology_level * n_dens + cell.d_level) * reps + rep];

    auto& row = rows[index];
    row.cell = cell;
    row.replicate = rep;
    row.topology = factor.label.empty() ? default_label(factor) : factor.label;
    row.n = design.n;
    row.density = design.densities.empty() ? static_cast<double>(cell.n_edges) / pairs : design.densities[cell.d_level];
    row.lambda_a1 = net.lambda;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.persistence = {nan, nan, Method::Crude, 0, 0};
    row.occupancy = row.persistence;
    row.conditional_occupancy = nan;
    if (!net.graph) {
      row.error = net.error;
    } else {
      row.fingerprint = net.graph->fingerprint();
      try {
        const Params params{cell.e, cell.c, design.source};
        estimate_row(design, *net.graph, params, z0, derive_seed(design.seed, {kSimStream, cell.index, rep}), row);
      } catch (const Error& ex) {
        row.error = ex.what();
      }
    }
    row.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  });
  return rows;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string out =
      "cell,replicate,topology,n,n_edges,density,e,c,fingerprint,lambda_a1,method,persistence,persistence_se,"
      "occupancy,occupancy_se,cond_occupancy,n_events,error\n";
  char hex[17];
  for (const auto& row : rows) {
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(row.fingerprint));
    out += csv_row(std::vector<std::string>{
        std::to_string(row.cell.index), std::to_string(row.replicate), row.topology, std::to_string(row.n),
        std::to_string(row.cell.n_edges), format_number(row.density), format_number(row.cell.e),
        format_number(row.cell.c), hex, format_number(row.lambda_a1),
        row.error.empty() ? std::string(to_string(row.method)) : std::string(),
        format_number(row.persistence.value), format_number(row.persistence.std_error),
        format_number(row.occupancy.value), format_number(row.occupancy.std_error),
        format_number(row.conditional_occupancy), row.n_events ? std::to_string(*row.n_events) : std::string(),
        row.error});
  }
  return out;
}

std::string timings_csv(const std::vector<ResultRow>& rows) {
  std::string out = "cell,replicate,runtime_ms\n";
  for (const auto& row : rows)
    out += csv_row({std::to_string(row.cell.index), std::to_string(row.replicate), format_number(row.runtime_ms)});
  return out;
}

// ---------------------------------------------------------------------------
// Variance decomposition

std::string_view to_string(Response response) noexcept {
  return response == Response::LogitPersistence ? "logit_persistence" : "occupancy";
}

Response response_from_string(std::string_view name) {
  if (name == "logit_persistence" || name == "persistence") return Response::LogitPersistence;
  if (name == "occupancy") return Response::Occupancy;
  throw InvalidArgument("unknown response '" + std::string(name) + "' (expected logit_persistence or occupancy)");
}

double clamped_logit(double p) noexcept {
  const double q = std::clamp(p, kLogitClamp, 1.0 - kLogitClamp);
  return std::log(q / (1.0 - q));
}

VarianceTable variance_decomposition(const std::vector<ResultRow>& rows, Response response, std::size_t max_order) {
  if (rows.empty()) throw InvalidArgument("variance_decomposition needs rows");

  struct Factor {
    std::string name;
    std::size_t Cell::*level;
    std::size_t levels = 0;
  };
  std::vector<Factor> all{{"e", &Cell::e_level}, {"c", &Cell::c_level}, {"d", &Cell::d_level},
                          {"topology", &Cell::topology_level}};
  for (const auto& row : rows) {
    if (!row.error.empty()) throw InvalidArgument("row carries an error: " + row.error);
    for (auto& f : all) f.levels = std::max(f.levels, row.cell.*f.level + 1);
  }
  std::vector<Factor> factors;
  for (const auto& f : all)
    if (f.levels > 1) factors.push_back(f);
  const std::size_t k = factors.size();

  // Balance: every level combination of the active factors holds the same count.
  std::size_t n_cells = 1;
  for (const auto& f : factors) n_cells *= f.levels;
  auto cell_of = [&](const Cell& cell, unsigned subset) {
    std::size_t id = 0;
    for (std::size_t j = 0; j < k; ++j)
      if (subset >> j & 1U) id = id * factors[j].levels + cell.*factors[j].level;
    return id;
  };
  const unsigned full = (1U << k) - 1U;
  std::vector<std::size_t> counts(n_cells, 0);
  for (const auto& row : rows) ++counts[cell_of(row.cell, full)];
  if (std::any_of(counts.begin(), counts.end(), [&](std::size_t c) { return c != counts.front(); }) ||
      counts.front() == 0)
    throw InvalidArgument("variance_decomposition needs a balanced full factorial");

  std::vector<double> y;
  y.reserve(rows.size());
  for (const auto& row : rows) {
    const double value =
        response == Response::LogitPersistence ? clamped_logit(row.persistence.value) : row.occupancy.value;
    if (!std::isfinite(value)) throw InvalidArgument("response is not finite");
    y.push_back(value);
  }
  const auto count = static_cast<double>(y.size());
  double sum_sq = 0.0;
  for (double v : y) sum_sq += v * v;

  // q[S] = sum over level combinations of S of (group sum)^2 / group size.
  std::vector<double> q(std::size_t{1} << k, 0.0);
  for (unsigned subset = 0; subset <= full; ++subset) {
    std::size_t groups = 1;
    for (std::size_t j = 0; j < k; ++j)
      if (subset >> j & 1U) groups *= factors[j].levels;
    std::vector<double> sums(groups, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) sums[cell_of(rows[i].cell, subset)] += y[i];
    const double size = count / static_cast<double>(groups);
    for (double s : sums) q[subset] += s * s / size;
  }

  VarianceTable table;
  table.total_ss = std::max(0.0, sum_sq - q[0]);
  table.degenerate = table.total_ss <= 1e-12 * std::max(1.0, sum_sq);

  std::vector<unsigned> subsets;
  for (unsigned subset = 1; subset <= full; ++subset)
    if (static_cast<std::size_t>(std::popcount(subset)) <= max_order) subsets.push_back(subset);
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](unsigned a, unsigned b) { return std::popcount(a) < std::popcount(b); });

  double explained = 0.0;
  for (unsigned subset : subsets) {
    double ss = 0.0;
    for (unsigned t = subset;; t = (t - 1) & subset) {
      const int sign = (std::popcount(subset) - std::popcount(t)) % 2 == 0 ? 1 : -1;
      ss += sign * q[t];
      if (t == 0) break;
    }
    VarianceTerm term;
    for (std::size_t j = 0; j < k; ++j) {
      if (!(subset >> j & 1U)) continue;
      if (!term.name.empty()) term.name += ':';
      term.name += factors[j].name;
    }
    term.ss = table.degenerate ? 0.0 : std::max(0.0, ss);
    explained += term.ss;
    table.terms.push_back(term);
  }

  if (table.degenerate) {
    table.total_ss = 0.0;
    table.r_squared = std::numeric_limits<double>::quiet_NaN();
    return table;
  }
  table.residual_ss = std::max(0.0, table.total_ss - explained);
  for (auto& term : table.terms) term.share = term.ss / table.total_ss;
  table.residual_share = table.residual_ss / table.total_ss;
  table.r_squared = 1.0 - table.residual_share;
  return table;
}

std::string VarianceTable::to_csv() const {
  std::string out = "term,ss,share\n";
  for (const auto& term : terms) out += csv_row({term.name, format_number(term.ss), format_number(term.share)});
  out += csv_row({"residual", format_number(residual_ss), format_number(residual_share)});
  out += csv_row({"total", format_number(total_ss), degenerate ? "nan" : "1"});
  return out;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

TopologyFactor factor(Topology kind, std::string label, double power = 1.0, std::size_t communities = 2,
                      double ratio = 10.0) {
  return TopologyFactor{std::move(label), kind, power, communities, ratio};
}

Design factorial(std::size_t n) {
  Design d;
  d.n = n;
  d.n_gen = 100;
  d.replicates = 10;
  if (n == 10) {
    d.name = "factorial-n10";
    d.e_grid = {0.05, 0.10, 0.15};
    d.c_grid = {0.01, 0.05, 0.10};
    d.densities = {0.3, 0.5, 0.7};
  } else {
    d.name = "factorial-n100";
    d.e_grid = {0.10, 0.20, 0.25};
    d.c_grid = {0.001, 0.005, 0.010};
    d.densities = {0.05, 0.10, 0.30};
  }
  d.topologies = {factor(Topology::ER, "ER"), factor(Topology::COM, "COM", 1.0, n == 10 ? 2 : 5, 100.0),
                  factor(Topology::LAT, "LAT"), factor(Topology::PA, "PA1", 1.0), factor(Topology::PA, "PA3", 3.0)};
  return d;
}

Design topology_n100() {
  Design d = factorial(100);
  d.name = "topology-n100";
  d.e_grid = {0.25};
  d.c_grid = {0.01};
  d.densities = {0.30};
  d.replicates = 20;
  return d;
}

}  // namespace

std::vector<Design> scenario_presets() {
  struct Row {
    const char* name;
    std::size_t n;
    std::size_t edges;
    Topology kind;
    double ratio;
  };
  static constexpr Row table[] = {
      {"1a", 50, 263, Topology::ER, 1.0},    {"1b", 50, 263, Topology::ER, 5.0},
      {"2a", 50, 263, Topology::PA, 1.0},    {"2b", 50, 263, Topology::PA, 5.0},
      {"3a", 500, 2682, Topology::COM, 1.0}, {"3b", 500, 2682, Topology::COM, 5.0},
      {"4a", 500, 2682, Topology::ER, 1.0},  {"4b", 500, 2682, Topology::ER, 5.0},
      {"5a", 500, 2682, Topology::PA, 1.0},  {"5b", 500, 2682, Topology::PA, 5.0},
  };
  std::vector<Design> out;
  for (const auto& row : table) {
    Design d;
    d.name = row.name;
    d.n = row.n;
    d.n_gen = 30;
    d.e_grid = {0.1, 0.5, 0.8};
    d.ec_ratios = {row.ratio};
    d.edge_counts = {row.edges};
    switch (row.kind) {
      case Topology::COM: d.topologies = {factor(Topology::COM, "COM", 1.0, 10, 10.0)}; break;
      case Topology::PA: d.topologies = {factor(Topology::PA, "PA", 1.0)}; break;
      default: d.topologies = {factor(Topology::ER, "ER")}; break;
    }
    d.replicates = 10;
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names{"factorial-n10", "factorial-n100", "topology-n100"};
  for (const auto& d : scenario_presets()) names.push_back(d.name);
  return names;
}

Design preset(std::string_view name) {
  if (name == "factorial-n10") return factorial(10);
  if (name == "factorial-n100") return factorial(100);
  if (name == "topology-n100") return topology_n100();
  for (auto& d : scenario_presets())
    if (d.name == name) return d;
  throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Scenario comparison

std::string relation_symbol(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == b || a <= 0.0) return "∼";
  const double rel = (a - b) / a;
  if (rel < 0.02) return "∼";
  if (rel < 0.10) return "≳";
  if (rel < 0.50) return ">";
  return "≫";
}

std::vector<CompareRow> scenario_compare(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::size_t, double, double, double>;
  struct Acc {
    double persistence = 0.0;
    double occupancy = 0.0;
    std::size_t count = 0;
  };
  std::map<Key, std::vector<std::pair<std::string, Acc>>> groups;
  for (const auto& row : rows) {
    if (!row.error.empty()) continue;
    auto& list = groups[Key{row.n, row.cell.e, row.cell.c, row.density}];
    auto it = std::find_if(list.begin(), list.end(), [&](const auto& p) { return p.first == row.topology; });
    if (it == list.end()) {
      list.emplace_back(row.topology, Acc{});
      it = std::prev(list.end());
    }
    it->second.persistence += row.persistence.value;
    it->second.occupancy += row.occupancy.value;
    ++it->second.count;
  }

  std::vector<CompareRow> table;
  char buffer[64];
  for (const auto& [key, list] : groups) {
    for (const char* response : {"persistence", "occupancy"}) {
      CompareRow out;
      std::tie(out.n, out.e, out.c, out.density) = key;
      out.response = response;
      for (const auto& [label, acc] : list) {
        const double total = out.response == "persistence" ? acc.persistence : acc.occupancy;
        out.ranking.push_back({label, total / static_cast<double>(acc.count)});
      }
      std::stable_sort(out.ranking.begin(), out.ranking.end(),
                       [](const CompareEntry& a, const CompareEntry& b) { return a.mean > b.mean; });
      for (std::size_t i = 0; i < out.ranking.size(); ++i) {
        if (i > 0) {
          out.relations.push_back(relation_symbol(out.ranking[i - 1].mean, out.ranking[i].mean));
          out.summary += " " + out.relations.back() + " ";
        }
        std::snprintf(buffer, sizeof buffer, "%s=%.3g", out.ranking[i].topology.c_str(), out.ranking[i].mean);
        out.summary += buffer;
      }
      table.push_back(std::move(out));
    }
  }
  return table;
}

std::string compare_csv(const std::vector<CompareRow>& table) {
  std::string out = "n,e,c,density,response,summary\n";
  for (const auto& row : table)
    out += csv_row({std::to_string(row.n), format_number(row.e), format_number(row.c), format_number(row.density),
                    row.response, row.summary});
  return out;
}

// ---------------------------------------------------------------------------

Heatmap simulated_heatmap(const Graph& graph, const std::vector<double>& e_grid, const std::vector<double>& c_grid,
                          std::size_t n_gen, const Population& z0, std::size_t n_reps, std::uint64_t seed,
                          unsigned workers) {
  Heatmap map;
  map.e_grid = e_grid;
  map.c_grid = c_grid;
  map.lambda_a1 = leading_adjacency_eigenvalue(graph);
  map.p_extinct.assign(e_grid.size(), std::vector<double>(c_grid.size(), 0.0));
  for (double c : c_grid) {
    const double e = map.lambda_a1 * c;
    if (e <= 1.0) map.contour.push_back({c, e, 0.0});
  }

  auto extinct = [&](double e, double c, std::size_t k) {
    const auto report = estimate_crude(graph, Params{e, c}, z0, n_gen, n_reps, derive_seed(seed, {k}), 1);
    return 1.0 - report.final_persistence().value;
  };
  const std::size_t grid_points = e_grid.size() * c_grid.size();
  parallel_for(grid_points + map.contour.size(), workers, [&](std::size_t idx) {
    if (idx < grid_points) {
      const std::size_t ie = idx / c_grid.size();
      const std::size_t ic = idx % c_grid.size();
      map.p_extinct[ie][ic] = extinct(e_grid[ie], c_grid[ic], idx);
    } else {
      auto& point = map.contour[idx - grid_points];
      point.p_extinct = extinct(point.e, point.c, idx);
    }
  });
  return map;
}

}  // namespace secnet
