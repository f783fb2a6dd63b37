#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secnet/dynamics.hpp"
#include "secnet/estimate.hpp"
#include "secnet/exact.hpp"
#include "secnet/netgen.hpp"

namespace secnet {

struct TopologyFactor {
  std::string label;  ///< column value in results, e.g. "PA3"
  Topology kind = Topology::ER;
  double power = 1.0;
  std::size_t n_communities = 2;
  double intra_inter_ratio = 10.0;
};

struct EstimatorConfig {
  enum class Mode { Auto, Exact, Crude };
  Mode mode = Mode::Auto;
  std::size_t n_reps = 10'000;             ///< crude trajectories per row
  std::size_t exact_cap = kDefaultExactCap;
  std::size_t event_threshold = 10;        ///< escalate when fewer events are seen
  std::size_t ips_particles = 1'000;
  std::size_t ips_batches = 20;
  std::size_t is_trajectories = 10'000;
};

std::string_view to_string(EstimatorConfig::Mode mode) noexcept;

/// Full factorial design over e x c x density x topology. When `ec_ratios` is
/// non-empty it replaces `c_grid` and c = e / ratio. When `edge_counts` is
/// non-empty it replaces `densities`.
struct Design {
  std::string name;
  std::size_t n = 10;
  std::size_t n_gen = 100;
  std::vector<double> e_grid;
  std::vector<double> c_grid;
  std::vector<double> ec_ratios;
  std::vector<double> densities;
  std::vector<std::size_t> edge_counts;
  std::vector<TopologyFactor> topologies;
  std::size_t replicates = 10;
  std::uint64_t seed = 1;
  std::optional<std::size_t> initial_occupied;  ///< patches 0..k-1 occupied; all when unset
  ColonisationSource source = ColonisationSource::PostExtinction;
  PaSequence pa_sequence = PaSequence::Sequential;
  EstimatorConfig estimator;

  void validate() const;
  std::size_t c_levels() const noexcept { return ec_ratios.empty() ? c_grid.size() : ec_ratios.size(); }
  std::size_t d_levels() const noexcept { return edge_counts.empty() ? densities.size() : edge_counts.size(); }
  std::size_t cell_count() const noexcept {
    return e_grid.size() * c_levels() * d_levels() * topologies.size();
  }
  std::size_t n_edges_at(std::size_t d_index) const;

  std::string to_json() const;
  static Design from_json(std::string_view text);
};

/// One factor combination. Cells are numbered with topology varying fastest,
/// then density, then c, then e.
struct Cell {
  std::size_t index = 0;
  std::size_t e_level = 0;
  std::size_t c_level = 0;
  std::size_t d_level = 0;
  std::size_t topology_level = 0;
  double e = 0.0;
  double c = 0.0;
  std::size_t n_edges = 0;
};

std::vector<Cell> design_cells(const Design& design);

struct ResultRow {
  Cell cell;
  std::size_t replicate = 0;
  std::string topology;
  std::size_t n = 0;
  double density = 0.0;
  std::uint64_t fingerprint = 0;
  double lambda_a1 = 0.0;
  Method method = Method::Exact;
  Estimate persistence;
  Estimate occupancy;
  double conditional_occupancy = 0.0;
  std::optional<std::size_t> n_events;  ///< min(survivors, extinctions) of the crude pass
  std::string error;
  double runtime_ms = 0.0;  ///< kept out of the main CSV
};

/// Runs every (cell, replicate). The network for (topology, density, replicate)
/// is generated once from a stream that does not depend on the topology, e or
/// c, so topologies are paired and every e/c cell sees the same networks.
/// Rows come back sorted by (cell, replicate); the output does not depend on
/// `workers`. Per-row failures are recorded in ResultRow::error.
std::vector<ResultRow> run_factorial(const Design& design, unsigned workers = 1);

/// cell,replicate,topology,n,n_edges,density,e,c,fingerprint,lambda_a1,method,
/// persistence,persistence_se,occupancy,occupancy_se,cond_occupancy,n_events,error
std::string results_csv(const std::vector<ResultRow>& rows);
/// cell,replicate,runtime_ms
std::string timings_csv(const std::vector<ResultRow>& rows);

enum class Response { LogitPersistence, Occupancy };
std::string_view to_string(Response response) noexcept;
Response response_from_string(std::string_view name);

constexpr double kLogitClamp = 1e-6;
double clamped_logit(double p) noexcept;

struct VarianceTerm {
  std::string name;  ///< factor names joined with ':'
  double ss = 0.0;
  double share = 0.0;
};

struct VarianceTable {
  std::vector<VarianceTerm> terms;
  double residual_ss = 0.0;
  double residual_share = 0.0;
  double total_ss = 0.0;
  double r_squared = 0.0;  ///< NaN when degenerate
  bool degenerate = false;  ///< constant response, shares undefined

  /// CSV: term,ss,share (terms, then residual, then total)
  std::string to_csv() const;
};

/// Factorial sum-of-squares decomposition over the categorical factors e, c,
/// d and topology (factors with a single level are skipped). Terms of order
/// above max_order are folded into the residual together with the
/// replicate-to-replicate variation. Throws InvalidArgument on unbalanced
/// input or rows carrying errors.
VarianceTable variance_decomposition(const std::vector<ResultRow>& rows, Response response, std::size_t max_order);

/// The ten network scenarios 1a..5b (n = 50 / 500, 30 generations).
std::vector<Design> scenario_presets();

/// Named designs: "factorial-n10", "factorial-n100", "topology-n100" and the scenario
/// names "1a".."5b". Throws InvalidArgument for unknown names.
Design preset(std::string_view name);
std::vector<std::string> preset_names();

struct CompareEntry {
  std::string topology;
  double mean = 0.0;
};

struct CompareRow {
  std::size_t n = 0;
  double e = 0.0;
  double c = 0.0;
  double density = 0.0;
  std::string response;               ///< "persistence" or "occupancy"
  std::vector<CompareEntry> ranking;  ///< descending mean
  std::vector<std::string> relations;  ///< symbol between ranking[k] and ranking[k+1]
  std::string summary;                 ///< e.g. "PA=0.8 ≫ ER=0.3"
};

/// Relation symbol for a >= b: relative difference (a - b) / a below 2% is
/// "∼", below 10% "≳", below 50% ">", otherwise "≫".
std::string relation_symbol(double a, double b);

/// Groups rows by (n, e, c, density) and ranks topologies by mean response.
std::vector<CompareRow> scenario_compare(const std::vector<ResultRow>& rows);
/// CSV: n,e,c,density,response,summary
std::string compare_csv(const std::vector<CompareRow>& table);

/// Heatmap of crude Monte Carlo extinction frequencies, for graphs beyond the
/// exact cap. Grid point k (e-major, contour points last) uses the stream
/// derive_seed(seed, {k}).
Heatmap simulated_heatmap(const Graph& graph, const std::vector<double>& e_grid, const std::vector<double>& c_grid,
                          std::size_t n_gen, const Population& z0, std::size_t n_reps, std::uint64_t seed,
                          unsigned workers = 1);

}  // namespace secnet
