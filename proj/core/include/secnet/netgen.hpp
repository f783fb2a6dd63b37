#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "secnet/graph.hpp"
#include "secnet/rng.hpp"

namespace secnet {

enum class Topology { ER, COM, LAT, PA };

std::string_view to_string(Topology kind) noexcept;
/// Accepts "er", "com", "lat", "pa" in any case. Throws InvalidArgument.
Topology topology_from_string(std::string_view name);

struct TopologySpec {
  Topology kind = Topology::ER;
  std::size_t n = 0;
  std::size_t n_edges = 0;
  double power = 1.0;                ///< PA: attachment weight degree^power
  std::size_t n_communities = 2;     ///< COM
  double intra_inter_ratio = 10.0;   ///< COM: intra / inter pair weight, > 1

  /// Throws InvalidArgument when the spec cannot describe a connected simple graph.
  void validate() const;
};

/// How the per-arrival edge counts of the preferential attachment model are drawn.
enum class PaSequence {
  Sequential,  ///< each m_k uniform over the range that keeps the total reachable
  Uniform,     ///< uniform over every admissible sequence
};

std::string_view to_string(PaSequence law) noexcept;
PaSequence pa_sequence_from_string(std::string_view name);

struct GeneratorOptions {
  std::size_t max_attempts = 10'000;  ///< rejection cap for ER / COM, redraw cap for LAT
  bool lattice_fallback = true;       ///< allow LAT to raise its degree cap by one
  PaSequence pa_sequence = PaSequence::Sequential;
};

/// floor(density * n(n-1)/2), with a 1e-9 guard against products such as
/// 0.7 * 45 landing just below an integer.
std::size_t edges_for_density(std::size_t n, double density);

Graph gen_erdos_renyi(std::size_t n, std::size_t n_edges, Rng& rng, const GeneratorOptions& opts = {});

Graph gen_community(std::size_t n, std::size_t n_edges, std::size_t n_communities, double intra_inter_ratio,
                    Rng& rng, const GeneratorOptions& opts = {});

/// Community of each node: contiguous blocks whose sizes differ by at most one.
std::vector<std::size_t> community_labels(std::size_t n, std::size_t n_communities);

/// ceil(2 n_edges / n).
std::size_t lattice_degree_cap(std::size_t n, std::size_t n_edges);

Graph gen_lattice(std::size_t n, std::size_t n_edges, Rng& rng, const GeneratorOptions& opts = {});

/// Number of edges brought by each arriving node k = 1..n-1 (index k-1 in the
/// result). Each entry lies in [1, k] and the entries sum to n_edges.
std::vector<std::size_t> pa_edge_sequence(std::size_t n, std::size_t n_edges, Rng& rng);
/// Same support, drawn uniformly over all admissible sequences. Needs a table
/// of n * (n_edges - n + 2) doubles; throws CapacityError beyond 2.5e7 entries.
std::vector<std::size_t> pa_edge_sequence_uniform(std::size_t n, std::size_t n_edges, Rng& rng);

Graph gen_pref_attach(std::size_t n, std::size_t n_edges, double power, Rng& rng, const GeneratorOptions& opts = {});

Graph generate(const TopologySpec& spec, Rng& rng, const GeneratorOptions& opts = {});

/// Leading eigenvalue of the adjacency matrix by power iteration on A + I
/// (the shift keeps bipartite graphs from oscillating). Stops when successive
/// Rayleigh quotients differ by less than tol. Throws ConvergenceError.
double leading_adjacency_eigenvalue(const Graph& g, double tol = 1e-10, std::size_t max_iterations = 1'000'000);
/// Unit-norm Perron vector of A, same iteration; stops when no entry moves by
/// more than tol. Entries are positive on a connected graph.
std::vector<double> leading_adjacency_eigenvector(const Graph& g, double tol = 1e-13,
                                                  std::size_t max_iterations = 1'000'000);

struct GraphMetrics {
  std::size_t n = 0;
  std::size_t n_edges = 0;
  double density = 0.0;
  std::vector<std::size_t> degrees;
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;
  double mean_degree = 0.0;
  double lambda_a1 = 0.0;
  std::size_t components = 0;
};

GraphMetrics graph_metrics(const Graph& g);
std::string to_json(const GraphMetrics& m);

}  // namespace secnet
