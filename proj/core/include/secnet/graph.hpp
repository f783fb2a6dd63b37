#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace secnet {

using Node = std::uint32_t;

/// Undirected edge, always stored with u < v.
struct Edge {
  Node u = 0;
  Node v = 0;

  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph with a fixed node count.
///
/// Edges are kept sorted lexicographically, which makes the edge list (and
/// hence the JSON form and the fingerprint) canonical. Neighbor lists are
/// stored in CSR form and are sorted.
class Graph {
 public:
  Graph() = default;

  /// Throws InvalidArgument on self-loops, duplicates or out-of-range ids.
  /// Pairs may be given in either orientation.
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t n() const noexcept { return n_; }
  std::size_t n_edges() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Node> neighbors(Node i) const noexcept {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::size_t degree(Node i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  std::size_t max_degree() const noexcept;
  std::size_t min_degree() const noexcept;  ///< 0 for the empty graph

  bool has_edge(Node a, Node b) const noexcept;

  std::size_t component_count() const;
  bool is_connected() const { return component_count() == 1; }

  /// Bitmask of neighbors per node. Requires n <= 64.
  std::vector<std::uint64_t> neighbor_masks() const;

  /// Symmetric 0/1 adjacency matrix.
  Eigen::MatrixXd adjacency_matrix() const;

  /// Density n_edges / (n(n-1)/2); 0 for n < 2.
  double density() const noexcept;

  /// FNV-1a hash over n and the sorted edge list.
  std::uint64_t fingerprint() const noexcept;

  friend bool operator==(const Graph& a, const Graph& b) noexcept {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Node> adjacency_;
};

Graph complete_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph star_graph(std::size_t n);

/// {"n": int, "edges": [[u,v],...]} with u < v, edges sorted.
std::string to_json(const Graph& g);
Graph graph_from_json(std::string_view text);

/// One "u v" pair per line. A leading "# n <count>" comment fixes the node
/// count; otherwise it is inferred as max id + 1. Other '#' lines are ignored.
std::string to_edge_list(const Graph& g);
Graph graph_from_edge_list(std::string_view text);

/// Dispatch on extension: ".json" uses the JSON form, anything else the edge list.
Graph read_graph(const std::filesystem::path& path);
void write_graph(const std::filesystem::path& path, const Graph& g);

}  // namespace secnet
