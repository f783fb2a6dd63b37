#include "secnet/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "secnet/errors.hpp"

namespace secnet {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  for (auto& e : edges_) {
    if (e.u == e.v) throw InvalidArgument("self-loop on node " + std::to_string(e.u));
    if (e.u >= n_ || e.v >= n_) {
      throw InvalidArgument("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") out of range for n=" + std::to_string(n_));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw InvalidArgument("duplicate edge (" + std::to_string(dup->u) + "," + std::to_string(dup->v) + ")");
  }

  std::vector<std::size_t> deg(n_, 0);
  for (const auto& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  offsets_.assign(n_ + 1, 0);
  for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  adjacency_.resize(offsets_[n_]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacency_[fill[e.u]++] = e.v;
    adjacency_[fill[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }
}

std::size_t Graph::max_degree() const noexcept {
  std::size_t best = 0;
  for (std::size_t i = 0; i < n_; ++i) best = std::max(best, degree(static_cast<Node>(i)));
  return best;
}

std::size_t Graph::min_degree() const noexcept {
  if (n_ == 0) return 0;
  std::size_t best = degree(0);
  for (std::size_t i = 1; i < n_; ++i) best = std::min(best, degree(static_cast<Node>(i)));
  return best;
}

bool Graph::has_edge(Node a, Node b) const noexcept {
  if (a >= n_ || b >= n_) return false;
  auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::size_t Graph::component_count() const {
  if (n_ == 0) return 0;
  std::vector<char> seen(n_, 0);
  std::vector<Node> stack;
  std::size_t components = 0;
  for (std::size_t root = 0; root < n_; ++root) {
    if (seen[root]) continue;
    ++components;
    seen[root] = 1;
    stack.push_back(static_cast<Node>(root));
    while (!stack.empty()) {
      const Node i = stack.back();
      stack.pop_back();
      for (Node j : neighbors(i)) {
        if (!seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return components;
}

std::vector<std::uint64_t> Graph::neighbor_masks() const {
  if (n_ > 64) throw InvalidArgument("neighbor_masks requires n <= 64");
  std::vector<std::uint64_t> masks(n_, 0);
  for (const auto& e : edges_) {
    masks[e.u] |= std::uint64_t{1} << e.v;
    masks[e.v] |= std::uint64_t{1} << e.u;
  }
  return masks;
}

Eigen::MatrixXd Graph::adjacency_matrix() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (const auto& e : edges_) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

double Graph::density() const noexcept {
  if (n_ < 2) return 0.0;
  return static_cast<double>(edges_.size()) / (static_cast<double>(n_) * static_cast<double>(n_ - 1) / 2.0);
}

std::uint64_t Graph::fingerprint() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t value) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (value >> (8 * byte)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(n_);
  for (const auto& e : edges_) {
    mix(e.u);
    mix(e.v);
  }
  return h;
}

Graph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (Node i = 0; i < n; ++i)
    for (Node j = i + 1; j < n; ++j) edges.push_back({i, j});
  return Graph(n, std::move(edges));
}

Graph cycle_graph(std::size_t n) {
  if (n < 3) throw InvalidArgument("cycle needs n >= 3");
  std::vector<Edge> edges;
  for (Node i = 0; i < n; ++i) edges.push_back({i, static_cast<Node>((i + 1) % n)});
  return Graph(n, std::move(edges));
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (Node i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph(n, std::move(edges));
}

Graph star_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (Node i = 1; i < n; ++i) edges.push_back({0, i});
  return Graph(n, std::move(edges));
}

std::string to_json(const Graph& g) {
  // Hand-rolled so the byte layout is fixed: {"n": N, "edges": [[u,v],...]}
  std::string out = "{\"n\": " + std::to_string(g.n()) + ", \"edges\": [";
  bool first = true;
  for (const auto& e : g.edges()) {
    if (!first) out += ", ";
    first = false;
    out += "[" + std::to_string(e.u) + ", " + std::to_string(e.v) + "]";
  }
  out += "]}\n";
  return out;
}

Graph graph_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("graph JSON parse error: ") + ex.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("edges")) {
    throw IoError("graph JSON must be an object with \"n\" and \"edges\"");
  }
  try {
    const auto n = doc.at("n").get<std::int64_t>();
    if (n < 0) throw IoError("graph JSON: negative n");
    std::vector<Edge> edges;
    for (const auto& pair : doc.at("edges")) {
      if (!pair.is_array() || pair.size() != 2) throw IoError("graph JSON: each edge must be [u, v]");
      const auto u = pair[0].get<std::int64_t>();
      const auto v = pair[1].get<std::int64_t>();
      if (u < 0 || v < 0) throw IoError("graph JSON: negative node id");
      edges.push_back({static_cast<Node>(u), static_cast<Node>(v)});
    }
    return Graph(static_cast<std::size_t>(n), std::move(edges));
  } catch (const nlohmann::json::exception& ex) {
    throw IoError(std::string("graph JSON: ") + ex.what());
  }
}

std::string to_edge_list(const Graph& g) {
  std::string out = "# n " + std::to_string(g.n()) + "\n";
  for (const auto& e : g.edges()) out += std::to_string(e.u) + " " + std::to_string(e.v) + "\n";
  return out;
}

Graph graph_from_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<std::size_t> declared_n;
  std::vector<Edge> edges;
  std::size_t inferred_n = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first.front() == '#') {
      std::string key;
      std::size_t value = 0;
      if (first == "#" && (fields >> key) && key == "n" && (fields >> value)) declared_n = value;
      continue;
    }
    long long u = 0;
    long long v = 0;
    std::istringstream pair(line);
    if (!(pair >> u >> v) || u < 0 || v < 0) {
      throw IoError("edge list: malformed line " + std::to_string(line_no));
    }
    edges.push_back({static_cast<Node>(u), static_cast<Node>(v)});
    inferred_n = std::max<std::size_t>(inferred_n, static_cast<std::size_t>(std::max(u, v)) + 1);
  }
  return Graph(declared_n.value_or(inferred_n), std::move(edges));
}

Graph read_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open graph file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    if (path.extension() == ".json") return graph_from_json(buffer.str());
    return graph_from_edge_list(buffer.str());
  } catch (const InvalidArgument& ex) {
    throw IoError(path.string() + ": " + ex.what());
  }
}

void write_graph(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write graph file " + path.string());
  out << (path.extension() == ".json" ? to_json(g) : to_edge_list(g));
}

}  // namespace secnet
