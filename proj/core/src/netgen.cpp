#include "secnet/netgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <json.hpp>

#include "secnet/errors.hpp"

namespace secnet {

namespace {

std::size_t max_pairs(std::size_t n) { return n * (n - 1) / 2; }

// Pair index p in [0, n(n-1)/2) to the pair (u, v), u < v, in lexicographic order.
Edge decode_pair(std::size_t n, std::size_t p) {
  std::size_t u = 0;
  std::size_t row = n - 1;
  while (p >= row) {
    p -= row;
    ++u;
    --row;
  }
  return {static_cast<Node>(u), static_cast<Node>(u + 1 + p)};
}

void check_edge_count(std::size_t n, std::size_t n_edges) {
  if (n == 0) throw InvalidArgument("graph needs at least one node");
  if (n_edges + 1 < n) {
    throw InvalidArgument("n_edges=" + std::to_string(n_edges) + " < n-1=" + std::to_string(n - 1) +
                          ": a connected graph is impossible");
  }
  if (n_edges > max_pairs(n)) {
    throw InvalidArgument("n_edges=" + std::to_string(n_edges) + " exceeds n(n-1)/2=" +
                          std::to_string(max_pairs(n)));
  }
}

// Efraimidis-Spirakis keys: the k largest log(u)/w form a weighted sample
// without replacement equivalent to successive draws proportional to w.
double es_key(Rng& rng, double weight) {
  if (weight <= 0.0) return -std::numeric_limits<double>::infinity();
  double u = rng.uniform01();
  while (u == 0.0) u = rng.uniform01();
  return std::log(u) / weight;
}

std::vector<std::size_t> top_k_by_key(std::vector<std::pair<double, std::size_t>>& keyed, std::size_t k) {
  auto greater = [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); };
  std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(k), keyed.end(), greater);
  std::vector<std::size_t> picked;
  picked.reserve(k);
  for (std::size_t i = 0; i < k; ++i) picked.push_back(keyed[i].second);
  return picked;
}

}  // namespace

std::string_view to_string(Topology kind) noexcept {
  switch (kind) {
    case Topology::ER: return "ER";
    case Topology::COM: return "COM";
    case Topology::LAT: return "LAT";
    case Topology::PA: return "PA";
  }
  return "?";
}

Topology topology_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "er") return Topology::ER;
  if (lower == "com") return Topology::COM;
  if (lower == "lat") return Topology::LAT;
  if (lower == "pa") return Topology::PA;
  throw InvalidArgument("unknown topology '" + std::string(name) + "' (expected er, com, lat or pa)");
}

void TopologySpec::validate() const {
  check_edge_count(n, n_edges);
  switch (kind) {
    case Topology::ER: break;
    case Topology::COM:
      if (n_communities == 0 || n_communities > n) throw InvalidArgument("n_communities must lie in [1, n]");
      if (!(intra_inter_ratio > 1.0)) throw InvalidArgument("intra_inter_ratio must be > 1");
      break;
    case Topology::LAT:
      if (n_edges < n && n_edges + 1 != n) throw InvalidArgument("lattice needs n_edges >= n or n_edges == n-1");
      if (n_edges >= n && n < 3) throw InvalidArgument("lattice cycle base needs n >= 3");
      break;
    case Topology::PA:
      if (!(power > 0.0)) throw InvalidArgument("preferential attachment power must be > 0");
      break;
  }
}

std::size_t edges_for_density(std::size_t n, double density) {
  if (!(density >= 0.0 && density <= 1.0)) throw InvalidArgument("density must lie in [0, 1]");
  return static_cast<std::size_t>(std::floor(density * static_cast<double>(max_pairs(n)) + 1e-9));
}

Graph gen_erdos_renyi(std::size_t n, std::size_t n_edges, Rng& rng, const GeneratorOptions& opts) {
  check_edge_count(n, n_edges);
  const std::size_t total = max_pairs(n);
  std::vector<std::size_t> pool(total);
  for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // Partial Fisher-Yates: the first n_edges entries are a uniform subset.
    for (std::size_t i = 0; i < n_edges; ++i) {
      const std::size_t j = i + rng.uniform_index(total - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<Edge> edges;
    edges.reserve(n_edges);
    for (std::size_t i = 0; i < n_edges; ++i) edges.push_back(decode_pair(n, pool[i]));
    Graph g(n, std::move(edges));
    if (g.is_connected()) return g;
  }
  throw InfeasibleError("Erdos-Renyi: no connected graph with n=" + std::to_string(n) + ", n_edges=" +
                        std::to_string(n_edges) + " after " + std::to_string(opts.max_attempts) + " attempts");
}

std::vector<std::size_t> community_labels(std::size_t n, std::size_t n_communities) {
  if (n_communities == 0 || n_communities > n) throw InvalidArgument("n_communities must lie in [1, n]");
  std::vector<std::size_t> labels(n);
  const std::size_t base = n / n_communities;
  const std::size_t extra = n % n_communities;
  std::size_t node = 0;
  for (std::size_t c = 0; c < n_communities; ++c) {
    const std::size_t size = base + (c < extra ? 1 : 0);
    for (std::size_t k = 0; k < size; ++k) labels[node++] = c;
  }
  return labels;
}

Graph gen_community(std::size_t n, std::size_t n_edges, std::size_t n_communities, double intra_inter_ratio,
                    Rng& rng, const GeneratorOptions& opts) {
  TopologySpec{Topology::COM, n, n_edges, 1.0, n_communities, intra_inter_ratio}.validate();
  const auto labels = community_labels(n, n_communities);
  const std::size_t total = max_pairs(n);
  std::vector<Edge> pairs;
  std::vector<double> weights;
  pairs.reserve(total);
  weights.reserve(total);
  for (Node u = 0; u < n; ++u) {
    for (Node v = u + 1; v < n; ++v) {
      pairs.push_back({u, v});
      weights.push_back(labels[u] == labels[v] ? intra_inter_ratio : 1.0);
    }
  }
  std::vector<std::pair<double, std::size_t>> keyed(total);
  for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
    for (std::size_t p = 0; p < total; ++p) keyed[p] = {es_key(rng, weights[p]), p};
    std::vector<Edge> edges;
    edges.reserve(n_edges);
    for (std::size_t p : top_k_by_key(keyed, n_edges)) edges.push_back(pairs[p]);
    Graph g(n, std::move(edges));
    if (g.is_connected()) return g;
  }
  throw InfeasibleError("community model: no connected graph after " + std::to_string(opts.max_attempts) +
                        " attempts");
}

std::size_t lattice_degree_cap(std::size_t n, std::size_t n_edges) {
  if (n == 0) throw InvalidArgument("graph needs at least one node");
  return (2 * n_edges + n - 1) / n;
}

namespace {

// One pass of the cycle-then-fill construction. Returns nothing when the fill
// gets stuck below the cap and raising it is not allowed.
std::optional<Graph> lattice_pass(std::size_t n, std::size_t n_edges, Rng& rng, bool allow_raise) {
  std::vector<std::vector<char>> adjacent(n, std::vector<char>(n, 0));
  std::vector<std::size_t> degree(n, 0);
  std::vector<Edge> edges;
  edges.reserve(n_edges);
  auto add = [&](Node a, Node b) {
    adjacent[a][b] = adjacent[b][a] = 1;
    ++degree[a];
    ++degree[b];
    edges.push_back({a, b});
  };

  const std::size_t base_edges = n_edges + 1 == n ? n - 1 : n;
  for (Node i = 0; i + 1 < n; ++i) add(i, i + 1);
  if (base_edges == n) add(static_cast<Node>(n - 1), 0);

  std::size_t cap = lattice_degree_cap(n, n_edges);
  bool raised = false;
  std::vector<Node> eligible;
  auto refresh_eligible = [&] {
    eligible.clear();
    for (Node i = 0; i < n; ++i)
      if (degree[i] < cap) eligible.push_back(i);
  };
  refresh_eligible();

  while (edges.size() < n_edges) {
    bool placed = false;
    if (eligible.size() >= 2) {
      // Uniform unordered pair of eligible nodes; rejecting adjacent pairs
      // leaves the uniform law over admissible pairs.
      for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
        const std::size_t ia = rng.uniform_index(eligible.size());
        std::size_t ib = rng.uniform_index(eligible.size() - 1);
        if (ib >= ia) ++ib;
        const Node a = eligible[ia];
        const Node b = eligible[ib];
        if (adjacent[a][b]) continue;
        add(a, b);
        placed = true;
      }
      if (!placed) {
        std::vector<Edge> admissible;
        for (std::size_t x = 0; x < eligible.size(); ++x)
          for (std::size_t y = x + 1; y < eligible.size(); ++y)
            if (!adjacent[eligible[x]][eligible[y]]) admissible.push_back({eligible[x], eligible[y]});
        if (!admissible.empty()) {
          const auto& pick = admissible[rng.uniform_index(admissible.size())];
          add(pick.u, pick.v);
          placed = true;
        }
      }
    }
    if (!placed) {
      if (!allow_raise || raised) return std::nullopt;
      ++cap;
      raised = true;
      refresh_eligible();
      continue;
    }
    const Edge& last = edges.back();
    std::erase_if(eligible, [&](Node i) { return (i == last.u || i == last.v) && degree[i] >= cap; });
  }
  return Graph(n, std::move(edges));
}

}  // namespace

Graph gen_lattice(std::size_t n, std::size_t n_edges, Rng& rng, const GeneratorOptions& opts) {
  TopologySpec{Topology::LAT, n, n_edges}.validate();
  // Passes that get stuck, or finish with a degree spread above 2, are
  // redrawn. The raised cap is only tried once every plain pass has failed.
  for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
    auto g = lattice_pass(n, n_edges, rng, false);
    if (g && g->max_degree() - g->min_degree() <= 2) return std::move(*g);
  }
  if (opts.lattice_fallback) {
    if (auto g = lattice_pass(n, n_edges, rng, true)) return std::move(*g);
  }
  throw InfeasibleError("lattice: no completion below degree cap " + std::to_string(lattice_degree_cap(n, n_edges)) +
                        " after " + std::to_string(opts.max_attempts) + " attempts");
}

std::vector<std::size_t> pa_edge_sequence(std::size_t n, std::size_t n_edges, Rng& rng) {
  check_edge_count(n, n_edges);
  std::vector<std::size_t> sequence;
  sequence.reserve(n > 0 ? n - 1 : 0);
  std::size_t remaining = n_edges;
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t min_rest = n - 1 - k;
    const std::size_t max_rest = (n - 1) * n / 2 - k * (k + 1) / 2;
    const std::size_t lo = std::max<std::size_t>(1, remaining > max_rest ? remaining - max_rest : 0);
    const std::size_t hi = std::min(k, remaining - min_rest);
    const std::size_t m = lo + rng.uniform_index(hi - lo + 1);
    sequence.push_back(m);
    remaining -= m;
  }
  return sequence;
}

std::vector<std::size_t> pa_edge_sequence_uniform(std::size_t n, std::size_t n_edges, Rng& rng) {
  check_edge_count(n, n_edges);
  if (n < 2) return {};
  // m_k = 1 + x_k with 0 <= x_k <= k-1 and sum x_k = extra. Row k of the
  // table counts the ways x_1..x_k reach each partial sum, scaled so that
  // its largest entry is 1; only ratios within a row are needed below.
  const std::size_t extra = n_edges - (n - 1);
  const std::size_t width = extra + 1;
  if (static_cast<double>(n) * static_cast<double>(width) > 2.5e7) {
    throw CapacityError("uniform PA sequence table too large for n=" + std::to_string(n) +
                        ", n_edges=" + std::to_string(n_edges));
  }
  std::vector<std::vector<double>> rows(n, std::vector<double>(width, 0.0));
  rows[0][0] = 1.0;
  std::vector<double> prefix(width + 1);
  for (std::size_t k = 1; k < n; ++k) {
    const auto& prev = rows[k - 1];
    prefix[0] = 0.0;
    for (std::size_t s = 0; s < width; ++s) prefix[s + 1] = prefix[s] + prev[s];
    auto& row = rows[k];
    double top = 0.0;
    for (std::size_t s = 0; s < width; ++s) {
      const std::size_t lo = s >= k - 1 ? s - (k - 1) : 0;
      row[s] = prefix[s + 1] - prefix[lo];
      top = std::max(top, row[s]);
    }
    for (double& v : row) v /= top;
  }
  if (!(rows[n - 1][extra] > 0.0)) throw InvalidArgument("no admissible PA edge sequence");

  std::vector<std::size_t> sequence(n - 1);
  std::size_t s = extra;
  std::vector<double> weights;
  for (std::size_t k = n - 1; k >= 1; --k) {
    const std::size_t hi = std::min(k - 1, s);
    weights.assign(hi + 1, 0.0);
    double total = 0.0;
    for (std::size_t x = 0; x <= hi; ++x) total += weights[x] = rows[k - 1][s - x];
    double u = rng.uniform01() * total;
    std::size_t pick = hi;
    for (std::size_t x = 0; x <= hi; ++x) {
      if (weights[x] > 0.0) pick = x;
      if (u < weights[x]) break;
      u -= weights[x];
    }
    sequence[k - 1] = pick + 1;
    s -= pick;
  }
  return sequence;
}

std::string_view to_string(PaSequence law) noexcept {
  return law == PaSequence::Uniform ? "uniform" : "sequential";
}

PaSequence pa_sequence_from_string(std::string_view name) {
  if (name == "sequential") return PaSequence::Sequential;
  if (name == "uniform") return PaSequence::Uniform;
  throw InvalidArgument("unknown PA sequence law '" + std::string(name) + "'");
}

Graph gen_pref_attach(std::size_t n, std::size_t n_edges, double power, Rng& rng, const GeneratorOptions& opts) {
  TopologySpec{Topology::PA, n, n_edges, power}.validate();
  const auto sequence = opts.pa_sequence == PaSequence::Uniform ? pa_edge_sequence_uniform(n, n_edges, rng)
                                                                : pa_edge_sequence(n, n_edges, rng);
  std::vector<std::size_t> degree(n, 0);
  std::vector<Edge> edges;
  edges.reserve(n_edges);
  std::vector<std::pair<double, std::size_t>> keyed;
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t m = sequence[k - 1];
    keyed.resize(k);
    bool any_positive = false;
    for (std::size_t j = 0; j < k; ++j) any_positive = any_positive || degree[j] > 0;
    for (std::size_t j = 0; j < k; ++j) {
      // Only the very first arrival sees a degree-zero population; it then
      // attaches uniformly.
      const double w = any_positive ? std::pow(static_cast<double>(degree[j]), power) : 1.0;
      keyed[j] = {es_key(rng, w), j};
    }
    for (std::size_t target : top_k_by_key(keyed, m)) {
      edges.push_back({static_cast<Node>(target), static_cast<Node>(k)});
      ++degree[target];
      ++degree[k];
    }
  }
  return Graph(n, std::move(edges));
}

Graph generate(const TopologySpec& spec, Rng& rng, const GeneratorOptions& opts) {
  spec.validate();
  switch (spec.kind) {
    case Topology::ER: return gen_erdos_renyi(spec.n, spec.n_edges, rng, opts);
    case Topology::COM:
      return gen_community(spec.n, spec.n_edges, spec.n_communities, spec.intra_inter_ratio, rng, opts);
    case Topology::LAT: return gen_lattice(spec.n, spec.n_edges, rng, opts);
    case Topology::PA: return gen_pref_attach(spec.n, spec.n_edges, spec.power, rng, opts);
  }
  throw InvalidArgument("unknown topology");
}

double leading_adjacency_eigenvalue(const Graph& g, double tol, std::size_t max_iterations) {
  const std::size_t n = g.n();
  if (n == 0) throw InvalidArgument("empty graph");
  if (g.n_edges() == 0) return 0.0;

  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  auto apply_shifted = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = in[i];
      for (Node j : g.neighbors(static_cast<Node>(i))) sum += in[j];
      out[i] = sum;
    }
  };
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t it = 0; it < max_iterations; ++it) {
    apply_shifted(x, y);
    double rayleigh = 0.0;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rayleigh += x[i] * y[i];
      norm2 += y[i] * y[i];
    }
    const double norm = std::sqrt(norm2);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    if (std::abs(rayleigh - previous) < tol) return rayleigh - 1.0;
    previous = rayleigh;
  }
  throw ConvergenceError("leading_adjacency_eigenvalue: no convergence after " + std::to_string(max_iterations) +
                         " iterations");
}

std::vector<double> leading_adjacency_eigenvector(const Graph& g, double tol, std::size_t max_iterations) {
  const std::size_t n = g.n();
  if (n == 0) throw InvalidArgument("empty graph");
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sum = x[i];
      for (Node j : g.neighbors(static_cast<Node>(i))) sum += x[j];
      y[i] = sum;
      norm2 += sum * sum;
    }
    const double norm = std::sqrt(norm2);
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] /= norm;
      moved = std::max(moved, std::abs(y[i] - x[i]));
    }
    x.swap(y);
    if (moved < tol) return x;
  }
  throw ConvergenceError("leading_adjacency_eigenvector: no convergence after " + std::to_string(max_iterations) +
                         " iterations");
}

GraphMetrics graph_metrics(const Graph& g) {
  GraphMetrics m;
  m.n = g.n();
  m.n_edges = g.n_edges();
  m.density = g.density();
  m.degrees.resize(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) m.degrees[i] = g.degree(static_cast<Node>(i));
  if (!m.degrees.empty()) {
    auto [lo, hi] = std::minmax_element(m.degrees.begin(), m.degrees.end());
    m.min_degree = *lo;
    m.max_degree = *hi;
    m.mean_degree = 2.0 * static_cast<double>(m.n_edges) / static_cast<double>(m.n);
    m.lambda_a1 = leading_adjacency_eigenvalue(g);
  }
  m.components = g.component_count();
  return m;
}

std::string to_json(const GraphMetrics& m) {
  nlohmann::ordered_json doc;
  doc["n"] = m.n;
  doc["n_edges"] = m.n_edges;
  doc["density"] = m.density;
  doc["min_degree"] = m.min_degree;
  doc["max_degree"] = m.max_degree;
  doc["mean_degree"] = m.mean_degree;
  doc["lambda_a1"] = m.lambda_a1;
  doc["components"] = m.components;
  doc["degrees"] = m.degrees;
  return doc.dump(2) + "\n";
}

}  // namespace secnet
