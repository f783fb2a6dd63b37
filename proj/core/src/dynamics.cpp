#include "secnet/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "secnet/csv.hpp"
#include "secnet/errors.hpp"
#include "secnet/parallel.hpp"

namespace secnet {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::Crude: return "crude";
    case Method::IPS: return "ips";
    case Method::IS: return "is";
    case Method::Splitting: return "splitting";
    case Method::Exact: return "exact";
  }
  return "?";
}

std::string_view to_string(ColonisationSource source) noexcept {
  return source == ColonisationSource::PostExtinction ? "post" : "pre";
}

ColonisationSource colonisation_source_from_string(std::string_view name) {
  if (name == "post" || name == "post-extinction") return ColonisationSource::PostExtinction;
  if (name == "pre" || name == "pre-extinction") return ColonisationSource::PreExtinction;
  throw InvalidArgument("unknown colonisation source '" + std::string(name) + "' (expected post or pre)");
}

void Params::validate() const {
  if (!(e >= 0.0 && e <= 1.0)) throw InvalidArgument("extinction rate e must lie in [0, 1]");
  if (!(c >= 0.0 && c <= 1.0)) throw InvalidArgument("colonisation rate c must lie in [0, 1]");
}

Population Population::all_occupied(std::size_t n) {
  Population z(n);
  for (std::size_t i = 0; i < n; ++i) z.occupy(static_cast<Node>(i));
  return z;
}

Population Population::from_mask(std::size_t n, StateMask mask) {
  if (n > 64) throw InvalidArgument("from_mask requires n <= 64");
  if ((mask & ~full_mask(n)) != 0) throw InvalidArgument("state mask has bits beyond n");
  Population z(n);
  for (std::size_t i = 0; i < n; ++i)
    if (mask >> i & 1U) z.occupy(static_cast<Node>(i));
  return z;
}

void Population::occupy(Node i) {
  if (!flags_[i]) {
    flags_[i] = 1;
    members_.push_back(i);
  }
}

void Population::clear() {
  for (Node i : members_) flags_[i] = 0;
  members_.clear();
}

StateMask Population::mask() const {
  if (n() > 64) throw InvalidArgument("mask() requires n <= 64");
  StateMask m = 0;
  for (Node i : members_) m |= StateMask{1} << i;
  return m;
}

std::string Population::hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  const std::size_t width = std::max<std::size_t>(1, (n() + 3) / 4);
  std::string out(width, '0');
  for (Node i : members_) {
    const std::size_t nibble = i / 4;
    auto& ch = out[width - 1 - nibble];
    const int value = static_cast<int>(std::string_view(digits).find(ch)) | (1 << (i % 4));
    ch = digits[value];
  }
  return out;
}

Kernel::Kernel(const Graph& graph, const Params& params) : graph_(&graph), params_(params) {
  params_.validate();
  const std::size_t max_deg = graph.max_degree();
  stay_empty_.resize(max_deg + 1);
  for (std::size_t k = 0; k <= max_deg; ++k) stay_empty_[k] = std::pow(1.0 - params_.c, static_cast<double>(k));
  pressure_.assign(graph.n(), 0);
}

std::size_t Kernel::step(Population& z, Rng& rng, double extinction_rate) {
  const bool pre = params_.source == ColonisationSource::PreExtinction;
  if (pre) sources_.assign(z.members_.begin(), z.members_.end());

  survivors_.clear();
  std::size_t deaths = 0;
  for (Node i : z.members_) {
    if (rng.bernoulli(extinction_rate)) {
      z.flags_[i] = 0;
      ++deaths;
    } else {
      survivors_.push_back(i);
    }
  }
  z.members_.swap(survivors_);

  if (params_.c <= 0.0) return deaths;

  const auto& colonisers = pre ? sources_ : z.members_;
  for (Node i : colonisers) {
    for (Node j : graph_->neighbors(i)) {
      if (z.flags_[j]) continue;
      if (pressure_[j]++ == 0) touched_.push_back(j);
    }
  }
  for (Node j : touched_) {
    if (rng.bernoulli(1.0 - stay_empty_[pressure_[j]])) {
      z.flags_[j] = 1;
      z.members_.push_back(j);
    }
    pressure_[j] = 0;
  }
  touched_.clear();
  return deaths;
}

StateMask step(const Graph& graph, const Params& params, StateMask z, Rng& rng) {
  Kernel kernel(graph, params);
  auto population = Population::from_mask(graph.n(), z);
  kernel.step(population, rng);
  return population.mask();
}

std::vector<std::size_t> Trajectory::counts() const {
  std::vector<std::size_t> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.count());
  return out;
}

std::optional<std::size_t> Trajectory::extinction_time() const {
  if (!states.empty() && states.front().empty()) return 0;
  for (std::size_t t = 1; t < states.size(); ++t)
    if (states[t].empty()) return t;
  return std::nullopt;
}

std::string Trajectory::to_csv() const {
  std::string out = "generation,occupied_count,state_hex\n";
  for (std::size_t t = 0; t < states.size(); ++t) {
    out += csv_row({std::to_string(t), std::to_string(states[t].count()), states[t].hex()});
  }
  return out;
}

Trajectory simulate(const Graph& graph, const Params& params, const Population& z0, std::size_t n_gen, Rng& rng) {
  if (z0.n() != graph.n()) throw InvalidArgument("initial state size does not match the graph");
  Kernel kernel(graph, params);
  Trajectory traj;
  traj.states.reserve(n_gen + 1);
  traj.states.push_back(z0);
  Population z = z0;
  for (std::size_t t = 1; t <= n_gen; ++t) {
    if (!z.empty()) kernel.step(z, rng);
    traj.states.push_back(z);
  }
  return traj;
}

namespace {

struct CrudeAccumulator {
  std::vector<std::uint64_t> survivors;
  std::vector<std::uint64_t> sum;
  std::vector<std::uint64_t> sum_sq;

  explicit CrudeAccumulator(std::size_t length) : survivors(length, 0), sum(length, 0), sum_sq(length, 0) {}

  void add(std::size_t t, std::uint64_t count) {
    if (count == 0) return;
    ++survivors[t];
    sum[t] += count;
    sum_sq[t] += count * count;
  }
};

constexpr std::size_t kCrudeChunk = 256;

}  // namespace

EstimateReport estimate_crude(const Graph& graph, const Params& params, const Population& z0, std::size_t n_gen,
                              std::size_t n_reps, std::uint64_t seed, unsigned workers) {
  if (n_reps < 2) throw InvalidArgument("estimate_crude needs n_reps >= 2");
  if (z0.n() != graph.n()) throw InvalidArgument("initial state size does not match the graph");
  params.validate();

  const std::size_t length = n_gen + 1;
  const std::size_t n_chunks = (n_reps + kCrudeChunk - 1) / kCrudeChunk;
  std::vector<CrudeAccumulator> chunks(n_chunks, CrudeAccumulator(length));

  parallel_for(n_chunks, workers, [&](std::size_t chunk) {
    Kernel kernel(graph, params);
    auto& acc = chunks[chunk];
    const std::size_t begin = chunk * kCrudeChunk;
    const std::size_t end = std::min(n_reps, begin + kCrudeChunk);
    Population z;
    for (std::size_t rep = begin; rep < end; ++rep) {
      auto rng = Rng::stream(seed, {rep});
      z = z0;
      acc.add(0, z.count());
      for (std::size_t t = 1; t <= n_gen && !z.empty(); ++t) {
        kernel.step(z, rng);
        acc.add(t, z.count());
      }
    }
  });

  // Integer sums: the reduction is exact, hence independent of scheduling.
  CrudeAccumulator total(length);
  for (const auto& acc : chunks) {
    for (std::size_t t = 0; t < length; ++t) {
      total.survivors[t] += acc.survivors[t];
      total.sum[t] += acc.sum[t];
      total.sum_sq[t] += acc.sum_sq[t];
    }
  }

  EstimateReport report;
  report.n_reps = n_reps;
  const auto reps = static_cast<double>(n_reps);
  for (std::size_t t = 0; t < length; ++t) {
    const auto k = static_cast<double>(total.survivors[t]);
    const auto sum = static_cast<double>(total.sum[t]);
    const auto sum_sq = static_cast<double>(total.sum_sq[t]);

    Estimate persistence{k / reps, 0.0, Method::Crude, n_reps, n_reps};
    persistence.std_error = std::sqrt(persistence.value * (1.0 - persistence.value) / reps);

    Estimate occupancy{sum / reps, 0.0, Method::Crude, n_reps, n_reps};
    const double var_all = std::max(0.0, (sum_sq - sum * sum / reps) / (reps - 1.0));
    occupancy.std_error = std::sqrt(var_all / reps);

    Estimate conditional{0.0, 0.0, Method::Crude, n_reps, total.survivors[t]};
    if (k > 0) conditional.value = sum / k;
    if (k > 1) {
      const double var_cond = std::max(0.0, (sum_sq - sum * sum / k) / (k - 1.0));
      conditional.std_error = std::sqrt(var_cond / k);
    }

    report.persistence.push_back(persistence);
    report.occupancy.push_back(occupancy);
    report.conditional_occupancy.push_back(conditional);
    report.survivors.push_back(total.survivors[t]);
  }
  return report;
}

std::string EstimateReport::to_csv() const {
  std::string out =
      "t,persistence,persistence_se,occupancy,occupancy_se,cond_occupancy,cond_occupancy_se,survivors\n";
  for (std::size_t t = 0; t < persistence.size(); ++t) {
    out += csv_row({std::to_string(t), format_number(persistence[t].value), format_number(persistence[t].std_error),
                    format_number(occupancy[t].value), format_number(occupancy[t].std_error),
                    format_number(conditional_occupancy[t].value),
                    format_number(conditional_occupancy[t].std_error), std::to_string(survivors[t])});
  }
  return out;
}

}  // namespace secnet
