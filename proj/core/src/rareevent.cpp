#include "secnet/rareevent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "secnet/csv.hpp"
#include "secnet/errors.hpp"
#include "secnet/parallel.hpp"

namespace secnet {

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& values) {
  MeanSe out;
  if (values.empty()) return out;
  const auto count = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (count - 1.0) / count);
  }
  return out;
}

void check_inputs(const Graph& graph, const Params& params, const Population& z0) {
  params.validate();
  if (z0.n() != graph.n()) throw InvalidArgument("initial state size does not match the graph");
}

struct IpsBatch {
  std::vector<double> death_fraction;
  std::vector<double> path;
  double persistence = 0.0;
  double literal = 0.0;
  double conditional = 0.0;
  bool degenerate = false;
};

IpsBatch run_ips_batch(const Graph& graph, const Params& params, const Population& z0, std::size_t n_gen,
                       std::size_t n_particles, Rng& rng) {
  IpsBatch batch;
  batch.death_fraction.assign(n_gen, 0.0);
  batch.path.assign(n_gen, 0.0);
  if (z0.empty()) {
    if (n_gen > 0) batch.death_fraction.assign(n_gen, 1.0);
    batch.literal = n_gen > 0 ? 1.0 : 0.0;
    return batch;
  }

  Kernel kernel(graph, params);
  std::vector<Population> particles(n_particles, z0);
  std::vector<std::size_t> alive;
  std::vector<std::size_t> dead;
  double product = 1.0;
  double literal = 1.0;
  for (std::size_t t = 0; t < n_gen; ++t) {
    alive.clear();
    dead.clear();
    for (std::size_t i = 0; i < n_particles; ++i) {
      kernel.step(particles[i], rng);
      (particles[i].empty() ? dead : alive).push_back(i);
    }
    const double fraction = static_cast<double>(dead.size()) / static_cast<double>(n_particles);
    batch.death_fraction[t] = fraction;
    product *= 1.0 - fraction;
    literal *= fraction;
    batch.path[t] = product;
    if (alive.empty()) {
      batch.degenerate = true;
      std::fill(batch.path.begin() + static_cast<std::ptrdiff_t>(t), batch.path.end(), 0.0);
      std::fill(batch.death_fraction.begin() + static_cast<std::ptrdiff_t>(t) + 1, batch.death_fraction.end(), 1.0);
      batch.persistence = 0.0;
      batch.literal = literal;
      return batch;
    }
    for (std::size_t i : dead) particles[i] = particles[alive[rng.uniform_index(alive.size())]];
  }
  batch.persistence = product;
  batch.literal = n_gen > 0 ? literal : 0.0;
  double occupied = 0.0;
  for (const auto& z : particles) occupied += static_cast<double>(z.count());
  batch.conditional = occupied / static_cast<double>(n_particles);
  return batch;
}

}  // namespace

// ---------------------------------------------------------------------------

IpsResult ips_persistence(const Graph& graph, const Params& params, const Population& z0, std::size_t n_gen,
                          std::uint64_t seed, const IpsOptions& opts) {
  check_inputs(graph, params, z0);
  if (opts.particles < 2) throw InvalidArgument("ips_persistence needs at least 2 particles");
  if (opts.batches < 2) throw InvalidArgument("ips_persistence needs at least 2 batches");

  std::vector<IpsBatch> batches(opts.batches);
  parallel_for(opts.batches, opts.workers, [&](std::size_t b) {
    auto rng = Rng::stream(seed, {b});
    batches[b] = run_ips_batch(graph, params, z0, n_gen, opts.particles, rng);
  });

  IpsResult result;
  std::vector<double> persistence;
  std::vector<double> literal;
  std::vector<double> conditional;
  result.death_fraction.assign(n_gen, 0.0);
  result.persistence_path.assign(n_gen, 0.0);
  for (const auto& batch : batches) {
    persistence.push_back(batch.persistence);
    literal.push_back(batch.literal);
    if (!batch.degenerate && !z0.empty()) conditional.push_back(batch.conditional);
    if (batch.degenerate) ++result.degenerate_batches;
    for (std::size_t t = 0; t < n_gen; ++t) {
      result.death_fraction[t] += batch.death_fraction[t];
      result.persistence_path[t] += batch.path[t];
    }
  }
  const auto count = static_cast<double>(opts.batches);
  for (std::size_t t = 0; t < n_gen; ++t) {
    result.death_fraction[t] /= count;
    result.persistence_path[t] /= count;
  }

  const std::size_t work = opts.particles * opts.batches;
  const auto p = mean_and_se(persistence);
  result.persistence = {p.mean, p.se, Method::IPS, work, opts.batches};
  if (opts.literal_product) {
    const auto l = mean_and_se(literal);
    result.extinction = {l.mean, l.se, Method::IPS, work, opts.batches};
  } else {
    result.extinction = {1.0 - p.mean, p.se, Method::IPS, work, opts.batches};
  }
  const auto occ = mean_and_se(conditional);
  result.conditional_occupancy = {occ.mean, occ.se, Method::IPS, work, conditional.size()};
  result.batch_values = std::move(persistence);
  return result;
}

std::string IpsResult::diagnostics_csv() const {
  std::string out = "t,death_fraction,persistence\n";
  for (std::size_t t = 0; t < death_fraction.size(); ++t)
    out += csv_row({std::to_string(t + 1), format_number(death_fraction[t]), format_number(persistence_path[t])});
  return out;
}

// ---------------------------------------------------------------------------

TwistSchedule TwistSchedule::constant(double rate, std::size_t n_gen) { return {std::vector<double>(n_gen, rate)}; }

TwistSchedule TwistSchedule::linear(double from, double to, std::size_t n_gen) {
  TwistSchedule schedule;
  schedule.rates.resize(n_gen);
  for (std::size_t t = 0; t < n_gen; ++t) {
    const double s = n_gen > 1 ? static_cast<double>(t) / static_cast<double>(n_gen - 1) : 0.0;
    schedule.rates[t] = from + (to - from) * s;
  }
  return schedule;
}

TwistSchedule TwistSchedule::default_for(double e, std::size_t n_gen) {
  return linear(e, std::max(e, std::min(3.0 * e, 0.9)), n_gen);
}

void TwistSchedule::validate(std::size_t n_gen) const {
  if (rates.size() != n_gen) throw InvalidArgument("twist schedule length must equal n_gen");
  for (double r : rates)
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("twisted extinction rates must lie in (0, 1)");
}

IsResult is_extinction(const Graph& graph, const Params& params, const Population& z0, std::size_t n_gen,
                       const TwistSchedule& schedule, std::size_t n_traj, std::uint64_t seed, unsigned workers) {
  check_inputs(graph, params, z0);
  if (!(params.e > 0.0 && params.e < 1.0)) throw InvalidArgument("is_extinction requires e in (0, 1)");
  if (n_traj < 2) throw InvalidArgument("is_extinction needs at least 2 trajectories");
  schedule.validate(n_gen);

  const double e = params.e;
  std::vector<double> log_die(n_gen);
  std::vector<double> log_live(n_gen);
  for (std::size_t t = 0; t < n_gen; ++t) {
    log_die[t] = std::log(e / schedule.rates[t]);
    log_live[t] = std::log((1.0 - e) / (1.0 - schedule.rates[t]));
  }

  std::vector<double> weights(n_traj, 0.0);
  constexpr std::size_t kChunk = 256;
  const std::size_t n_chunks = (n_traj + kChunk - 1) / kChunk;
  parallel_for(n_chunks, workers, [&](std::size_t chunk) {
    Kernel kernel(graph, params);
    Population z;
    const std::size_t end = std::min(n_traj, (chunk + 1) * kChunk);
    for (std::size_t i = chunk * kChunk; i < end; ++i) {
      auto rng = Rng::stream(seed, {i});
      z = z0;
      double log_ratio = 0.0;
      for (std::size_t t = 0; t < n_gen && !z.empty(); ++t) {
        const auto before = static_cast<double>(z.count());
        const auto deaths = static_cast<double>(kernel.step(z, rng, schedule.rates[t]));
        if (deaths > 0.0) log_ratio += deaths * log_die[t];
        if (before > deaths) log_ratio += (before - deaths) * log_live[t];
      }
      weights[i] = z.empty() ? std::exp(log_ratio) : 0.0;
    }
  });

  IsResult result;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double w : weights) {
    if (w <= 0.0) continue;
    ++result.hits;
    sum += w;
    sum_sq += w * w;
    result.max_weight = std::max(result.max_weight, w);
    ++result.log10_histogram[static_cast<int>(std::floor(std::log10(w)))];
  }
  const auto count = static_cast<double>(n_traj);
  const double mean = sum / count;
  double ss = 0.0;
  for (double w : weights) ss += (w - mean) * (w - mean);
  result.extinction = {mean, std::sqrt(ss / (count - 1.0) / count), Method::IS, n_traj, n_traj};
  result.effective_sample_size = sum_sq > 0.0 ? sum * sum / sum_sq : 0.0;
  return result;
}

std::string IsResult::diagnostics_csv() const {
  std::string out = "log10_weight_bin,count\n";
  for (const auto& [bin, count] : log10_histogram) out += csv_row({std::to_string(bin), std::to_string(count)});
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> SplittingConfig::levels() const {
  std::vector<std::size_t> out;
  for (std::size_t s : thresholds)
    if (s > 0) out.push_back(s);
  std::sort(out.begin(), out.end(), std::greater<>());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void SplittingConfig::validate() const {
  if (n_success < 2) throw InvalidArgument("splitting needs n_success >= 2");
  if (replications < 1) throw InvalidArgument("splitting needs at least one replication");
  if (work_cap < n_success) throw InvalidArgument("splitting work cap is below n_success");
}

std::vector<std::size_t> geometric_thresholds(std::size_t from, std::size_t count) {
  std::vector<std::size_t> out;
  if (from <= 1 || count == 0) return out;
  const double ratio = std::pow(1.0 / static_cast<double>(from), 1.0 / static_cast<double>(count));
  for (std::size_t m = 1; m <= count; ++m) {
    const double level = static_cast<double>(from) * std::pow(ratio, static_cast<double>(m));
    const auto s = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(level)));
    if (s < from && (out.empty() || s < out.back())) out.push_back(s);
  }
  return out;
}

namespace {

struct Entry {
  std::size_t time = 0;
  Population state;
};

SplittingRun run_splitting(const Graph& graph, const Params& params, const Population& z0, std::size_t n_gen,
                           const std::vector<std::size_t>& levels, const SplittingConfig& config, Rng& rng) {
  Kernel kernel(graph, params);
  std::vector<Entry> entries(config.n_success, Entry{0, z0});
  std::vector<Entry> next;
  SplittingRun run;
  run.estimate = 1.0;
  Population z;
  for (std::size_t m = 0; m <= levels.size(); ++m) {
    const std::size_t threshold = m < levels.size() ? levels[m] : 0;
    next.clear();
    std::size_t attempts = 0;
    while (next.size() < config.n_success) {
      if (++attempts > config.work_cap)
        throw WorkCapError("splitting exceeded the work cap at threshold " + std::to_string(threshold));
      const auto& entry = entries[rng.uniform_index(entries.size())];
      z = entry.state;
      std::size_t t = entry.time;
      bool crossed = z.count() <= threshold;
      while (!crossed && t < n_gen) {
        kernel.step(z, rng);
        ++t;
        crossed = z.count() <= threshold;
      }
      if (crossed) next.push_back(Entry{t, z});
    }
    entries.swap(next);
    const double conditional =
        static_cast<double>(config.n_success - 1) / static_cast<double>(attempts - 1);
    run.attempts.push_back(attempts);
    run.conditionals.push_back(conditional);
    run.estimate *= conditional;
  }
  return run;
}

}  // namespace

SplittingResult split_extinction(const Graph& graph, const Params& params, const Population& z0, std::size_t n_gen,
                                 const SplittingConfig& config, std::uint64_t seed, unsigned workers) {
  check_inputs(graph, params, z0);
  config.validate();
  const auto levels = config.levels();

  SplittingResult result;
  result.runs.resize(config.replications);
  parallel_for(config.replications, workers, [&](std::size_t r) {
    auto rng = Rng::stream(seed, {r});
    result.runs[r] = run_splitting(graph, params, z0, n_gen, levels, config, rng);
  });

  std::vector<double> values;
  std::size_t work = 0;
  for (const auto& run : result.runs) {
    values.push_back(run.estimate);
    work += std::accumulate(run.attempts.begin(), run.attempts.end(), std::size_t{0});
  }
  const auto stats = mean_and_se(values);
  result.extinction = {stats.mean, stats.se, Method::Splitting, work, config.replications};

  const auto reps = static_cast<double>(config.replications);
  for (std::size_t m = 0; m <= levels.size(); ++m) {
    SplittingLevel level;
    level.threshold = m < levels.size() ? levels[m] : 0;
    for (const auto& run : result.runs) {
      level.mean_attempts += static_cast<double>(run.attempts[m]) / reps;
      level.mean_conditional += run.conditionals[m] / reps;
    }
    result.levels.push_back(level);
  }
  return result;
}

std::string SplittingResult::diagnostics_csv() const {
  std::string out = "level,threshold,mean_attempts,mean_conditional\n";
  for (std::size_t m = 0; m < levels.size(); ++m)
    out += csv_row({std::to_string(m + 1), std::to_string(levels[m].threshold), format_number(levels[m].mean_attempts),
                    format_number(levels[m].mean_conditional)});
  return out;
}

}  // namespace secnet
