#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "secnet/dynamics.hpp"
#include "secnet/estimate.hpp"
#include "secnet/graph.hpp"

namespace secnet {

// ---------------------------------------------------------------------------
// Interacting particle system (rare persistence)

struct IpsOptions {
  std::size_t particles = 1000;  ///< N per batch, >= 2
  std::size_t batches = 20;      ///< independent batches behind the SE, >= 2
  /// Report the plain product of death fractions as the extinction estimate
  /// instead of 1 - prod(1 - E_t). Debugging aid only; it is biased.
  bool literal_product = false;
  unsigned workers = 1;
};

struct IpsResult {
  Estimate persistence;            ///< P(#Z_{n_gen} > 0)
  Estimate extinction;             ///< 1 - persistence (or the literal product)
  Estimate conditional_occupancy;  ///< E(#Z_{n_gen} | #Z_{n_gen} > 0)
  std::vector<double> death_fraction;  ///< mean E_t over batches, t = 1..n_gen
  std::vector<double> persistence_path;  ///< mean prod_{s<=t}(1 - E_s), t = 1..n_gen
  std::vector<double> batch_values;
  std::size_t degenerate_batches = 0;  ///< batches where every particle died in one step

  bool degenerate() const noexcept { return degenerate_batches > 0; }
  /// CSV: t,death_fraction,persistence
  std::string diagnostics_csv() const;
};

/// Batch b draws from Rng::stream(seed, {b}). Dead particles are replaced by
/// copies of uniformly chosen survivors after every mutation step.
IpsResult ips_persistence(const Graph& graph, const Params& params, const Population& z0, std::size_t n_gen,
                          std::uint64_t seed, const IpsOptions& opts = {});

// ---------------------------------------------------------------------------
// Importance sampling on the extinction phase (rare extinction)

struct TwistSchedule {
  std::vector<double> rates;  ///< e_t for t = 1..n_gen, each in (0, 1)

  static TwistSchedule constant(double rate, std::size_t n_gen);
  /// rates[t-1] = from + (to - from) (t-1)/(n_gen-1)
  static TwistSchedule linear(double from, double to, std::size_t n_gen);
  /// Linear from e up to min(3e, 0.9).
  static TwistSchedule default_for(double e, std::size_t n_gen);

  void validate(std::size_t n_gen) const;
};

struct IsResult {
  Estimate extinction;
  double effective_sample_size = 0.0;  ///< over trajectories with a non-zero weighted indicator
  double max_weight = 0.0;
  std::size_t hits = 0;                        ///< trajectories extinct by n_gen
  std::map<int, std::size_t> log10_histogram;  ///< floor(log10 w) -> count, over hits

  /// CSV: log10_weight_bin,count
  std::string diagnostics_csv() const;
};

/// Trajectory i draws from Rng::stream(seed, {i}).
IsResult is_extinction(const Graph& graph, const Params& params, const Population& z0, std::size_t n_gen,
                       const TwistSchedule& schedule, std::size_t n_traj, std::uint64_t seed, unsigned workers = 1);

// ---------------------------------------------------------------------------
// Fixed-success multilevel splitting (rare extinction)

struct SplittingConfig {
  std::vector<std::size_t> thresholds;  ///< S_1 >= ... >= S_p >= 1; S_{p+1} = 0 is implicit
  std::size_t n_success = 100;          ///< >= 2
  std::size_t replications = 20;        ///< whole-run replications behind the SE
  std::size_t work_cap = 10'000'000;    ///< attempts allowed per level

  /// Sorted descending, duplicates and zeros removed.
  std::vector<std::size_t> levels() const;
  void validate() const;
};

/// Decreasing thresholds spaced geometrically from `from` (exclusive) down to 1.
std::vector<std::size_t> geometric_thresholds(std::size_t from, std::size_t count);

struct SplittingLevel {
  std::size_t threshold = 0;
  double mean_attempts = 0.0;     ///< mean k^m over replications
  double mean_conditional = 0.0;  ///< mean (n_success-1)/(k^m-1)
};

struct SplittingRun {
  std::vector<std::size_t> attempts;   ///< k^m per level
  std::vector<double> conditionals;    ///< (n_success-1)/(k^m-1) per level
  double estimate = 0.0;               ///< product of conditionals, in level order
};

struct SplittingResult {
  Estimate extinction;
  std::vector<SplittingLevel> levels;
  std::vector<SplittingRun> runs;

  /// CSV: level,threshold,mean_attempts,mean_conditional
  std::string diagnostics_csv() const;
};

/// Replication r draws from Rng::stream(seed, {r}). A crossing is detected on
/// the entry state as well, so an entry already at or below S_m counts as a
/// success at its own entry time. Throws WorkCapError when a level needs more
/// than work_cap attempts.
SplittingResult split_extinction(const Graph& graph, const Params& params, const Population& z0, std::size_t n_gen,
                                 const SplittingConfig& config, std::uint64_t seed, unsigned workers = 1);

}  // namespace secnet
