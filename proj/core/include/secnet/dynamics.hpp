#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "secnet/estimate.hpp"
#include "secnet/graph.hpp"
#include "secnet/rng.hpp"

namespace secnet {

/// Which occupancy feeds the colonisation phase.
enum class ColonisationSource {
  PostExtinction,  ///< survivors of the extinction phase colonise (matches M = E*C)
  PreExtinction,   ///< occupancy at the start of the generation colonises
};

std::string_view to_string(ColonisationSource source) noexcept;
ColonisationSource colonisation_source_from_string(std::string_view name);

struct Params {
  double e = 0.0;  ///< per-generation extinction probability of an occupied patch
  double c = 0.0;  ///< per-generation colonisation probability per occupied neighbor
  ColonisationSource source = ColonisationSource::PostExtinction;

  void validate() const;
};

/// Occupancy bitmask for n <= 64; bit i is patch i. 0 is the coffin state.
using StateMask = std::uint64_t;

constexpr StateMask full_mask(std::size_t n) noexcept {
  return n >= 64 ? ~StateMask{0} : (StateMask{1} << n) - 1;
}

/// Occupancy of n patches, kept both as flags and as a list of occupied ids.
class Population {
 public:
  Population() = default;
  explicit Population(std::size_t n) : flags_(n, 0) {}

  static Population all_occupied(std::size_t n);
  static Population from_mask(std::size_t n, StateMask mask);

  std::size_t n() const noexcept { return flags_.size(); }
  std::size_t count() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool occupied(Node i) const noexcept { return flags_[i] != 0; }
  std::span<const Node> members() const noexcept { return members_; }

  void occupy(Node i);
  void clear();

  /// Requires n <= 64.
  StateMask mask() const;
  /// Lower-case hex of sum_i 2^i over occupied patches, ceil(n/4) digits.
  std::string hex() const;

 private:
  friend class Kernel;
  std::vector<std::uint8_t> flags_;
  std::vector<Node> members_;
};

/// One generation of the extinction-colonisation dynamics on a fixed graph.
///
/// Phase 1: every occupied patch empties independently with the extinction
/// rate. Phase 2: every patch empty after phase 1 is colonised with
/// probability 1 - (1-c)^o, o = number of occupied neighbors in the source
/// state selected by Params::source.
///
/// The kernel keeps scratch buffers; use one instance per thread. The graph
/// must outlive the kernel.
class Kernel {
 public:
  Kernel(const Graph& graph, const Params& params);

  /// Advances z by one generation. Returns the number of extinctions in phase 1.
  std::size_t step(Population& z, Rng& rng) { return step(z, rng, params_.e); }

  /// Same, with the extinction phase run at `extinction_rate` instead of e
  /// (importance sampling twist). Colonisation is unchanged.
  std::size_t step(Population& z, Rng& rng, double extinction_rate);

  const Graph& graph() const noexcept { return *graph_; }
  const Params& params() const noexcept { return params_; }

 private:
  const Graph* graph_;
  Params params_;
  std::vector<double> stay_empty_;  // (1-c)^k
  std::vector<std::uint32_t> pressure_;
  std::vector<Node> touched_;
  std::vector<Node> survivors_;
  std::vector<Node> sources_;
};

/// Mask-level step for n <= 64.
StateMask step(const Graph& graph, const Params& params, StateMask z, Rng& rng);

struct Trajectory {
  std::vector<Population> states;  ///< Z_0 .. Z_{n_gen}

  std::vector<std::size_t> counts() const;
  /// First t > 0 with #Z_t = 0 (t = 0 when started empty), if any.
  std::optional<std::size_t> extinction_time() const;
  /// CSV: generation,occupied_count,state_hex
  std::string to_csv() const;
};

/// Runs n_gen generations from z0. Once the coffin state is reached the
/// remaining states are filled with it.
Trajectory simulate(const Graph& graph, const Params& params, const Population& z0, std::size_t n_gen, Rng& rng);

/// Finite-horizon criteria at every generation t = 0..n_gen.
struct EstimateReport {
  std::vector<Estimate> persistence;            ///< P(#Z_t > 0)
  std::vector<Estimate> occupancy;              ///< E(#Z_t)
  std::vector<Estimate> conditional_occupancy;  ///< E(#Z_t | #Z_t > 0)
  std::vector<std::size_t> survivors;           ///< replicates with #Z_t > 0
  std::size_t n_reps = 0;

  const Estimate& final_persistence() const { return persistence.back(); }
  const Estimate& final_occupancy() const { return occupancy.back(); }
  const Estimate& final_conditional_occupancy() const { return conditional_occupancy.back(); }

  /// CSV: t,persistence,persistence_se,occupancy,occupancy_se,cond_occupancy,cond_occupancy_se,survivors
  std::string to_csv() const;
};

/// Crude Monte Carlo over n_reps independent trajectories. Replicate i uses
/// the stream Rng::stream(seed, {i}); the result does not depend on `workers`.
EstimateReport estimate_crude(const Graph& graph, const Params& params, const Population& z0, std::size_t n_gen,
                              std::size_t n_reps, std::uint64_t seed, unsigned workers = 1);

}  // namespace secnet
