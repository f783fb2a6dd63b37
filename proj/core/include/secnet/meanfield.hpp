#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "secnet/dynamics.hpp"
#include "secnet/graph.hpp"

namespace secnet {

/// Independence (mean-field) approximation of the occupancy probabilities:
///
///   p_{i,t+1} = 1 - zeta_{i,t+1} (1 - (1-e) p_{i,t})
///   zeta_{i,t+1} = prod_{j ~ i} (1 - c_eff p_{j,t})
///
/// With Params::source == PreExtinction, c_eff = c: the classical recurrence
/// where generation-t occupancy colonises. With PostExtinction (the default,
/// matching the stochastic kernel) only survivors colonise and c_eff = c (1-e).
double effective_colonisation(const Params& params) noexcept;

struct MeanFieldTrajectory {
  std::vector<std::vector<double>> p;     ///< p[t][i], t = 0..n_gen
  std::vector<std::vector<double>> zeta;  ///< zeta[t][i]; zeta[0] is all ones

  /// CSV: t,i,p
  std::string to_csv() const;
};

MeanFieldTrajectory mf_iterate(const Graph& graph, const Params& params, const std::vector<double>& p0,
                               std::size_t n_gen);

enum class Regime { Subcritical, Critical, Supercritical };
std::string_view to_string(Regime regime) noexcept;

struct ThresholdReport {
  double lambda_a1 = 0.0;
  double c_eff = 0.0;
  double ratio = 0.0;  ///< e / c_eff (infinite when c_eff = 0 and e > 0)
  Regime regime = Regime::Critical;
  std::optional<double> decay_bound;          ///< 1 - e + c_eff lambda_A1, when e/c_eff > lambda_A1
  std::optional<double> observed_tail_ratio;  ///< max over t >= 50 of v.p_{t+1} / v.p_t, v the Perron vector of A
  bool bound_holds = false;
  std::vector<double> fixed_point;            ///< supercritical only
  std::size_t iterations = 0;

  std::string to_json() const;
};

struct ThresholdOptions {
  double tol = 1e-12;                  ///< fixed-point max-norm step
  std::size_t max_iterations = 1'000'000;
  double critical_band = 1e-9;         ///< |e/c_eff - lambda| below this is "critical"
  std::size_t tail_start = 50;
  std::size_t tail_generations = 200;
};

/// Classifies (e, c) against lambda_A1 and backs the classification with the
/// recurrence: fixed point from p0 = 1 when supercritical, geometric decay
/// check when subcritical. Throws ConvergenceError when the fixed-point
/// iteration hits its cap.
ThresholdReport mf_threshold(const Graph& graph, const Params& params, const ThresholdOptions& opts = {});

}  // namespace secnet
