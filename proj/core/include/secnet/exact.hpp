#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "secnet/dynamics.hpp"
#include "secnet/graph.hpp"

namespace secnet {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Hard ceiling for dense matrices; the default cap is kDefaultExactCap.
inline constexpr std::size_t kDefaultExactCap = 12;
inline constexpr std::size_t kMaxDenseExactCap = 14;
/// Ceiling for matrix-free distribution propagation.
inline constexpr std::size_t kMaxMatrixFreeN = 20;

/// Exact transition structure over the 2^n occupancy states. Row/column
/// index is the state bitmask; index 0 is the coffin state.
struct TransitionMatrices {
  std::size_t n = 0;
  Params params;
  bool connected = false;
  RowMatrix E;  ///< extinction phase
  RowMatrix C;  ///< colonisation phase
  RowMatrix M;  ///< one generation, M = E * C

  std::size_t states() const noexcept { return std::size_t{1} << n; }
  /// Transient block: M without the coffin row and column.
  auto R() const { return M.bottomRightCorner(M.rows() - 1, M.cols() - 1); }
};

/// Builds E, C and M. Only the post-extinction colonisation source has a
/// product form, so PreExtinction params are rejected. Throws CapacityError
/// when graph.n() > max_n; max_n may be raised to kMaxDenseExactCap (a
/// memory warning is logged above kDefaultExactCap).
TransitionMatrices build_transition(const Graph& graph, const Params& params, std::size_t max_n = kDefaultExactCap);

struct HorizonRow {
  std::size_t t = 0;
  double p_extinct = 0.0;
  double p_persist = 0.0;
  double mean_occ = 0.0;
  double cond_mean_occ = 0.0;  ///< 0 when p_persist == 0
};

struct HorizonTable {
  std::vector<HorizonRow> rows;                  ///< t = 0..n_gen
  Eigen::VectorXd final_distribution;            ///< law of Z_{n_gen} over all 2^n states
  std::vector<Eigen::VectorXd> distributions;    ///< every generation, when requested

  /// CSV: t,p_extinct,p_persist,mean_occ,cond_mean_occ
  std::string to_csv() const;
};

/// Propagates delta_{z0} M^t by vector-matrix products.
HorizonTable finite_horizon(const TransitionMatrices& tm, StateMask z0, std::size_t n_gen,
                            bool keep_distributions = false);

/// Matrix-free propagation (extinction then colonisation applied to the
/// distribution directly); works up to kMaxMatrixFreeN patches without
/// building any 2^n x 2^n matrix.
HorizonTable finite_horizon(const Graph& graph, const Params& params, StateMask z0, std::size_t n_gen,
                            bool keep_distributions = false);

struct QsdOptions {
  double tol = 1e-10;
  std::size_t max_iterations = 1'000'000;
};

struct QsdResult {
  double lambda1 = 0.0;            ///< leading eigenvalue of R
  Eigen::VectorXd alpha;           ///< quasi-stationary law; entry k is state k+1
  Eigen::VectorXd survival;        ///< right Perron vector of R, normalised so alpha . survival = 1
  double lambda2_modulus = 0.0;    ///< |second eigenvalue of R| (deflated iteration)
  bool lambda2_converged = false;
  double residual = 0.0;           ///< max |alpha R - lambda1 alpha|
  std::size_t iterations = 0;

  /// CSV: state_hex,alpha
  std::string to_csv(std::size_t n) const;
};

/// Left power iteration on R with renormalisation; the second eigenvalue
/// modulus comes from power iteration restricted to the complement of the
/// Perron direction. Requires a connected graph, e in (0,1) and c > 0.
/// Throws ConvergenceError if the leading pair does not converge.
QsdResult qsd(const TransitionMatrices& tm, const QsdOptions& opts = {});

/// Expected extinction time from every transient state: solves (I - R) m = 1.
/// Entry k is state k+1. Throws InvalidArgument when I - R is singular (e = 0).
Eigen::VectorXd mean_extinction_times(const TransitionMatrices& tm);
double mean_extinction_time(const TransitionMatrices& tm, StateMask z0);

struct ConvergenceReport {
  std::vector<double> tail_ratios;    ///< persistence(t+1)/persistence(t), last 10 generations
  double tail_ratio = 0.0;            ///< last entry of tail_ratios
  double max_ratio_deviation = 0.0;   ///< max |ratio - lambda1| over the tail
  double tv_at_horizon = 0.0;         ///< TV(law of Z_T given T_0 > T, alpha)
  std::vector<double> tv_series;      ///< TV over the last 20 generations (needs stored distributions)
  double spectral_ratio = 0.0;        ///< |lambda2| / lambda1
  bool quasi_stationary_regime = false;
};

/// Compares the propagated horizon against the spectral picture. The
/// quasi-stationary regime is flagged when |lambda2|/lambda1 < threshold * lambda1.
/// Requires at least 50 generations.
ConvergenceReport convergence_diagnostics(const QsdResult& q, const HorizonTable& horizon, double threshold = 0.5);

struct ContourPoint {
  double c = 0.0;
  double e = 0.0;  ///< lambda_A1 * c
  double p_extinct = 0.0;
};

struct Heatmap {
  std::vector<double> e_grid;
  std::vector<double> c_grid;
  std::vector<std::vector<double>> p_extinct;  ///< [e index][c index]
  double lambda_a1 = 0.0;
  std::vector<ContourPoint> contour;           ///< e = lambda_A1 c for every c in the grid with e <= 1

  /// CSV: e,c,p_extinct
  std::string to_csv() const;
  /// CSV: c,e,p_extinct
  std::string contour_csv() const;
};

/// Exact P(#Z_{n_gen} = 0) over the (e, c) grid plus the mean-field frontier.
/// Throws CapacityError when graph.n() > max_n.
Heatmap extinction_heatmap(const Graph& graph, const std::vector<double>& e_grid, const std::vector<double>& c_grid,
                           std::size_t n_gen, StateMask z0, unsigned workers = 1,
                           std::size_t max_n = kDefaultExactCap);

}  // namespace secnet
