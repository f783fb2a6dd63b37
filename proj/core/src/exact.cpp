#include "secnet/exact.hpp"

#include <bit>
#include <cmath>
#include <iostream>

#include <Eigen/LU>

#include "secnet/csv.hpp"
#include "secnet/errors.hpp"
#include "secnet/netgen.hpp"
#include "secnet/parallel.hpp"

namespace secnet {

namespace {

// Colonisation outcomes from state z: every superset of z reachable in one
// colonisation phase, with its probability. Built by doubling over the empty
// patches, so the cost is O(2^(#empty)).
class ColonisationRows {
 public:
  ColonisationRows(const Graph& graph, double c) : n_(graph.n()), nb_(graph.neighbor_masks()) {
    stay_empty_.resize(n_ + 1);
    for (std::size_t k = 0; k <= n_; ++k) stay_empty_[k] = std::pow(1.0 - c, static_cast<double>(k));
  }

  void expand(StateMask z) {
    targets_.assign(1, z);
    probs_.assign(1, 1.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const StateMask bit = StateMask{1} << i;
      if (z & bit) continue;
      const double q = stay_empty_[static_cast<std::size_t>(std::popcount(nb_[i] & z))];
      const std::size_t size = targets_.size();
      if (q >= 1.0) continue;  // no occupied neighbor: stays empty
      targets_.resize(2 * size);
      probs_.resize(2 * size);
      for (std::size_t k = 0; k < size; ++k) {
        targets_[size + k] = targets_[k] | bit;
        probs_[size + k] = probs_[k] * (1.0 - q);
        probs_[k] *= q;
      }
    }
  }

  const std::vector<StateMask>& targets() const noexcept { return targets_; }
  const std::vector<double>& probs() const noexcept { return probs_; }

 private:
  std::size_t n_;
  std::vector<StateMask> nb_;
  std::vector<double> stay_empty_;
  std::vector<StateMask> targets_;
  std::vector<double> probs_;
};

void check_post_extinction(const Params& params) {
  if (params.source != ColonisationSource::PostExtinction) {
    throw InvalidArgument("exact analysis implements the post-extinction kernel M = E*C only");
  }
}

// Distribution row vector times E, in place: each occupied bit empties with
// probability e independently.
void apply_extinction(Eigen::VectorXd& v, std::size_t n, double e) {
  const auto states = static_cast<StateMask>(v.size());
  for (std::size_t i = 0; i < n; ++i) {
    const StateMask bit = StateMask{1} << i;
    for (StateMask z = 0; z < states; ++z) {
      if (!(z & bit)) continue;
      const double mass = v[static_cast<Eigen::Index>(z)];
      if (mass == 0.0) continue;
      v[static_cast<Eigen::Index>(z ^ bit)] += e * mass;
      v[static_cast<Eigen::Index>(z)] = (1.0 - e) * mass;
    }
  }
}

HorizonRow summarize(std::size_t t, const Eigen::VectorXd& v, const std::vector<double>& occupancy) {
  HorizonRow row;
  row.t = t;
  row.p_extinct = v[0];
  double mean = 0.0;
  double persist = 0.0;
  for (Eigen::Index z = 1; z < v.size(); ++z) {
    persist += v[z];
    mean += v[z] * occupancy[static_cast<std::size_t>(z)];
  }
  row.p_persist = persist;
  row.mean_occ = mean;
  row.cond_mean_occ = persist > 0.0 ? mean / persist : 0.0;
  return row;
}

std::vector<double> popcounts(std::size_t states) {
  std::vector<double> out(states);
  for (std::size_t z = 0; z < states; ++z) out[z] = std::popcount(static_cast<StateMask>(z));
  return out;
}

void check_z0(std::size_t n, StateMask z0) {
  if ((z0 & ~full_mask(n)) != 0) throw InvalidArgument("initial state has bits beyond n");
}

std::string state_hex(std::size_t n, StateMask z) {
  return Population::from_mask(n, z).hex();
}

}  // namespace

TransitionMatrices build_transition(const Graph& graph, const Params& params, std::size_t max_n) {
  params.validate();
  check_post_extinction(params);
  if (max_n > kMaxDenseExactCap) {
    throw InvalidArgument("dense exact cap cannot exceed " + std::to_string(kMaxDenseExactCap));
  }
  const std::size_t n = graph.n();
  if (n > max_n) {
    throw CapacityError("exact analysis capped at n=" + std::to_string(max_n) + " (graph has n=" +
                        std::to_string(n) + ")");
  }
  if (n > kDefaultExactCap) {
    const double mib = 3.0 * std::ldexp(8.0, static_cast<int>(2 * n)) / (1024.0 * 1024.0);
    std::clog << "secnet: warning: dense exact analysis at n=" << n << " allocates about " << mib << " MiB\n";
  }

  TransitionMatrices tm;
  tm.n = n;
  tm.params = params;
  tm.connected = graph.is_connected();
  const auto states = static_cast<Eigen::Index>(std::size_t{1} << n);
  tm.E = RowMatrix::Zero(states, states);
  tm.C = RowMatrix::Zero(states, states);

  const double e = params.e;
  for (StateMask z = 0; z < static_cast<StateMask>(states); ++z) {
    const int k = std::popcount(z);
    // Enumerate subsets s of z (including z and 0).
    for (StateMask s = z;; s = (s - 1) & z) {
      const int kept = std::popcount(s);
      tm.E(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(s)) =
          std::pow(e, k - kept) * std::pow(1.0 - e, kept);
      if (s == 0) break;
    }
  }

  ColonisationRows rows(graph, params.c);
  for (StateMask z = 0; z < static_cast<StateMask>(states); ++z) {
    rows.expand(z);
    for (std::size_t k = 0; k < rows.targets().size(); ++k) {
      tm.C(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(rows.targets()[k])) = rows.probs()[k];
    }
  }

  // M = E * C. E is the Kronecker product of per-patch 2x2 factors, so the
  // product is applied one bit at a time: row z (bit i set) becomes
  // (1-e) row z + e row z^bit. Rows without the bit are untouched in that pass.
  tm.M = tm.C;
  for (std::size_t i = 0; i < n; ++i) {
    const StateMask bit = StateMask{1} << i;
    for (StateMask z = 0; z < static_cast<StateMask>(states); ++z) {
      if (!(z & bit)) continue;
      tm.M.row(static_cast<Eigen::Index>(z)) =
          (1.0 - e) * tm.M.row(static_cast<Eigen::Index>(z)) + e * tm.M.row(static_cast<Eigen::Index>(z ^ bit));
    }
  }
  return tm;
}

HorizonTable finite_horizon(const TransitionMatrices& tm, StateMask z0, std::size_t n_gen, bool keep_distributions) {
  check_z0(tm.n, z0);
  const auto occupancy = popcounts(tm.states());
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(tm.states()));
  v[static_cast<Eigen::Index>(z0)] = 1.0;

  HorizonTable table;
  table.rows.reserve(n_gen + 1);
  Eigen::VectorXd column = v.transpose();
  table.rows.push_back(summarize(0, column, occupancy));
  if (keep_distributions) table.distributions.push_back(column);
  for (std::size_t t = 1; t <= n_gen; ++t) {
    v = v * tm.M;
    column = v.transpose();
    table.rows.push_back(summarize(t, column, occupancy));
    if (keep_distributions) table.distributions.push_back(column);
  }
  table.final_distribution = column;
  return table;
}

HorizonTable finite_horizon(const Graph& graph, const Params& params, StateMask z0, std::size_t n_gen,
                            bool keep_distributions) {
  params.validate();
  check_post_extinction(params);
  const std::size_t n = graph.n();
  if (n > kMaxMatrixFreeN) {
    throw CapacityError("matrix-free propagation capped at n=" + std::to_string(kMaxMatrixFreeN));
  }
  check_z0(n, z0);
  const std::size_t states = std::size_t{1} << n;
  const auto occupancy = popcounts(states);
  ColonisationRows rows(graph, params.c);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(states));
  Eigen::VectorXd next(static_cast<Eigen::Index>(states));
  v[static_cast<Eigen::Index>(z0)] = 1.0;

  HorizonTable table;
  table.rows.reserve(n_gen + 1);
  table.rows.push_back(summarize(0, v, occupancy));
  if (keep_distributions) table.distributions.push_back(v);
  for (std::size_t t = 1; t <= n_gen; ++t) {
    apply_extinction(v, n, params.e);
    next.setZero();
    for (StateMask z = 0; z < states; ++z) {
      const double mass = v[static_cast<Eigen::Index>(z)];
      if (mass == 0.0) continue;
      rows.expand(z);
      const auto& targets = rows.targets();
      const auto& probs = rows.probs();
      for (std::size_t k = 0; k < targets.size(); ++k) next[static_cast<Eigen::Index>(targets[k])] += mass * probs[k];
    }
    v.swap(next);
    table.rows.push_back(summarize(t, v, occupancy));
    if (keep_distributions) table.distributions.push_back(v);
  }
  table.final_distribution = v;
  return table;
}

std::string HorizonTable::to_csv() const {
  std::string out = "t,p_extinct,p_persist,mean_occ,cond_mean_occ\n";
  for (const auto& row : rows) {
    out += csv_row({std::to_string(row.t), format_number(row.p_extinct), format_number(row.p_persist),
                    format_number(row.mean_occ), format_number(row.cond_mean_occ)});
  }
  return out;
}

QsdResult qsd(const TransitionMatrices& tm, const QsdOptions& opts) {
  const double e = tm.params.e;
  if (!(e > 0.0 && e < 1.0)) throw InvalidArgument("qsd requires e in (0, 1)");
  if (!(tm.params.c > 0.0)) throw InvalidArgument("qsd requires c > 0");
  if (!tm.connected) throw InvalidArgument("qsd requires a connected graph");

  const RowMatrix R = tm.R();
  const Eigen::Index size = R.rows();
  QsdResult result;

  // Left Perron vector: alpha <- alpha R / |alpha R|_1.
  Eigen::RowVectorXd alpha = Eigen::RowVectorXd::Constant(size, 1.0 / static_cast<double>(size));
  Eigen::RowVectorXd next(size);
  double lambda = 0.0;
  bool converged = false;
  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    next.noalias() = alpha * R;
    lambda = next.sum();
    next /= lambda;
    const double change = (next - alpha).lpNorm<1>();
    alpha.swap(next);
    if (change < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("qsd: left power iteration did not converge");
  result.iterations = it + 1;

  // Right Perron vector.
  Eigen::VectorXd h = Eigen::VectorXd::Ones(size);
  Eigen::VectorXd h_next(size);
  converged = false;
  for (std::size_t k = 0; k < opts.max_iterations; ++k) {
    h_next.noalias() = R * h;
    h_next /= h_next.maxCoeff();
    const double change = (h_next - h).lpNorm<Eigen::Infinity>();
    h.swap(h_next);
    if (change < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("qsd: right power iteration did not converge");
  h /= alpha.dot(h.transpose());

  const Eigen::RowVectorXd lhs = alpha * R;
  result.lambda1 = lhs.sum();
  result.residual = (lhs - result.lambda1 * alpha).lpNorm<Eigen::Infinity>();
  result.alpha = alpha.transpose();
  result.survival = h;

  // |lambda2|: power iteration on vectors with y . h = 0. Left eigenvectors of
  // other eigenvalues are orthogonal to h, so the projection removes exactly
  // the Perron component. The modulus is the geometric mean growth over a
  // window, which also settles for complex or negative eigenvalues.
  Rng rng(0x9a11e7ULL);
  Eigen::RowVectorXd y(size);
  for (Eigen::Index k = 0; k < size; ++k) y[k] = rng.uniform01() - 0.5;
  auto project = [&](Eigen::RowVectorXd& vec) { vec -= vec.dot(h.transpose()) * alpha; };
  project(y);
  y /= y.lpNorm<1>();

  constexpr std::size_t kWindow = 64;
  const std::size_t cap = std::min<std::size_t>(opts.max_iterations, 200'000);
  std::vector<double> log_growth;
  log_growth.reserve(cap);
  double previous_estimate = -1.0;
  for (std::size_t k = 0; k < cap; ++k) {
    next.noalias() = y * R;
    project(next);
    const double norm = next.lpNorm<1>();
    if (!(norm > 1e-300)) {
      result.lambda2_modulus = 0.0;
      result.lambda2_converged = true;
      break;
    }
    log_growth.push_back(std::log(norm));
    y = next / norm;
    if (log_growth.size() % kWindow == 0 && log_growth.size() >= 2 * kWindow) {
      double sum = 0.0;
      for (std::size_t j = log_growth.size() - kWindow; j < log_growth.size(); ++j) sum += log_growth[j];
      const double estimate = std::exp(sum / static_cast<double>(kWindow));
      result.lambda2_modulus = estimate;
      if (std::abs(estimate - previous_estimate) < 1e-9) {
        result.lambda2_converged = true;
        break;
      }
      previous_estimate = estimate;
    }
  }
  return result;
}

std::string QsdResult::to_csv(std::size_t n) const {
  std::string out = "state_hex,alpha\n";
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    out += csv_row({state_hex(n, static_cast<StateMask>(k + 1)), format_number(alpha[k])});
  }
  return out;
}

Eigen::VectorXd mean_extinction_times(const TransitionMatrices& tm) {
  if (!(tm.params.e > 0.0)) throw InvalidArgument("mean extinction time is infinite when e = 0 (I - R singular)");
  const RowMatrix R = tm.R();
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(R.rows(), R.cols()) - R;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  const double det_scale = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(det_scale > 1e-14)) throw InvalidArgument("mean extinction time: I - R is singular");
  Eigen::VectorXd m = lu.solve(Eigen::VectorXd::Ones(R.rows()));
  if (!m.allFinite()) throw InvalidArgument("mean extinction time: singular system");
  return m;
}

double mean_extinction_time(const TransitionMatrices& tm, StateMask z0) {
  check_z0(tm.n, z0);
  if (z0 == 0) return 0.0;
  return mean_extinction_times(tm)[static_cast<Eigen::Index>(z0 - 1)];
}

ConvergenceReport convergence_diagnostics(const QsdResult& q, const HorizonTable& horizon, double threshold) {
  if (horizon.rows.size() < 51) throw InvalidArgument("convergence diagnostics need at least 50 generations");
  ConvergenceReport report;
  const std::size_t last = horizon.rows.size() - 1;
  for (std::size_t t = last - 10; t < last; ++t) {
    const double ratio = horizon.rows[t + 1].p_persist / horizon.rows[t].p_persist;
    report.tail_ratios.push_back(ratio);
    report.max_ratio_deviation = std::max(report.max_ratio_deviation, std::abs(ratio - q.lambda1));
  }
  report.tail_ratio = report.tail_ratios.back();

  auto tv_to_alpha = [&](const Eigen::VectorXd& dist) {
    const double persist = dist.tail(dist.size() - 1).sum();
    if (!(persist > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    double tv = 0.0;
    for (Eigen::Index k = 0; k < q.alpha.size(); ++k) tv += std::abs(dist[k + 1] / persist - q.alpha[k]);
    return 0.5 * tv;
  };
  report.tv_at_horizon = tv_to_alpha(horizon.final_distribution);
  if (horizon.distributions.size() == horizon.rows.size()) {
    for (std::size_t t = last >= 20 ? last - 19 : 0; t <= last; ++t) {
      report.tv_series.push_back(tv_to_alpha(horizon.distributions[t]));
    }
  }
  report.spectral_ratio = q.lambda2_modulus / q.lambda1;
  report.quasi_stationary_regime = report.spectral_ratio < threshold * q.lambda1;
  return report;
}

Heatmap extinction_heatmap(const Graph& graph, const std::vector<double>& e_grid, const std::vector<double>& c_grid,
                           std::size_t n_gen, StateMask z0, unsigned workers, std::size_t max_n) {
  if (graph.n() > max_n || graph.n() > kMaxMatrixFreeN) {
    throw CapacityError("exact heatmap capped at n=" + std::to_string(std::min(max_n, kMaxMatrixFreeN)));
  }
  Heatmap map;
  map.e_grid = e_grid;
  map.c_grid = c_grid;
  map.lambda_a1 = leading_adjacency_eigenvalue(graph);
  map.p_extinct.assign(e_grid.size(), std::vector<double>(c_grid.size(), 0.0));

  for (double c : c_grid) {
    const double e = map.lambda_a1 * c;
    if (e <= 1.0) map.contour.push_back({c, e, 0.0});
  }

  const std::size_t grid_points = e_grid.size() * c_grid.size();
  parallel_for(grid_points + map.contour.size(), workers, [&](std::size_t idx) {
    if (idx < grid_points) {
      const std::size_t ie = idx / c_grid.size();
      const std::size_t ic = idx % c_grid.size();
      const Params params{e_grid[ie], c_grid[ic]};
      map.p_extinct[ie][ic] = finite_horizon(graph, params, z0, n_gen).rows.back().p_extinct;
    } else {
      auto& point = map.contour[idx - grid_points];
      point.p_extinct = finite_horizon(graph, Params{point.e, point.c}, z0, n_gen).rows.back().p_extinct;
    }
  });
  return map;
}

std::string Heatmap::to_csv() const {
  std::string out = "e,c,p_extinct\n";
  for (std::size_t ie = 0; ie < e_grid.size(); ++ie)
    for (std::size_t ic = 0; ic < c_grid.size(); ++ic)
      out += csv_row({format_number(e_grid[ie]), format_number(c_grid[ic]), format_number(p_extinct[ie][ic])});
  return out;
}

std::string Heatmap::contour_csv() const {
  std::string out = "c,e,p_extinct\n";
  for (const auto& p : contour) out += csv_row({format_number(p.c), format_number(p.e), format_number(p.p_extinct)});
  return out;
}

}  // namespace secnet
