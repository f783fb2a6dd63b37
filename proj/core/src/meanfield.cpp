#include "secnet/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "secnet/csv.hpp"
#include "secnet/errors.hpp"
#include "secnet/netgen.hpp"

namespace secnet {

namespace {

// One application of the recurrence; writes p_next and zeta_next.
void advance(const Graph& graph, double e, double c_eff, const std::vector<double>& p, std::vector<double>& p_next,
             std::vector<double>& zeta_next) {
  for (std::size_t i = 0; i < graph.n(); ++i) {
    // 1 - zeta p e - zeta (1 - p), rearranged so tiny p does not cancel out.
    double log_zeta = 0.0;
    for (Node j : graph.neighbors(static_cast<Node>(i))) log_zeta += std::log1p(-c_eff * p[j]);
    const double zeta = std::exp(log_zeta);
    zeta_next[i] = zeta;
    p_next[i] = std::clamp(-std::expm1(log_zeta) + zeta * p[i] * (1.0 - e), 0.0, 1.0);
  }
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

double effective_colonisation(const Params& params) noexcept {
  return params.source == ColonisationSource::PreExtinction ? params.c : params.c * (1.0 - params.e);
}

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
  }
  return "?";
}

MeanFieldTrajectory mf_iterate(const Graph& graph, const Params& params, const std::vector<double>& p0,
                               std::size_t n_gen) {
  params.validate();
  if (p0.size() != graph.n()) throw InvalidArgument("p0 size does not match the graph");
  for (double value : p0)
    if (!(value >= 0.0 && value <= 1.0)) throw InvalidArgument("p0 entries must lie in [0, 1]");

  const double c_eff = effective_colonisation(params);
  MeanFieldTrajectory traj;
  traj.p.reserve(n_gen + 1);
  traj.zeta.reserve(n_gen + 1);
  traj.p.push_back(p0);
  traj.zeta.emplace_back(graph.n(), 1.0);
  std::vector<double> p_next(graph.n());
  std::vector<double> zeta_next(graph.n());
  for (std::size_t t = 0; t < n_gen; ++t) {
    advance(graph, params.e, c_eff, traj.p.back(), p_next, zeta_next);
    traj.p.push_back(p_next);
    traj.zeta.push_back(zeta_next);
  }
  return traj;
}

std::string MeanFieldTrajectory::to_csv() const {
  std::string out = "t,i,p\n";
  for (std::size_t t = 0; t < p.size(); ++t)
    for (std::size_t i = 0; i < p[t].size(); ++i)
      out += csv_row({std::to_string(t), std::to_string(i), format_number(p[t][i])});
  return out;
}

ThresholdReport mf_threshold(const Graph& graph, const Params& params, const ThresholdOptions& opts) {
  params.validate();
  if (!graph.is_connected()) throw InvalidArgument("mf_threshold requires a connected graph");

  ThresholdReport report;
  report.lambda_a1 = leading_adjacency_eigenvalue(graph);
  report.c_eff = effective_colonisation(params);
  const double e = params.e;
  if (report.c_eff > 0.0) {
    report.ratio = e / report.c_eff;
  } else {
    report.ratio = e > 0.0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
  }

  if (std::isnan(report.ratio) || std::abs(report.ratio - report.lambda_a1) < opts.critical_band) {
    report.regime = Regime::Critical;
  } else if (report.ratio > report.lambda_a1) {
    report.regime = Regime::Subcritical;
  } else {
    report.regime = Regime::Supercritical;
  }

  const std::size_t n = graph.n();
  std::vector<double> p(n, 1.0);
  std::vector<double> p_next(n);
  std::vector<double> zeta(n);

  if (report.regime == Regime::Subcritical) {
    report.decay_bound = 1.0 - e + report.c_eff * report.lambda_a1;
    // The recurrence is dominated entrywise by L = (1-e) I + c_eff A, and
    // v^T L = bound v^T for the Perron vector v, so the v-weighted mass
    // shrinks by at most the bound at every step.
    const auto v = leading_adjacency_eigenvector(graph);
    auto weighted = [&v](const std::vector<double>& x) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += v[i] * x[i];
      return s;
    };
    double worst = 0.0;
    bool any = false;
    for (std::size_t t = 0; t < opts.tail_generations; ++t) {
      advance(graph, e, report.c_eff, p, p_next, zeta);
      const double before = weighted(p);
      const double after = weighted(p_next);
      p.swap(p_next);
      if (t >= opts.tail_start && max_of(p_next) > 1e-250) {
        worst = any ? std::max(worst, after / before) : after / before;
        any = true;
      }
    }
    if (any) {
      report.observed_tail_ratio = worst;
      report.bound_holds = worst <= *report.decay_bound + 1e-9;
    } else {
      // Mass vanished before the tail window (e.g. e = 1).
      report.observed_tail_ratio = 0.0;
      report.bound_holds = true;
    }
    report.iterations = opts.tail_generations;
  } else if (report.regime == Regime::Supercritical) {
    std::size_t it = 0;
    for (; it < opts.max_iterations; ++it) {
      advance(graph, e, report.c_eff, p, p_next, zeta);
      double step = 0.0;
      for (std::size_t i = 0; i < n; ++i) step = std::max(step, std::abs(p_next[i] - p[i]));
      p.swap(p_next);
      if (step < opts.tol) break;
    }
    if (it == opts.max_iterations) throw ConvergenceError("mf_threshold: fixed-point iteration did not converge");
    report.fixed_point = p;
    report.iterations = it + 1;
  }
  return report;
}

std::string ThresholdReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["lambda_a1"] = lambda_a1;
  doc["c_eff"] = c_eff;
  doc["e_over_c_eff"] = std::isfinite(ratio) ? nlohmann::ordered_json(ratio) : nlohmann::ordered_json(nullptr);
  doc["regime"] = std::string(to_string(regime));
  doc["decay_bound"] = decay_bound ? nlohmann::ordered_json(*decay_bound) : nlohmann::ordered_json(nullptr);
  doc["observed_tail_ratio"] =
      observed_tail_ratio ? nlohmann::ordered_json(*observed_tail_ratio) : nlohmann::ordered_json(nullptr);
  doc["bound_holds"] = bound_holds;
  doc["fixed_point"] = fixed_point;
  doc["iterations"] = iterations;
  return doc.dump(2) + "\n";
}

}  // namespace secnet
