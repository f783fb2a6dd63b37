#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "secnet/errors.hpp"
#include "secnet/meanfield.hpp"
#include "secnet/netgen.hpp"

using namespace secnet;

namespace {

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

double tail_ratio(const MeanFieldTrajectory& traj) {
  const auto T = traj.p.size() - 1;
  return max_of(traj.p[T]) / max_of(traj.p[T - 1]);
}

}  // namespace

TEST_CASE("effective colonisation rate follows the colonisation source") {
  CHECK(effective_colonisation(Params{0.2, 0.5}) == doctest::Approx(0.4));
  CHECK(effective_colonisation(Params{0.2, 0.5, ColonisationSource::PreExtinction}) == 0.5);
}

TEST_CASE("c = 0 decays geometrically patch by patch") {
  const Graph g = cycle_graph(5);
  const std::vector<double> p0{1.0, 0.5, 0.25, 0.0, 0.75};
  const auto traj = mf_iterate(g, Params{0.3, 0.0}, p0, 12);
  for (std::size_t t = 0; t <= 12; ++t)
    for (std::size_t i = 0; i < 5; ++i) CHECK(traj.p[t][i] == doctest::Approx(p0[i] * std::pow(0.7, t)));
}

TEST_CASE("e = 0 from full occupancy stays full") {
  const auto traj = mf_iterate(cycle_graph(6), Params{0.0, 0.1}, std::vector<double>(6, 1.0), 10);
  for (const auto& row : traj.p)
    for (double p : row) CHECK(p == 1.0);
}

TEST_CASE("one step matches the recurrence written out by hand") {
  // Path 0-1-2, post-extinction source.
  const Graph g = path_graph(3);
  const double e = 0.2, c = 0.5, ce = c * (1 - e);
  const std::vector<double> p0{0.9, 0.4, 0.1};
  const auto traj = mf_iterate(g, Params{e, c}, p0, 1);
  const double z0 = 1 - ce * p0[1];
  const double z1 = (1 - ce * p0[0]) * (1 - ce * p0[2]);
  const double z2 = 1 - ce * p0[1];
  CHECK(traj.p[1][0] == doctest::Approx(1 - z0 * (1 - (1 - e) * p0[0])));
  CHECK(traj.p[1][1] == doctest::Approx(1 - z1 * (1 - (1 - e) * p0[1])));
  CHECK(traj.p[1][2] == doctest::Approx(1 - z2 * (1 - (1 - e) * p0[2])));
  CHECK(traj.zeta[1][1] == doctest::Approx(z1));
}

TEST_CASE("iterates stay in [0, 1]") {
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto rng = Rng::stream(31, {k});
    const Graph g = gen_erdos_renyi(12, 12 + rng.uniform_index(50), rng);
    const Params p{rng.uniform01(), rng.uniform01(),
                   k % 2 ? ColonisationSource::PreExtinction : ColonisationSource::PostExtinction};
    std::vector<double> p0(12);
    for (auto& v : p0) v = rng.uniform01();
    for (const auto& row : mf_iterate(g, p, p0, 50).p)
      for (double v : row) REQUIRE((v >= 0.0 && v <= 1.0));
  }
}

TEST_CASE("tail decay rate is 1 - e + c_eff lambda for both sources") {
  const Graph g = cycle_graph(10);  // lambda = 2
  const double e = 0.5, c = 0.1;
  const auto post = mf_iterate(g, Params{e, c}, std::vector<double>(10, 1.0), 300);
  CHECK(tail_ratio(post) == doctest::Approx(1 - e + c * (1 - e) * 2).epsilon(1e-6));
  const auto pre =
      mf_iterate(g, Params{e, c, ColonisationSource::PreExtinction}, std::vector<double>(10, 1.0), 300);
  CHECK(tail_ratio(pre) == doctest::Approx(1 - e + c * 2).epsilon(1e-6));
}

TEST_CASE("subcritical threshold report") {
  const Graph g = cycle_graph(10);
  const auto r = mf_threshold(g, Params{0.3, 0.1});
  CHECK(r.regime == Regime::Subcritical);
  CHECK(r.c_eff == doctest::Approx(0.07));
  REQUIRE(r.decay_bound.has_value());
  CHECK(*r.decay_bound == doctest::Approx(1 - 0.3 + 0.07 * 2));
  CHECK(r.bound_holds);
  CHECK(*r.observed_tail_ratio <= *r.decay_bound + 1e-9);
  const auto traj = mf_iterate(g, Params{0.3, 0.1}, std::vector<double>(10, 1.0), 200);
  CHECK(max_of(traj.p[200]) < 1e-6);

  const auto dead = mf_threshold(g, Params{1.0, 0.3});
  CHECK(dead.regime == Regime::Subcritical);
  CHECK(dead.bound_holds);
}

TEST_CASE("supercritical fixed point on K10 is symmetric and fixed") {
  const Graph g = complete_graph(10);
  const Params params{0.1, 0.1};
  const auto r = mf_threshold(g, params);
  CHECK(r.regime == Regime::Supercritical);
  CHECK(r.lambda_a1 == doctest::Approx(9.0));
  REQUIRE(r.fixed_point.size() == 10);
  for (double v : r.fixed_point) CHECK(std::abs(v - r.fixed_point[0]) < 1e-12);
  CHECK(r.fixed_point[0] > 0.5);
  const auto next = mf_iterate(g, params, r.fixed_point, 1);
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(next.p[1][i] - r.fixed_point[i]) < 1e-10);

  const auto cyc = mf_threshold(cycle_graph(8), Params{0.05, 0.3});
  CHECK(cyc.regime == Regime::Supercritical);
  for (double v : cyc.fixed_point) CHECK(std::abs(v - cyc.fixed_point[0]) < 1e-12);
}

TEST_CASE("critical band") {
  // Literal source: e / c = 2 = lambda of a cycle.
  const auto r = mf_threshold(cycle_graph(7), Params{0.2, 0.1, ColonisationSource::PreExtinction});
  CHECK(r.regime == Regime::Critical);
  CHECK(to_string(r.regime) == "critical");
  const auto none = mf_threshold(cycle_graph(7), Params{0.0, 0.0});
  CHECK(none.regime == Regime::Critical);
}

TEST_CASE("threshold preconditions and outputs") {
  CHECK_THROWS_AS(mf_threshold(Graph(4, {{0, 1}}), Params{0.1, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(mf_iterate(cycle_graph(4), Params{0.1, 0.1}, {1.0, 1.0}, 3), InvalidArgument);
  CHECK_THROWS_AS(mf_iterate(cycle_graph(2 + 1), Params{0.1, 0.1}, {1.0, 1.5, 0.0}, 3), InvalidArgument);
  const auto json = mf_threshold(cycle_graph(5), Params{0.4, 0.1}).to_json();
  CHECK(json.find("\"regime\": \"subcritical\"") != std::string::npos);
  CHECK(json.find("\"decay_bound\"") != std::string::npos);
  const auto csv = mf_iterate(cycle_graph(3), Params{0.1, 0.1}, {1, 1, 1}, 1).to_csv();
  CHECK(csv.rfind("t,i,p\n0,0,1\n", 0) == 0);
}

TEST_CASE("decay bound holds on bipartite graphs") {
  // The max-norm step ratio of a path still oscillates above the rate here.
  const Graph g = path_graph(10);
  const double lambda = leading_adjacency_eigenvalue(g);
  const double e = 0.2, c = 0.2 * e / ((1 - e) * lambda);
  const auto r = mf_threshold(g, Params{e, c});
  REQUIRE(r.regime == Regime::Subcritical);
  CHECK(r.bound_holds);
  CHECK(*r.observed_tail_ratio == doctest::Approx(*r.decay_bound).epsilon(1e-6));
}
