#include <doctest.h>

#include <array>
#include <cmath>

#include "secnet/dynamics.hpp"
#include "secnet/errors.hpp"

using namespace secnet;

namespace {

// Empirical law of one step from `from` on `g`, over `draws` independent steps.
std::vector<double> one_step_law(const Graph& g, const Params& p, StateMask from, std::size_t draws) {
  std::vector<double> freq(std::size_t{1} << g.n(), 0.0);
  Kernel kernel(g, p);
  Rng rng(2024);
  for (std::size_t k = 0; k < draws; ++k) {
    auto z = Population::from_mask(g.n(), from);
    kernel.step(z, rng);
    freq[z.mask()] += 1.0 / static_cast<double>(draws);
  }
  return freq;
}

void check_law(const std::vector<double>& empirical, const std::vector<double>& exact, std::size_t draws) {
  for (std::size_t s = 0; s < exact.size(); ++s) {
    const double sigma = std::sqrt(std::max(exact[s] * (1 - exact[s]), 1e-12) / static_cast<double>(draws));
    CHECK(std::abs(empirical[s] - exact[s]) <= 4.0 * sigma + 1e-12);
  }
}

}  // namespace

TEST_CASE("params validation") {
  CHECK_THROWS_AS((Params{-0.1, 0.1}.validate()), InvalidArgument);
  CHECK_THROWS_AS((Params{0.1, 1.1}.validate()), InvalidArgument);
  CHECK_NOTHROW((Params{0.0, 1.0}.validate()));
  CHECK(colonisation_source_from_string("pre") == ColonisationSource::PreExtinction);
  CHECK_THROWS_AS(colonisation_source_from_string("during"), InvalidArgument);
}

TEST_CASE("population bookkeeping and hex form") {
  auto z = Population::all_occupied(10);
  CHECK(z.count() == 10);
  CHECK(z.hex() == "3ff");
  CHECK(z.mask() == 0x3ff);
  auto w = Population::from_mask(6, 0b100101);
  CHECK(w.count() == 3);
  CHECK(w.occupied(2));
  CHECK_FALSE(w.occupied(1));
  CHECK(w.hex() == "25");
  w.clear();
  CHECK(w.empty());
  CHECK(w.hex() == "00");
  CHECK_THROWS_AS(Population::from_mask(3, 0b1000), InvalidArgument);
}

TEST_CASE("one-step law on a 2-path, survivors colonise") {
  // Hand enumeration from state 11.
  const double e = 0.3, c = 0.4;
  const Graph g(2, {{0, 1}});
  std::vector<double> exact(4);
  exact[0b00] = e * e;
  exact[0b01] = e * (1 - e) * (1 - c);
  exact[0b10] = exact[0b01];
  exact[0b11] = (1 - e) * (1 - e) + 2 * e * (1 - e) * c;
  const std::size_t draws = 200000;
  check_law(one_step_law(g, Params{e, c}, 0b11, draws), exact, draws);
}

TEST_CASE("one-step law on a 2-path, pre-extinction occupancy colonises") {
  const double e = 0.3, c = 0.4;
  const Graph g(2, {{0, 1}});
  std::vector<double> exact(4);
  exact[0b00] = e * e * (1 - c) * (1 - c);
  exact[0b01] = e * (1 - e) * (1 - c) + e * e * c * (1 - c);
  exact[0b10] = exact[0b01];
  exact[0b11] = (1 - e) * (1 - e) + 2 * e * (1 - e) * c + e * e * c * c;
  const std::size_t draws = 200000;
  check_law(one_step_law(g, Params{e, c, ColonisationSource::PreExtinction}, 0b11, draws), exact, draws);
}

TEST_CASE("one-step law on a star: colonisation pressure combines as 1-(1-c)^o") {
  // Star centre 0 with leaves 1,2,3; start with leaves occupied and e = 0 so
  // only the centre can change: P(centre colonised) = 1 - (1-c)^3.
  const double c = 0.2;
  const Graph g = star_graph(4);
  const auto law = one_step_law(g, Params{0.0, c}, 0b1110, 100000);
  const double p = 1 - std::pow(1 - c, 3);
  CHECK(law[0b1111] == doctest::Approx(p).epsilon(0.02));
  CHECK(law[0b1110] == doctest::Approx(1 - p).epsilon(0.02));
}

TEST_CASE("deterministic limits and absorption") {
  const Graph g = cycle_graph(6);
  Rng rng(1);
  auto z = Population::all_occupied(6);
  Kernel all_die(g, Params{1.0, 1.0});
  CHECK(all_die.step(z, rng) == 6);
  CHECK(z.empty());
  Kernel spread(g, Params{0.0, 1.0});
  z = Population::from_mask(6, 0b1);
  spread.step(z, rng);
  CHECK(z.mask() == 0b100011);
  // The coffin state never leaves.
  z.clear();
  for (int k = 0; k < 20; ++k) spread.step(z, rng);
  CHECK(z.empty());
}

TEST_CASE("simulate pads absorbed trajectories and reports extinction time") {
  const Graph g = path_graph(3);
  Rng rng(5);
  const auto traj = simulate(g, Params{1.0, 0.5}, Population::all_occupied(3), 5, rng);
  REQUIRE(traj.states.size() == 6);
  CHECK(traj.extinction_time() == 1);
  for (std::size_t t = 1; t <= 5; ++t) CHECK(traj.states[t].empty());
  const auto csv = traj.to_csv();
  CHECK(csv.rfind("generation,occupied_count,state_hex\n0,3,7\n1,0,0\n", 0) == 0);
}

TEST_CASE("crude estimator: closed form and worker independence") {
  // Single patch: persistence at t is (1-e)^t.
  const Graph single(1, {});
  const double e = 0.2;
  const auto r = estimate_crude(single, Params{e, 0.5}, Population::all_occupied(1), 5, 40000, 9, 1);
  for (std::size_t t = 0; t <= 5; ++t) {
    const double p = std::pow(1 - e, static_cast<double>(t));
    CHECK(std::abs(r.persistence[t].value - p) <= 4 * r.persistence[t].std_error + 1e-12);
  }
  CHECK(r.persistence[0].value == 1.0);

  const Graph g = cycle_graph(8);
  const Params params{0.3, 0.2};
  const auto a = estimate_crude(g, params, Population::all_occupied(8), 30, 3000, 42, 1);
  const auto b = estimate_crude(g, params, Population::all_occupied(8), 30, 3000, 42, 4);
  CHECK(a.to_csv() == b.to_csv());
  for (std::size_t t = 0; t <= 30; ++t) {
    // occupancy = persistence * conditional occupancy, exactly.
    CHECK(a.occupancy[t].value ==
          doctest::Approx(a.persistence[t].value * a.conditional_occupancy[t].value).epsilon(1e-12));
  }
  CHECK_THROWS_AS(estimate_crude(g, params, Population::all_occupied(7), 3, 10, 1), InvalidArgument);
}
