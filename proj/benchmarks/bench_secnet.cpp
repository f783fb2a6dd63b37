#include <benchmark/benchmark.h>

#include "secnet/dynamics.hpp"
#include "secnet/exact.hpp"
#include "secnet/netgen.hpp"
#include "secnet/rng.hpp"

using namespace secnet;

namespace {

Graph network(Topology kind, std::size_t n, std::size_t m, double power = 1.0) {
  auto rng = Rng(7);
  return generate(TopologySpec{kind, n, m, power, 5, 100.0}, rng);
}

void BM_Simulate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Graph g = network(Topology::ER, n, edges_for_density(n, 0.3));
  const Params p{0.25, 0.01};
  const auto z0 = Population::all_occupied(n);
  auto rng = Rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(simulate(g, p, z0, 100, rng));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_Simulate)->Arg(10)->Arg(100)->Arg(500);

void BM_CrudeEstimate(benchmark::State& state) {
  const Graph g = network(Topology::PA, 100, 1485, 3.0);
  const Params p{0.25, 0.01};
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_crude(g, p, Population::all_occupied(100), 100, 200, 3, 1));
}
BENCHMARK(BM_CrudeEstimate)->Unit(benchmark::kMillisecond);

void BM_BuildTransition(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Graph g = network(Topology::ER, n, edges_for_density(n, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(build_transition(g, Params{0.3, 0.2}));
}
BENCHMARK(BM_BuildTransition)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_MatrixFreeHorizon(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Graph g = network(Topology::ER, n, edges_for_density(n, 0.3));
  for (auto _ : state) benchmark::DoNotOptimize(finite_horizon(g, Params{0.3, 0.2}, full_mask(n), 20));
}
BENCHMARK(BM_MatrixFreeHorizon)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& state) {
  const auto kind = static_cast<Topology>(state.range(0));
  auto rng = Rng(11);
  const TopologySpec spec{kind, 100, 495, 3.0, 5, 100.0};
  for (auto _ : state) benchmark::DoNotOptimize(generate(spec, rng));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Generate)
    ->Arg(static_cast<int>(Topology::ER))
    ->Arg(static_cast<int>(Topology::COM))
    ->Arg(static_cast<int>(Topology::LAT))
    ->Arg(static_cast<int>(Topology::PA))
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
