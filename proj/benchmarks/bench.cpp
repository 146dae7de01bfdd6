// Microbenchmarks for the hot paths: instance generation, both allocators,
// the signal-design solver, and a full alternation run.
#include <benchmark/benchmark.h>

#include "d2dopt/alloc.hpp"
#include "d2dopt/harness.hpp"
#include "d2dopt/mimo.hpp"
#include "d2dopt/optimizer.hpp"

using namespace d2dopt;

namespace {

harness::ScenarioConfig config(int nodes, int antennas, int subchannels) {
  harness::ScenarioConfig cfg;
  cfg.num_nodes = nodes;
  cfg.antennas = antennas;
  cfg.num_subchannels = subchannels;
  cfg.power_budget = 5.0;
  return cfg;
}

void BM_GenerateInstance(benchmark::State& state) {
  const auto cfg = config(static_cast<int>(state.range(0)), 6, 3);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(harness::generate_instance(cfg, seed++));
  }
}
BENCHMARK(BM_GenerateInstance)->Arg(10)->Arg(20);

void BM_GreedyAllocate(benchmark::State& state) {
  const auto [net, ch] =
      harness::generate_instance(config(static_cast<int>(state.range(0)), 6, 3), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alloc::greedy_allocate(net, {}, ch));
  }
}
BENCHMARK(BM_GreedyAllocate)->Arg(6)->Arg(10)->Arg(16);

void BM_ExactAllocate(benchmark::State& state) {
  const auto [net, ch] =
      harness::generate_instance(config(static_cast<int>(state.range(0)), 6, 2), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alloc::exact_allocate(net, {}, ch));
  }
}
BENCHMARK(BM_ExactAllocate)->Arg(5)->Arg(6)->Arg(8);

void BM_Wmmse(benchmark::State& state) {
  const int links = static_cast<int>(state.range(0));
  const auto [net, ch] = harness::generate_instance(config(2 * links, 6, 3), 7);
  std::vector<Link> ls;
  for (int n = 0; n < links; ++n) ls.push_back({2 * n, 2 * n + 1, n % 3});
  const Allocation alloc(ls);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mimo::wmmse_optimize(net, alloc, {}, ch));
  }
}
BENCHMARK(BM_Wmmse)->Arg(1)->Arg(3)->Arg(5);

void BM_Alternate(benchmark::State& state) {
  const auto [net, ch] =
      harness::generate_instance(config(static_cast<int>(state.range(0)), 6, 3), 7);
  opt::RunConfig rc;
  rc.num_restarts = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(opt::alternate(net, ch, rc));
  }
}
BENCHMARK(BM_Alternate)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
