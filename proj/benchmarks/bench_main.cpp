#include <benchmark/benchmark.h>

#include <random>

#include "bandmap/bind.hpp"
#include "bandmap/mis.hpp"
#include "bandmap/route.hpp"

namespace {

using namespace bandmap;

AugmentedSchedule scheduled(int n, int m, int ii) {
  ArchConfig a;
  auto s = schedule(gen_cnkm(n, m), a, ii);
  return std::get<AugmentedSchedule>(insert_routing_ops(std::get<Schedule>(s), a));
}

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(p);
  Graph g(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (edge(rng)) g.add_edge(a, b);
    }
  }
  return g;
}

void BM_ConflictGraph(benchmark::State& state) {
  const auto aug = scheduled(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                             static_cast<int>(state.range(2)));
  BindingContext ctx(aug.schedule, ArchConfig{});
  std::size_t vertices = 0;
  for (auto _ : state) {
    auto cg = build_conflict_graph(ctx);
    vertices = cg.size();
    benchmark::DoNotOptimize(cg.graph.edge_count());
  }
  state.counters["vertices"] = static_cast<double>(vertices);
}
BENCHMARK(BM_ConflictGraph)->Args({2, 4, 1})->Args({3, 6, 3})->Args({5, 5, 4})->Unit(benchmark::kMillisecond);

void BM_TabuMis(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 0.1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(tabu_mis(g, 1).size);
}
BENCHMARK(BM_TabuMis)->Arg(60)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ExactMis(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 0.2, 5);
  for (auto _ : state) benchmark::DoNotOptimize(exact_mis(g).size);
}
BENCHMARK(BM_ExactMis)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_MapApplication(benchmark::State& state) {
  const auto dfg = gen_cnkm(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto mode = state.range(2) ? Mode::bandmap : Mode::baseline;
  for (auto _ : state) benchmark::DoNotOptimize(map_application(dfg, ArchConfig{}, {mode, 1, 0, ""}).achieved_ii);
}
BENCHMARK(BM_MapApplication)
    ->Args({2, 4, 1})
    ->Args({3, 6, 1})
    ->Args({3, 6, 0})
    ->Args({5, 5, 1})
    ->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
