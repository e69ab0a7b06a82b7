#include <benchmark/benchmark.h>

#include "wardrop/equilibrium.hpp"
#include "wardrop/generators.hpp"
#include "wardrop/signaling.hpp"
#include "wardrop/support_enum.hpp"

using namespace wardrop;

namespace {

void BM_SolveExample1(benchmark::State& state) {
  Instance inst = make_example1();
  Belief mu = make_belief({0.5, 0.5});
  for (auto _ : state) benchmark::DoNotOptimize(solve_wardrop(inst, mu).cost);
}
BENCHMARK(BM_SolveExample1);

void BM_SolveBraess(benchmark::State& state) {
  Instance inst = make_braess();
  Belief mu = make_belief({0.3, 0.7});
  for (auto _ : state) benchmark::DoNotOptimize(solve_wardrop(inst, mu).cost);
}
BENCHMARK(BM_SolveBraess);

void BM_SolveNestedBraess(benchmark::State& state) {
  Instance inst = make_nested_braess(state.range(0), 1e-6, 1.3);
  Belief mu = make_belief({0.5, 0.5});
  for (auto _ : state) benchmark::DoNotOptimize(solve_wardrop(inst, mu).cost);
}
BENCHMARK(BM_SolveNestedBraess)->Arg(1)->Arg(2)->Arg(3);

void BM_WaterFilling(benchmark::State& state) {
  Instance inst = make_example1();
  Belief mu = make_belief({0.4, 0.6});
  for (auto _ : state) benchmark::DoNotOptimize(parallel_links_wardrop(inst, mu).cost);
}
BENCHMARK(BM_WaterFilling);

void BM_AtlasExample1(benchmark::State& state) {
  Instance inst = make_example1();
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_supports_two_state(inst, {}).regions.size());
}
BENCHMARK(BM_AtlasExample1);

void BM_AtlasExpSupports(benchmark::State& state) {
  Instance inst = make_exp_supports(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_supports_two_state(inst, {}).regions.size());
}
BENCHMARK(BM_AtlasExpSupports)->Arg(1)->Arg(2);

void BM_SignalingLpBraess(benchmark::State& state) {
  Instance inst = make_braess();
  std::vector<SupportVector> candidates = {SupportVector{{{0, 1, 2, 3}}},
                                           SupportVector{{{0, 1, 2, 3, 4}}}};
  for (auto _ : state)
    benchmark::DoNotOptimize(optimal_scheme_lp(inst, candidates, {0.5, 0.5}).cost);
}
BENCHMARK(BM_SignalingLpBraess);

void BM_TwoStatePipelineBraess(benchmark::State& state) {
  Instance inst = make_braess();
  for (auto _ : state)
    benchmark::DoNotOptimize(optimal_scheme_two_state(inst, {0.5, 0.5}).cost);
}
BENCHMARK(BM_TwoStatePipelineBraess);

}  // namespace

BENCHMARK_MAIN();
