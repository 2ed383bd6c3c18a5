#include <benchmark/benchmark.h>

#include "sdestab/coeffs.hpp"
#include "sdestab/mollify.hpp"
#include "sdestab/rng.hpp"
#include "sdestab/sde_sim.hpp"
#include "sdestab/weighted_norm.hpp"
#include "sdestab/yw_functions.hpp"

namespace {

using namespace sdestab;

void BM_PhiloxNormals(benchmark::State& state) {
  const CounterNormals normals(7);
  std::uint64_t i = 0;
  for (auto _ : state) {
    auto z = normals.pair(i++, 0);
    benchmark::DoNotOptimize(z);
  }
}
BENCHMARK(BM_PhiloxNormals);

void BM_MollifiedSignEval(benchmark::State& state) {
  const Coefficient b = mollify(builtin::neg_sign(), static_cast<int>(state.range(0)));
  double x = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(b(x));
    x += 1e-4;
    if (x > 1.0) x = -1.0;
  }
}
BENCHMARK(BM_MollifiedSignEval)->Arg(4)->Arg(64);

void BM_EpsilonSignPair(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SdePair pair{0.0, 1.0, {builtin::neg_sign(), builtin::constant(1.0)},
                     {mollify(builtin::neg_sign(), n), builtin::constant(1.0)}};
  for (auto _ : state) benchmark::DoNotOptimize(epsilon_p(pair, 1.0).epsilon);
}
BENCHMARK(BM_EpsilonSignPair)->Arg(8)->Arg(64);

void BM_YwConstruct(benchmark::State& state) {
  for (auto _ : state) {
    YwParams p(4.0, 0.5);
    benchmark::DoNotOptimize(phi(0.3, p));
  }
}
BENCHMARK(BM_YwConstruct);

void BM_SimulateSignPair(benchmark::State& state) {
  const SdePair pair{0.0, 1.0, {builtin::neg_sign(), builtin::constant(1.0)},
                     {mollify(builtin::neg_sign(), 8), builtin::constant(1.0)}};
  SimulationPlan plan;
  plan.steps = static_cast<std::size_t>(state.range(0));
  plan.paths = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_pair(pair, plan).mean_sup_error().mean);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plan.paths * plan.steps));
}
BENCHMARK(BM_SimulateSignPair)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
