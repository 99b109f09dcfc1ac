#include <benchmark/benchmark.h>

#include <frpsa/bootstrap.hpp>

#include "bench_common.hpp"

static void BM_Bootstrap(benchmark::State& state) {
  const auto g = bench::chain_generator(300);
  const auto data = frpsa::standardize(frpsa::generate_synthetic(g, 7));
  const auto model = bench::chain_model();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        frpsa::run_bootstrap(model, data, static_cast<int>(state.range(0)), 11, 1));
  }
}
BENCHMARK(BM_Bootstrap)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
