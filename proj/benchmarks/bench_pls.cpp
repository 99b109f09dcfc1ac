#include <benchmark/benchmark.h>

#include <frpsa/pls.hpp>

#include "bench_common.hpp"

static void BM_PlsEstimate(benchmark::State& state) {
  const auto g = bench::chain_generator(static_cast<int>(state.range(0)));
  const auto data = frpsa::standardize(frpsa::generate_synthetic(g, 7));
  const auto model = bench::chain_model();
  for (auto _ : state) {
    benchmark::DoNotOptimize(frpsa::estimate(model, data));
  }
}
BENCHMARK(BM_PlsEstimate)->Arg(300)->Arg(1000)->Arg(5000);
