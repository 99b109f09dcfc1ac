#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <frpsa/diagnostics.hpp>
#include <frpsa/rng.hpp>

static void BM_CronbachAlpha(benchmark::State& state) {
  frpsa::Rng rng(5);
  Eigen::MatrixXd items(400, state.range(0));
  for (int r = 0; r < items.rows(); ++r) {
    const double f = rng.normal();
    for (int c = 0; c < items.cols(); ++c) items(r, c) = 0.8 * f + 0.6 * rng.normal();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(frpsa::cronbach_alpha(items));
  }
}
BENCHMARK(BM_CronbachAlpha)->Arg(3)->Arg(8);
