#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <frpsa/ann.hpp>
#include <frpsa/rng.hpp>

static void BM_TrainMlp(benchmark::State& state) {
  const int n = 600;
  frpsa::Rng rng(3);
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < 3; ++c) X(r, c) = rng.normal();
    y(r) = 0.5 * X(r, 0) + 0.3 * X(r, 1) + 0.1 * rng.normal();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        frpsa::train_mlp(X, y, 4, static_cast<int>(state.range(0)), 0.5, 17));
  }
}
BENCHMARK(BM_TrainMlp)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
