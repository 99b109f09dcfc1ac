#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frpsa/dataset.hpp"
#include "frpsa/model_spec.hpp"
#include "frpsa/pls.hpp"

namespace frpsa {

/// Resampling summary for one parameter. `draws` holds the successful
/// replications in replication-index order, so the content is independent of
/// worker scheduling.
struct ParamDraws {
  std::string name;   // "path:UE->IMG", "weight:UE:FA1", "loading:FA:FA1",
                      // "indirect:UE->IMG->ITI"
  double estimate = 0.0;
  std::vector<double> draws;
  double se = 0.0;
  double t = 0.0;
  double p = 0.0;
  double bias = 0.0;   // mean(draws) - estimate
  double bc_lo = 0.0;
  double bc_hi = 0.0;
  bool t_defined = false;   // false when se == 0
  bool bc_defined = false;  // false when the BC interval is undefined
};

struct BootstrapResult {
  int reps_requested = 0;
  int failed_reps = 0;
  double level = 0.95;
  std::vector<ParamDraws> params;

  const ParamDraws* find(std::string_view name) const;
};

struct TAndP {
  double se = 0.0;
  double t = 0.0;
  double p = 0.0;
  bool t_defined = false;
};

/// SE = sample standard deviation of the resamples, t = estimate / SE,
/// two-tailed p from the standard normal. SE of zero flags t as undefined
/// and reports p = 0.
TAndP t_and_p(std::span<const double> resamples, double estimate);

/// Bias-corrected (non-accelerated) percentile interval at `level`:
/// z0 = Phi^-1(fraction of resamples strictly below the estimate), endpoints
/// at the empirical quantiles Phi(2 z0 + z_(1-level)/2) and
/// Phi(2 z0 + z_(1+level)/2), quantiles by linear interpolation. A constant
/// resample vector equal to the estimate collapses to a point interval; all
/// resamples on one side of the estimate is an error.
std::pair<double, double> bc_interval(std::span<const double> resamples, double estimate,
                                      double level);

/// Case resampling with replacement: `reps` resamples of size N, each
/// re-standardized and re-estimated (interactions included). Collects every
/// structural path, outer weight, outer loading, and indirect-chain product.
/// Replications whose estimation fails are counted and excluded; more than
/// 10% failures is a hard error. Identical (spec, data, reps, seed) give
/// bit-identical results at any thread count.
BootstrapResult run_bootstrap(const ModelSpec& expanded, const StandardizedDataset& data,
                              int reps, std::uint64_t seed, int threads = 1,
                              const EstimateOptions& opts = {});

}  // namespace frpsa
