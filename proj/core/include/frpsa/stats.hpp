#pragma once

#include <span>
#include <vector>

namespace frpsa::stats {

double mean(std::span<const double> x);

/// Sample variance with the N-1 denominator. Requires x.size() >= 2.
double sample_variance(std::span<const double> x);
double sample_sd(std::span<const double> x);

/// Pearson correlation. Requires both spans the same length >= 2 and
/// nonzero variance on each side.
double pearson(std::span<const double> x, std::span<const double> y);

/// Standard normal CDF, accurate to full double precision via erfc.
double normal_cdf(double x);

/// Inverse standard normal CDF (Wichura's AS241 rational approximation,
/// |error| < 1e-15 on (0, 1)). Returns +-infinity at the endpoints.
double normal_quantile(double p);

/// Two-tailed p value of a standard-normal statistic.
double two_tailed_p(double t);

/// Empirical quantile with linear interpolation between order statistics
/// (the same convention as R's default type 7). p in [0, 1], x non-empty.
double quantile(std::vector<double> x, double p);

}  // namespace frpsa::stats
