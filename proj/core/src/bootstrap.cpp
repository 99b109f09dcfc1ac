#include "frpsa/bootstrap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "frpsa/effects.hpp"
#include "frpsa/errors.hpp"
#include "frpsa/rng.hpp"
#include "frpsa/stats.hpp"

namespace frpsa {

namespace {

constexpr double kMaxFailedFraction = 0.10;

// Canonical parameter layout shared by the full-sample estimate and every
// replication: paths, outer weights, outer loadings, then indirect products.
struct ParamLayout {
  std::vector<std::string> names;
  std::vector<std::vector<int>> chain_edge_indices;  // into the path segment
  int n_paths = 0;
  int n_outer = 0;  // weights (== loadings count)

  std::size_t size() const {
    return names.size();
  }
};

ParamLayout make_layout(const PlsEstimate& full, const std::vector<Chain>& chains) {
  ParamLayout layout;
  std::map<std::string, int> path_index;
  for (const auto& p : full.paths) {
    path_index.emplace(p.source + "->" + p.target, static_cast<int>(layout.names.size()));
    layout.names.push_back("path:" + p.source + "->" + p.target);
  }
  layout.n_paths = static_cast<int>(layout.names.size());

  for (const auto& b : full.blocks) {
    for (const auto& ind : b.indicator_names) layout.names.push_back("weight:" + b.construct + ":" + ind);
  }
  for (const auto& b : full.blocks) {
    for (const auto& ind : b.indicator_names) layout.names.push_back("loading:" + b.construct + ":" + ind);
  }
  layout.n_outer = (static_cast<int>(layout.names.size()) - layout.n_paths) / 2;

  for (const auto& chain : chains) {
    std::vector<int> edges;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const auto it = path_index.find(chain[i] + "->" + chain[i + 1]);
      if (it == path_index.end()) {
        throw input_error("indirect chain " + chain_name(chain) +
                          " uses an edge missing from the estimate");
      }
      edges.push_back(it->second);
    }
    layout.chain_edge_indices.push_back(std::move(edges));
    layout.names.push_back("indirect:" + chain_name(chain));
  }
  return layout;
}

std::vector<double> extract_params(const PlsEstimate& e, const ParamLayout& layout) {
  std::vector<double> v;
  v.reserve(layout.size());
  for (const auto& p : e.paths) v.push_back(p.beta);
  for (const auto& b : e.blocks) {
    for (Eigen::Index i = 0; i < b.weights.size(); ++i) v.push_back(b.weights(i));
  }
  for (const auto& b : e.blocks) {
    for (Eigen::Index i = 0; i < b.loadings.size(); ++i) v.push_back(b.loadings(i));
  }
  for (const auto& edges : layout.chain_edge_indices) {
    double product = 1.0;
    for (int idx : edges) product *= v[static_cast<std::size_t>(idx)];
    v.push_back(product);
  }
  if (v.size() != layout.size()) {
    throw numeric_error("bootstrap replication produced an inconsistent parameter set");
  }
  return v;
}

}  // namespace

const ParamDraws* BootstrapResult::find(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

TAndP t_and_p(std::span<const double> resamples, double estimate) {
  if (resamples.size() < 2) throw input_error("t_and_p: need at least 2 resamples");
  TAndP out;
  out.se = stats::sample_sd(resamples);
  if (out.se == 0.0) {
    out.t = std::numeric_limits<double>::quiet_NaN();
    out.p = 0.0;  // by convention; flagged via t_defined
    out.t_defined = false;
    return out;
  }
  out.t = estimate / out.se;
  out.p = stats::two_tailed_p(out.t);
  out.t_defined = true;
  return out;
}

std::pair<double, double> bc_interval(std::span<const double> resamples, double estimate,
                                      double level) {
  if (resamples.empty()) throw input_error("bc_interval: empty resample vector");
  if (!(level > 0.0 && level < 1.0)) throw input_error("bc_interval: level outside (0, 1)");

  const auto [mn, mx] = std::minmax_element(resamples.begin(), resamples.end());
  if (*mn == *mx) {
    if (*mn == estimate) return {estimate, estimate};
    throw numeric_error("bc_interval: all resamples on one side of the estimate");
  }

  std::size_t below = 0;
  for (double r : resamples) {
    if (r < estimate) ++below;
  }
  if (below == 0 || below == resamples.size()) {
    throw numeric_error("bc_interval: all resamples on one side of the estimate");
  }

  const double z0 =
      stats::normal_quantile(static_cast<double>(below) / static_cast<double>(resamples.size()));
  const double z_lo = stats::normal_quantile((1.0 - level) / 2.0);
  const double p_lo = stats::normal_cdf(2.0 * z0 + z_lo);
  const double p_hi = stats::normal_cdf(2.0 * z0 - z_lo);

  std::vector<double> sorted(resamples.begin(), resamples.end());
  return {stats::quantile(sorted, p_lo), stats::quantile(std::move(sorted), p_hi)};
}

BootstrapResult run_bootstrap(const ModelSpec& m, const StandardizedDataset& data, int reps,
                              std::uint64_t seed, int threads, const EstimateOptions& opts) {
  if (reps < 2) throw input_error("run_bootstrap: reps must be >= 2");
  if (data.n_cases() < 2) throw input_error("run_bootstrap: need at least 2 cases");

  const PlsEstimate full = build_interaction_scores(estimate(m, data, opts), m);
  const auto chains = enumerate_indirect(m);
  const ParamLayout layout = make_layout(full, chains);
  const std::vector<double> point = extract_params(full, layout);

  const int n = data.n_cases();
  std::vector<std::vector<double>> slots(static_cast<std::size_t>(reps));
  std::vector<char> failed(static_cast<std::size_t>(reps), 0);

  auto run_rep = [&](int rep) {
    Rng rng = Rng::stream(seed, kBootstrapStream + static_cast<std::uint64_t>(rep));
    Dataset resampled;
    resampled.columns = data.columns;
    resampled.values.resize(n, data.values.cols());
    for (int r = 0; r < n; ++r) {
      const auto pick = static_cast<Eigen::Index>(rng.bounded(static_cast<std::uint64_t>(n)));
      resampled.values.row(r) = data.values.row(pick);
    }
    try {
      const StandardizedDataset sd = standardize(resampled);
      const PlsEstimate est = build_interaction_scores(estimate(m, sd, opts), m);
      slots[static_cast<std::size_t>(rep)] = extract_params(est, layout);
    } catch (const Error&) {
      failed[static_cast<std::size_t>(rep)] = 1;
    }
  };

  const int workers = std::max(1, std::min(threads, reps));
  if (workers == 1) {
    for (int rep = 0; rep < reps; ++rep) run_rep(rep);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const int rep = next.fetch_add(1);
          if (rep >= reps) return;
          try {
            run_rep(rep);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  BootstrapResult result;
  result.reps_requested = reps;
  result.level = 1.0 - m.alpha;
  for (char f : failed) result.failed_reps += f;
  if (result.failed_reps > kMaxFailedFraction * reps) {
    throw numeric_error("bootstrap unstable: " + std::to_string(result.failed_reps) + " of " +
                        std::to_string(reps) + " replications failed to estimate");
  }

  const std::size_t n_params = layout.size();
  result.params.resize(n_params);
  for (std::size_t k = 0; k < n_params; ++k) {
    ParamDraws& pd = result.params[k];
    pd.name = layout.names[k];
    pd.estimate = point[k];
    pd.draws.reserve(static_cast<std::size_t>(reps - result.failed_reps));
    for (int rep = 0; rep < reps; ++rep) {
      if (!failed[static_cast<std::size_t>(rep)]) pd.draws.push_back(slots[static_cast<std::size_t>(rep)][k]);
    }
    const TAndP tp = t_and_p(pd.draws, pd.estimate);
    pd.se = tp.se;
    pd.t = tp.t;
    pd.p = tp.p;
    pd.t_defined = tp.t_defined;
    pd.bias = stats::mean(pd.draws) - pd.estimate;
    try {
      std::tie(pd.bc_lo, pd.bc_hi) = bc_interval(pd.draws, pd.estimate, result.level);
      pd.bc_defined = true;
    } catch (const Error&) {
      pd.bc_lo = pd.bc_hi = std::numeric_limits<double>::quiet_NaN();
      pd.bc_defined = false;
    }
  }
  return result;
}

}  // namespace frpsa
