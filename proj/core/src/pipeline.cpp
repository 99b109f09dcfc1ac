#include "frpsa/pipeline.hpp"

#include <chrono>
#include <set>
#include <thread>

#include "frpsa/errors.hpp"

namespace frpsa {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void fill_param_inference(const BootstrapResult* boot, const std::string& name, double& se,
                          double& t, double& p, bool& t_defined) {
  if (boot == nullptr) return;
  const ParamDraws* pd = boot->find(name);
  if (pd == nullptr) return;
  se = pd->se;
  t = pd->t;
  p = pd->p;
  t_defined = pd->t_defined;
}

// Inputs when the bootstrap is skipped and no explicit list is given: every
// construct that could qualify, i.e. with significance taken as granted.
std::vector<std::string> all_candidate_inputs(const ModelSpec& m, const PlsEstimate& e,
                                              const std::string& outcome) {
  std::set<std::string> selected;
  for (const auto& p : e.paths) {
    if (p.target == outcome && p.role == PathRole::Structural) selected.insert(p.source);
  }
  for (const auto& chain : enumerate_indirect(m)) {
    if (chain.back() == outcome) selected.insert(chain.begin(), chain.end() - 1);
  }
  for (const auto& def : m.interactions) {
    if (def.target == outcome) selected.insert(def.moderator);
  }
  std::vector<std::string> inputs;
  for (const auto& c : m.constructs) {
    if (selected.count(c.name)) inputs.push_back(c.name);
  }
  return inputs;
}

FrpsaReport run_stage_one(const RunOptions& opts, ModelSpec& spec_out, ModelSpec& expanded_out,
                          StandardizedDataset& data_out, PlsEstimate& est_out,
                          std::optional<BootstrapResult>& boot_out) {
  FrpsaReport report;
  report.has_pls = true;

  ModelSpec spec = stage("spec", [&] { return load_spec(opts.spec_path); });
  if (opts.seed) spec.seed = *opts.seed;
  if (opts.reps) spec.bootstrap_reps = *opts.reps;
  if (opts.alpha) spec.alpha = *opts.alpha;
  if (opts.folds) spec.ann.folds = *opts.folds;
  if (opts.hidden) spec.ann.hidden = *opts.hidden;
  if (opts.epochs) spec.ann.epochs = *opts.epochs;
  if (opts.rate) spec.ann.rate = *opts.rate;

  const Dataset raw = stage("data", [&] { return load_dataset(opts.data_path, opts.delimiter); });

  auto [screened, summary] = stage("screen", [&] { return screen_cases(raw); });
  report.screening = summary;

  const StandardizedDataset data = stage("standardize", [&] { return standardize(screened); });

  const ModelSpec expanded = stage("validate", [&] {
    validate_against_columns(spec, data.columns);
    ModelSpec ex = expand_higher_order(spec);
    validate_against_columns(ex, data.columns);
    return ex;
  });

  const int threads = resolve_threads(opts.threads);
  report.threads = threads;
  report.seed = spec.seed;
  report.alpha = spec.alpha;
  report.reps = spec.bootstrap_reps;
  report.bootstrap_skipped = opts.skip_bootstrap;

  PlsEstimate est = stage("estimate", [&] {
    return build_interaction_scores(estimate(expanded, data), expanded);
  });
  report.iterations_used = est.iterations_used;

  report.measurement = stage("diagnostics", [&] { return measurement_report(est, data); });

  std::optional<BootstrapResult> boot;
  if (!opts.skip_bootstrap) {
    const auto t0 = Clock::now();
    boot = stage("bootstrap", [&] {
      return run_bootstrap(expanded, data, spec.bootstrap_reps, spec.seed, threads);
    });
    report.bootstrap_seconds = seconds_since(t0);
    report.failed_reps = boot->failed_reps;
  } else {
    report.warnings.push_back("bootstrap skipped: t, p, stars and intervals are blank");
  }
  const BootstrapResult* bptr = boot ? &*boot : nullptr;

  stage("effects", [&] {
    for (const auto& chain : enumerate_indirect(expanded)) {
      report.indirect.push_back(indirect_effect(chain, est, bptr, spec.alpha));
    }
    report.moderation = moderation_report(expanded, est, bptr, spec.alpha);
    report.totals = total_effects(expanded, est);
    return 0;
  });

  // Formative outer-weight rows (the repeated-indicator blocks included).
  for (const auto& b : est.blocks) {
    if (b.mode != Mode::Formative) continue;
    for (std::size_t k = 0; k < b.indicator_names.size(); ++k) {
      FormativeWeightRow row;
      row.indicator = b.indicator_names[k];
      row.construct = b.construct;
      row.weight = b.weights(static_cast<Eigen::Index>(k));
      if (bptr != nullptr) {
        const ParamDraws* pd = bptr->find("weight:" + b.construct + ":" + row.indicator);
        if (pd != nullptr) {
          row.se = pd->se;
          row.t = pd->t;
          row.p = pd->p;
          row.bias = pd->bias;
          row.ci_lo = pd->bc_lo;
          row.ci_hi = pd->bc_hi;
          row.t_defined = pd->t_defined;
          row.bc_defined = pd->bc_defined;
        }
      }
      report.formative.push_back(std::move(row));
    }
  }

  // Structural rows grouped by target in declaration order.
  for (const auto& c : expanded.constructs) {
    for (const auto& p : est.paths) {
      if (p.target != c.name) continue;
      StructuralRow row;
      row.source = p.source;
      row.target = p.target;
      row.role = p.role;
      row.beta = p.beta;
      fill_param_inference(bptr, "path:" + p.source + "->" + p.target, row.se, row.t, row.p,
                           row.t_defined);
      report.structural.push_back(std::move(row));
    }
  }
  report.r_squared = est.r_squared;

  spec_out = std::move(spec);
  expanded_out = expanded;
  data_out = data;
  est_out = std::move(est);
  boot_out = std::move(boot);
  return report;
}

void run_stage_two(const ModelSpec& spec, const ModelSpec& expanded, const PlsEstimate& est,
                   const std::optional<BootstrapResult>& boot, const RunOptions& opts,
                   FrpsaReport& report) {
  report.has_ann = true;

  const std::string outcome = stage("ann", [&] { return outcome_construct(expanded); });

  std::vector<std::string> inputs = spec.ann.inputs;
  if (inputs.empty()) {
    if (boot) {
      inputs = stage("ann", [&] { return select_inputs(expanded, est, *boot, spec.alpha); });
    } else {
      inputs = all_candidate_inputs(expanded, est, outcome);
      report.warnings.push_back(
          "bootstrap skipped: stage-two inputs default to every structural predictor");
      if (inputs.empty()) {
        throw input_error("ann: no candidate inputs; declare ann.inputs explicitly");
      }
    }
  }
  report.ann_inputs = inputs;

  const int p = static_cast<int>(inputs.size());
  const int n = static_cast<int>(est.scores.rows());
  Eigen::MatrixXd X(n, p);
  for (int c = 0; c < p; ++c) {
    const int idx = est.score_index(inputs[static_cast<std::size_t>(c)]);
    if (idx < 0) throw input_error("ann: input '" + inputs[static_cast<std::size_t>(c)] + "' has no score");
    X.col(c) = est.scores.col(idx);
  }
  const Eigen::VectorXd y = est.score(outcome);

  const int hidden = spec.ann.hidden > 0 ? spec.ann.hidden : default_hidden_nodes(p);
  report.hidden = hidden;
  report.cv_folds = spec.ann.folds;
  report.epochs = spec.ann.epochs;
  report.rate = spec.ann.rate;

  const int n_params = hidden * (p + 1) + hidden + 1;
  if (n < 50 * n_params) {
    report.warnings.push_back("sample size " + std::to_string(n) + " is below 50x the " +
                              std::to_string(n_params) + " adjustable network parameters");
  }

  const int threads = resolve_threads(opts.threads);
  CvResult cv = stage("ann", [&] {
    return kfold_cv(X, y, spec.ann.folds, hidden, spec.ann.epochs, spec.ann.rate, spec.seed,
                    threads);
  });
  report.folds = cv.folds;
  report.variance_explained_pct =
      stage("ann", [&] { return variance_explained_percent(cv, X, y); });
  report.sensitivity = stage("ann", [&] { return sensitivity(cv, X, opts.importance); });
}

}  // namespace

std::string outcome_construct(const ModelSpec& m) {
  std::set<std::string> sources, targets;
  for (const auto& p : m.paths) {
    sources.insert(p.source);
    targets.insert(p.target);
  }
  std::vector<std::string> sinks;
  for (const auto& c : m.constructs) {
    if (targets.count(c.name) && !sources.count(c.name)) sinks.push_back(c.name);
  }
  if (sinks.size() != 1) {
    throw input_error("expected exactly one outcome construct (a unique sink), found " +
                      std::to_string(sinks.size()));
  }
  return sinks.front();
}

FrpsaReport run_frpsa(const RunOptions& opts) {
  const auto t0 = Clock::now();
  ModelSpec spec, expanded;
  StandardizedDataset data;
  PlsEstimate est;
  std::optional<BootstrapResult> boot;

  FrpsaReport report = run_stage_one(opts, spec, expanded, data, est, boot);
  run_stage_two(spec, expanded, est, boot, opts, report);

  report.wall_seconds = seconds_since(t0);
  stage("report", [&] {
    emit_report(report, opts.out_dir, opts.format);
    return 0;
  });
  return report;
}

FrpsaReport run_pls(const RunOptions& opts) {
  const auto t0 = Clock::now();
  ModelSpec spec, expanded;
  StandardizedDataset data;
  PlsEstimate est;
  std::optional<BootstrapResult> boot;

  FrpsaReport report = run_stage_one(opts, spec, expanded, data, est, boot);
  report.wall_seconds = seconds_since(t0);
  stage("report", [&] {
    emit_report(report, opts.out_dir, opts.format);
    return 0;
  });
  return report;
}

FrpsaReport run_ann(const AnnRunOptions& opts) {
  const auto t0 = Clock::now();
  FrpsaReport report;
  report.has_ann = true;
  report.seed = opts.seed;
  report.threads = resolve_threads(opts.threads);

  const Dataset raw = stage("data", [&] { return load_dataset(opts.data_path, opts.delimiter); });
  if (raw.has_missing()) throw input_error("ann: score file contains missing cells");

  const int target_col = stage("ann", [&] { return raw.column_index(opts.target); });
  std::vector<std::string> inputs;
  std::vector<int> input_cols;
  for (int c = 0; c < raw.n_columns(); ++c) {
    if (c == target_col) continue;
    inputs.push_back(raw.columns[static_cast<std::size_t>(c)]);
    input_cols.push_back(c);
  }
  if (inputs.empty()) throw input_error("ann: no input columns besides the target");
  report.ann_inputs = inputs;

  Eigen::MatrixXd X(raw.n_cases(), static_cast<Eigen::Index>(input_cols.size()));
  for (std::size_t c = 0; c < input_cols.size(); ++c) X.col(static_cast<Eigen::Index>(c)) = raw.values.col(input_cols[c]);
  const Eigen::VectorXd y = raw.values.col(target_col);

  const int hidden = opts.hidden > 0 ? opts.hidden : default_hidden_nodes(static_cast<int>(inputs.size()));
  report.hidden = hidden;
  report.cv_folds = opts.folds;
  report.epochs = opts.epochs;
  report.rate = opts.rate;

  CvResult cv = stage("ann", [&] {
    return kfold_cv(X, y, opts.folds, hidden, opts.epochs, opts.rate, opts.seed,
                    resolve_threads(opts.threads));
  });
  report.folds = cv.folds;
  report.variance_explained_pct =
      stage("ann", [&] { return variance_explained_percent(cv, X, y); });
  report.sensitivity = stage("ann", [&] { return sensitivity(cv, X, opts.importance); });

  report.wall_seconds = seconds_since(t0);
  stage("report", [&] {
    emit_report(report, opts.out_dir, opts.format);
    return 0;
  });
  return report;
}

}  // namespace frpsa
