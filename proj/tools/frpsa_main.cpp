// frpsa: two-stage PLS path modeling + neural-network importance analysis.
//
// Subcommands:
//   run       full pipeline (tables 1-7 + meta.json)
//   pls       stage one only (tables 1-5 + meta.json)
//   ann       stage two on a CSV of score columns (tables 6-7 + meta.json)
//   gen       draw a synthetic dataset from a generator parameter file
//   validate  parse and lint a model spec (optionally against a dataset)
//
// Exit codes: 0 success, 2 input/spec error, 3 numerical failure, 4 I/O error.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "frpsa/errors.hpp"
#include "frpsa/pipeline.hpp"
#include "frpsa/synthetic.hpp"
#include "frpsa/version.hpp"

namespace {

struct CommonFlags {
  std::string spec, data, out;
  std::string delimiter = ",";
  std::optional<std::uint64_t> seed;
  std::optional<int> reps, folds, hidden, epochs;
  std::optional<double> alpha, rate;
  int threads = 0;
  std::string format = "csv";
  bool skip_bootstrap = false;
  std::string importance = "derivative";
};

char parse_delimiter(const std::string& s) {
  if (s.size() != 1) throw frpsa::input_error("--delimiter must be a single character");
  return s[0];
}

frpsa::OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return frpsa::OutputFormat::Csv;
  if (s == "text") return frpsa::OutputFormat::Text;
  throw frpsa::input_error("--format must be 'csv' or 'text'");
}

frpsa::ImportanceMethod parse_importance(const std::string& s) {
  if (s == "derivative") return frpsa::ImportanceMethod::Derivative;
  if (s == "garson") return frpsa::ImportanceMethod::Garson;
  throw frpsa::input_error("--importance must be 'derivative' or 'garson'");
}

frpsa::RunOptions to_run_options(const CommonFlags& f) {
  frpsa::RunOptions o;
  o.spec_path = f.spec;
  o.data_path = f.data;
  o.out_dir = f.out;
  o.delimiter = parse_delimiter(f.delimiter);
  o.seed = f.seed;
  o.reps = f.reps;
  o.folds = f.folds;
  o.hidden = f.hidden;
  o.epochs = f.epochs;
  o.alpha = f.alpha;
  o.rate = f.rate;
  o.threads = f.threads;
  o.format = parse_format(f.format);
  o.skip_bootstrap = f.skip_bootstrap;
  o.importance = parse_importance(f.importance);
  return o;
}

void add_common(CLI::App* cmd, CommonFlags& f, bool with_ann_flags) {
  cmd->add_option("--spec", f.spec, "Model spec JSON file")->required();
  cmd->add_option("--data", f.data, "Input dataset CSV")->required();
  cmd->add_option("--out", f.out, "Output directory")->required();
  cmd->add_option("--delimiter", f.delimiter, "CSV delimiter (default ',')");
  cmd->add_option("--seed", f.seed, "Master seed (overrides the spec)");
  cmd->add_option("--reps", f.reps, "Bootstrap replications (overrides the spec)");
  cmd->add_option("--alpha", f.alpha, "Significance level (overrides the spec)");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = hardware)");
  cmd->add_option("--format", f.format, "Output format: csv or text");
  cmd->add_flag("--skip-bootstrap", f.skip_bootstrap, "Skip resampling; blank t/p columns");
  if (with_ann_flags) {
    cmd->add_option("--folds", f.folds, "Cross-validation folds (overrides the spec)");
    cmd->add_option("--hidden", f.hidden, "Hidden nodes, 0 = auto (overrides the spec)");
    cmd->add_option("--epochs", f.epochs, "Training epochs (overrides the spec)");
    cmd->add_option("--rate", f.rate, "Learning rate (overrides the spec)");
    cmd->add_option("--importance", f.importance, "Importance method: derivative or garson");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage PLS-SEM and neural-network analysis"};
  app.set_version_flag("--version", std::string("frpsa ") + frpsa::kVersion);
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Full two-stage pipeline");
  add_common(run_cmd, run_flags, true);

  CommonFlags pls_flags;
  auto* pls_cmd = app.add_subcommand("pls", "Stage one only");
  add_common(pls_cmd, pls_flags, false);

  // ann: stage two on provided scores
  std::string ann_data, ann_out, ann_target;
  std::string ann_delim = ",", ann_format = "csv", ann_importance = "derivative";
  std::uint64_t ann_seed = 1;
  int ann_folds = 10, ann_hidden = 0, ann_epochs = 2000, ann_threads = 0;
  double ann_rate = 0.1;
  auto* ann_cmd = app.add_subcommand("ann", "Stage two on a CSV of scores");
  ann_cmd->add_option("--data", ann_data, "CSV of score columns")->required();
  ann_cmd->add_option("--target", ann_target, "Target column name")->required();
  ann_cmd->add_option("--out", ann_out, "Output directory")->required();
  ann_cmd->add_option("--delimiter", ann_delim, "CSV delimiter");
  ann_cmd->add_option("--seed", ann_seed, "Master seed");
  ann_cmd->add_option("--folds", ann_folds, "Cross-validation folds");
  ann_cmd->add_option("--hidden", ann_hidden, "Hidden nodes, 0 = auto");
  ann_cmd->add_option("--epochs", ann_epochs, "Training epochs");
  ann_cmd->add_option("--rate", ann_rate, "Learning rate");
  ann_cmd->add_option("--threads", ann_threads, "Worker threads (0 = hardware)");
  ann_cmd->add_option("--format", ann_format, "Output format: csv or text");
  ann_cmd->add_option("--importance", ann_importance, "derivative or garson");

  // gen: synthetic data
  std::string gen_params, gen_out, gen_spec;
  std::uint64_t gen_seed = 1;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen_cmd->add_option("--params", gen_params, "Generator parameter JSON")->required();
  gen_cmd->add_option("--out", gen_out, "Output CSV path")->required();
  gen_cmd->add_option("--seed", gen_seed, "Generator seed");
  gen_cmd->add_option("--spec", gen_spec, "Optional model spec to cross-check columns");

  // validate: spec lint
  std::string val_spec, val_data;
  std::string val_delim = ",";
  auto* val_cmd = app.add_subcommand("validate", "Validate a model spec");
  val_cmd->add_option("--spec", val_spec, "Model spec JSON file")->required();
  val_cmd->add_option("--data", val_data, "Optional dataset to check indicators against");
  val_cmd->add_option("--delimiter", val_delim, "CSV delimiter");

  try {
    app.parse(argc, argv);

    if (*run_cmd) {
      const auto report = frpsa::run_frpsa(to_run_options(run_flags));
      std::printf("ok: %d cases (%d excluded), %d PLS iterations, %d/%d bootstrap failures, "
                  "variance explained %.2f%%\n",
                  report.screening.valid, report.screening.excluded, report.iterations_used,
                  report.failed_reps, report.reps, report.variance_explained_pct);
      for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      return 0;
    }
    if (*pls_cmd) {
      const auto report = frpsa::run_pls(to_run_options(pls_flags));
      std::printf("ok: %d cases (%d excluded), %d PLS iterations, %d/%d bootstrap failures\n",
                  report.screening.valid, report.screening.excluded, report.iterations_used,
                  report.failed_reps, report.reps);
      for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      return 0;
    }
    if (*ann_cmd) {
      frpsa::AnnRunOptions o;
      o.data_path = ann_data;
      o.target = ann_target;
      o.out_dir = ann_out;
      o.delimiter = parse_delimiter(ann_delim);
      o.seed = ann_seed;
      o.folds = ann_folds;
      o.hidden = ann_hidden;
      o.epochs = ann_epochs;
      o.rate = ann_rate;
      o.threads = ann_threads;
      o.format = parse_format(ann_format);
      o.importance = parse_importance(ann_importance);
      const auto report = frpsa::run_ann(o);
      std::printf("ok: %zu inputs, variance explained %.2f%%\n", report.ann_inputs.size(),
                  report.variance_explained_pct);
      return 0;
    }
    if (*gen_cmd) {
      const auto gspec = frpsa::load_generator_spec(gen_params);
      const frpsa::Dataset d = frpsa::generate_synthetic(gspec, gen_seed);
      if (!gen_spec.empty()) {
        const auto model = frpsa::load_spec(gen_spec);
        frpsa::validate_against_columns(model, d.columns);
        frpsa::validate_against_columns(frpsa::expand_higher_order(model), d.columns);
      }
      frpsa::write_csv(d, gen_out);
      std::printf("ok: wrote %d cases x %d columns to %s\n", d.n_cases(), d.n_columns(),
                  gen_out.c_str());
      return 0;
    }
    if (*val_cmd) {
      const auto spec = frpsa::load_spec(val_spec);
      const auto expanded = frpsa::expand_higher_order(spec);
      if (!val_data.empty()) {
        const auto d = frpsa::load_dataset(val_data, parse_delimiter(val_delim));
        frpsa::validate_against_columns(spec, d.columns);
        frpsa::validate_against_columns(expanded, d.columns);
      }
      int higher = 0, formative = 0;
      for (const auto& c : spec.constructs) {
        if (c.is_higher_order()) ++higher;
        if (c.mode == frpsa::Mode::Formative) ++formative;
      }
      std::printf("ok: %zu constructs (%d higher-order, %d formative), %zu paths, "
                  "%zu interactions, reps=%d, alpha=%g, folds=%d\n",
                  spec.constructs.size(), higher, formative, spec.paths.size(),
                  spec.interactions.size(), spec.bootstrap_reps, spec.alpha, spec.ann.folds);
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const frpsa::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
