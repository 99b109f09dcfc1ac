#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "frpsa/ann.hpp"
#include "frpsa/dataset.hpp"
#include "frpsa/diagnostics.hpp"
#include "frpsa/effects.hpp"

namespace frpsa {

enum class OutputFormat { Csv, Text };

/// Table-4 style significance stars: *, **, *** for p < .05, .01, .001.
std::string significance_stars(double p);

struct FormativeWeightRow {
  std::string indicator;
  std::string construct;
  double weight = 0.0;
  double se = 0.0, t = 0.0, p = 0.0, bias = 0.0, ci_lo = 0.0, ci_hi = 0.0;
  bool t_defined = false;
  bool bc_defined = false;
};

struct StructuralRow {
  std::string source;
  std::string target;
  PathRole role = PathRole::Structural;
  double beta = 0.0;
  double se = 0.0, t = 0.0, p = 0.0;
  bool t_defined = false;
};

/// Everything the pipeline produced, already final: the emitters format but
/// never recompute.
struct FrpsaReport {
  bool has_pls = false;
  bool has_ann = false;
  bool bootstrap_skipped = false;

  ScreeningSummary screening;
  MeasurementReport measurement;
  std::vector<FormativeWeightRow> formative;
  std::vector<StructuralRow> structural;
  std::vector<std::pair<std::string, double>> r_squared;
  std::vector<IndirectEffect> indirect;
  std::vector<ModerationVerdict> moderation;
  std::vector<TotalEffect> totals;

  std::vector<std::string> ann_inputs;
  std::vector<FoldResult> folds;
  SensitivityReport sensitivity;
  double variance_explained_pct = 0.0;

  std::uint64_t seed = 0;
  int reps = 0;
  double alpha = 0.05;
  int cv_folds = 0, hidden = 0, epochs = 0;
  double rate = 0.0;
  int threads = 1;
  int iterations_used = 0;
  int failed_reps = 0;
  std::vector<std::string> warnings;

  double wall_seconds = 0.0;       // volatile; confined to meta.json "timing"
  double bootstrap_seconds = 0.0;  // volatile
};

/// Write the table files plus meta.json into out_dir through a staging
/// directory that is renamed into place on success and removed on failure.
/// CSV numbers carry 6 significant digits. Every value except the "timing"
/// block of meta.json is a pure function of (spec, data, seed, flags).
void emit_report(const FrpsaReport& r, const std::filesystem::path& out_dir,
                 OutputFormat format);

}  // namespace frpsa
