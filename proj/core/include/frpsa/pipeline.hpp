#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "frpsa/report.hpp"

namespace frpsa {

/// Command-line overrides win over spec-file values; everything influencing
/// the numbers lives here so a run is reproducible from its invocation.
struct RunOptions {
  std::filesystem::path spec_path;
  std::filesystem::path data_path;
  std::filesystem::path out_dir;
  char delimiter = ',';
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<int> folds;
  std::optional<int> hidden;
  std::optional<int> epochs;
  std::optional<double> alpha;
  std::optional<double> rate;
  int threads = 0;  // 0 = hardware concurrency
  OutputFormat format = OutputFormat::Csv;
  bool skip_bootstrap = false;
  ImportanceMethod importance = ImportanceMethod::Derivative;
};

/// Full two-stage run: load -> screen -> standardize -> expand -> estimate
/// -> diagnostics -> bootstrap -> effects -> input selection -> tenfold CV
/// -> sensitivity -> report. Artifacts are published atomically to out_dir;
/// errors carry the failing stage in their message and leave no partial
/// output behind.
FrpsaReport run_frpsa(const RunOptions& opts);

/// Stage one only (tables 1-5 plus metadata).
FrpsaReport run_pls(const RunOptions& opts);

struct AnnRunOptions {
  std::filesystem::path data_path;  // CSV of score columns, one being the target
  std::string target;
  std::filesystem::path out_dir;
  char delimiter = ',';
  std::uint64_t seed = 1;
  int folds = 10;
  int hidden = 0;  // 0 = auto
  int epochs = 2000;
  double rate = 0.1;
  int threads = 0;
  OutputFormat format = OutputFormat::Csv;
  ImportanceMethod importance = ImportanceMethod::Derivative;
};

/// Stage two on externally provided scores (tables 6-7 plus metadata).
FrpsaReport run_ann(const AnnRunOptions& opts);

/// The unique sink of the declared path graph.
std::string outcome_construct(const ModelSpec& m);

}  // namespace frpsa
