#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace frpsa {

/// Rectangular case x indicator matrix of survey-style numeric responses.
/// Missing cells are stored as NaN until screen_cases removes them.
struct Dataset {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;  // n_cases x n_columns, NaN = missing

  int n_cases() const { return static_cast<int>(values.rows()); }
  int n_columns() const { return static_cast<int>(values.cols()); }
  bool has_missing() const;

  /// Index of a named column; throws an input error if absent.
  int column_index(std::string_view name) const;
};

struct ScreeningSummary {
  int received = 0;
  int excluded = 0;
  int valid = 0;
};

/// Dataset with every column z-scored (sample N-1 standard deviation).
/// The original per-column means and sds are retained so raw values can be
/// reconstructed exactly.
struct StandardizedDataset {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;
  Eigen::VectorXd means;
  Eigen::VectorXd sds;

  int n_cases() const { return static_cast<int>(values.rows()); }
  int n_columns() const { return static_cast<int>(values.cols()); }
  int column_index(std::string_view name) const;
};

/// Parse delimiter-separated numeric text. First row is the header; empty or
/// non-numeric cells become missing. `origin` names the source in errors.
Dataset parse_csv(std::string_view text, char delimiter = ',',
                  std::string_view origin = "<memory>");

Dataset load_dataset(const std::filesystem::path& path, char delimiter = ',');

void write_csv(const Dataset& d, const std::filesystem::path& path);
std::string to_csv(const Dataset& d);

/// Listwise deletion: keep exactly the rows with no missing cell, preserving
/// order. Throws if nothing survives.
std::pair<Dataset, ScreeningSummary> screen_cases(const Dataset& d);

/// Z-score every column. Requires N >= 2, no missing cells, and nonzero
/// variance everywhere (a constant column is reported by name).
StandardizedDataset standardize(const Dataset& d);

}  // namespace frpsa
