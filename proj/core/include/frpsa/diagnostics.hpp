#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "frpsa/dataset.hpp"
#include "frpsa/pls.hpp"

namespace frpsa {

/// Standardized Cronbach's alpha: k*rbar / (1 + (k-1)*rbar) with rbar the
/// mean pairwise correlation. Items are columns; needs >= 2 of them.
double cronbach_alpha(const Eigen::MatrixXd& items);

/// (sum lambda)^2 / ((sum lambda)^2 + sum(1 - lambda^2)); loadings in [-1, 1].
double composite_reliability(const Eigen::VectorXd& loadings);

/// Mean squared loading.
double average_variance_extracted(const Eigen::VectorXd& loadings);

/// Correlation of every indicator with every given score column.
/// Rows follow `indicator_cols`, columns follow the score matrix.
Eigen::MatrixXd cross_loadings(const Eigen::MatrixXd& scores, const StandardizedDataset& d,
                               const std::vector<int>& indicator_cols);

/// Full-collinearity VIF: for each score column j, 1 / (1 - R2_j) from
/// regressing column j on all the others. R2 within 1e-12 of 1 is an error
/// naming the construct.
std::vector<double> full_collinearity_vif(const Eigen::MatrixXd& scores,
                                          const std::vector<std::string>& names);

struct ConstructDiagnostics {
  std::string construct;
  Mode mode = Mode::Reflective;
  int n_items = 0;
  double alpha = 1.0;  // single-item constructs are reported as 1.0
  double composite_reliability = 1.0;
  double ave = 1.0;
  double vif = 1.0;
  bool alpha_ok = true, cr_ok = true, ave_ok = true, vif_ok = true;
};

struct IndicatorRow {
  std::string indicator;
  std::string own_construct;
  Eigen::VectorXd loadings;  // one per construct column
  bool dominant = true;      // own loading strictly exceeds every cross-loading
};

/// Measurement-model report: reliability and convergent validity per
/// construct, the cross-loading matrix with a dominance verdict per
/// indicator, and full-collinearity VIFs on the construct scores.
struct MeasurementReport {
  std::vector<std::string> constructs;  // score columns used (no interactions)
  std::vector<ConstructDiagnostics> reliability;
  std::vector<IndicatorRow> cross;
  bool all_pass = false;
};

struct Thresholds {
  double alpha_min = 0.7;
  double cr_min = 0.7;
  double ave_min = 0.5;
  double vif_max = 5.0;  // strict: vif < 5 passes, 5.0 fails
};

/// Run the full measurement screen on a converged estimate. Interaction
/// product columns are not constructs and are excluded.
MeasurementReport measurement_report(const PlsEstimate& e, const StandardizedDataset& d,
                                     const Thresholds& t = {});

/// Re-apply thresholds to an existing report (pure verdict logic).
void apply_thresholds(MeasurementReport& r, const Thresholds& t);

}  // namespace frpsa
