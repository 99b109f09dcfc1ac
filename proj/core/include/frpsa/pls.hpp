#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <vector>

#include "frpsa/dataset.hpp"
#include "frpsa/model_spec.hpp"

namespace frpsa {

struct EstimateOptions {
  double tolerance = 1e-7;  // max absolute change in normalized outer weights
  int max_iterations = 300;
};

/// Measurement block of one construct: outer weights produce the score,
/// outer loadings are each indicator's correlation with that score.
struct OuterBlock {
  std::string construct;
  Mode mode = Mode::Reflective;
  bool is_expanded = false;  // block holds repeated indicators of components
  std::vector<std::string> indicator_names;
  std::vector<int> indicator_cols;
  Eigen::VectorXd weights;
  Eigen::VectorXd loadings;
};

struct PathEstimate {
  std::string source;
  std::string target;
  PathRole role = PathRole::Structural;
  double beta = 0.0;
};

/// Converged PLS solution. Score columns are unit-variance (sample N-1
/// convention) and ordered: constructs in declaration order, then interaction
/// products in declaration order.
struct PlsEstimate {
  std::vector<std::string> score_names;
  Eigen::MatrixXd scores;
  std::vector<OuterBlock> blocks;
  std::vector<PathEstimate> paths;
  std::vector<std::pair<std::string, double>> r_squared;
  int iterations_used = 0;

  int score_index(std::string_view name) const;  // -1 if absent
  const Eigen::MatrixXd::ConstColXpr score(std::string_view name) const;
  bool has_path(std::string_view source, std::string_view target) const;
  double path(std::string_view source, std::string_view target) const;
  const OuterBlock* find_block(std::string_view construct) const;
};

/// Iterative PLS path-modeling estimator (path weighting scheme; Mode A for
/// reflective blocks, Mode B for formative blocks; all outer weights start
/// at +1). The spec must already be expanded. Structural relations estimated
/// by OLS on the standardized scores: declared paths, the component paths of
/// every expanded higher-order construct, and a main-effect path for each
/// interaction moderator that lacks a declared one.
PlsEstimate estimate(const ModelSpec& expanded, const StandardizedDataset& data,
                     const EstimateOptions& opts = {});

/// Append one product score column per interaction (elementwise product of
/// the moderator and focal scores, re-standardized) and re-run the inner
/// regression of every affected target with its product terms included.
PlsEstimate build_interaction_scores(const PlsEstimate& e, const ModelSpec& m);

/// Coefficient of determination of `target`'s structural regression.
/// Throws if `target` is exogenous.
double r_squared(const PlsEstimate& e, std::string_view target);

}  // namespace frpsa
