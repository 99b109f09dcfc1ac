#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "frpsa/bootstrap.hpp"
#include "frpsa/model_spec.hpp"
#include "frpsa/pls.hpp"
#include "frpsa/rng.hpp"

namespace frpsa {

/// Logistic activation 1 / (1 + e^-x); saturates, never returns a non-finite
/// value.
double sigmoid(double x);

/// One-hidden-layer perceptron with sigmoid hidden and output units. Inputs
/// and target are min-max scaled to [0, 1] with parameters taken from the
/// training split; prediction inverse-scales the output.
struct MlpModel {
  Eigen::MatrixXd w1;       // hidden x (inputs + 1), last column is the bias
  Eigen::RowVectorXd w2;    // 1 x (hidden + 1), last entry is the bias
  Eigen::VectorXd x_min, x_max;
  double y_min = 0.0, y_max = 1.0;

  int input_dim() const { return static_cast<int>(w1.cols()) - 1; }
  int hidden_dim() const { return static_cast<int>(w1.rows()); }
};

/// Random initial weights (uniform on [-0.5, 0.5]) with scaling parameters
/// fitted to X and y.
MlpModel init_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int hidden, Rng& rng);

/// Half the summed squared error over the scaled training data.
double mlp_loss(const MlpModel& m, const Eigen::MatrixXd& Xs, const Eigen::VectorXd& ys);

/// Analytic full-batch backpropagation gradient of mlp_loss.
void mlp_gradient(const MlpModel& m, const Eigen::MatrixXd& Xs, const Eigen::VectorXd& ys,
                  Eigen::MatrixXd& g1, Eigen::RowVectorXd& g2);

/// Full-batch gradient descent on squared error. An epoch that increases the
/// loss is rolled back and the rate halved, so the recorded loss sequence is
/// non-increasing and the final training SSE never exceeds the initial one.
MlpModel train_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int hidden, int epochs,
                   double rate, std::uint64_t seed);

/// Same trainer starting from an explicit model (scaling parameters are kept
/// as given).
MlpModel train_mlp_from(MlpModel m, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        int epochs, double rate);

double predict(const MlpModel& m, const Eigen::VectorXd& x);
Eigen::VectorXd predict_batch(const MlpModel& m, const Eigen::MatrixXd& X);

struct FoldResult {
  int fold = 0;
  int n_train = 0;
  int n_test = 0;
  double sse_train = 0.0;
  double rmse_train = 0.0;  // sqrt(sse / n), original target units
  double sse_test = 0.0;
  double rmse_test = 0.0;
  double train_seconds = 0.0;  // informational; excluded from deterministic output
};

struct CvResult {
  std::vector<FoldResult> folds;
  std::vector<MlpModel> models;
  std::vector<std::vector<int>> test_indices;  // per fold, ascending
};

/// Seeded shuffle, k near-equal disjoint folds covering every case exactly
/// once; per-fold weight initialization comes from substream (seed, fold).
/// Folds train independently and may run in parallel; results are ordered by
/// fold index and independent of scheduling.
CvResult kfold_cv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k, int hidden,
                  int epochs, double rate, std::uint64_t seed, int threads = 1);

/// Pooled out-of-fold R-squared, as a percentage.
double variance_explained_percent(const CvResult& cv, const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y);

enum class ImportanceMethod {
  Derivative,  // mean |dy/dx_i| over the fold's training cases
  Garson,      // weight-magnitude decomposition
};

struct SensitivityReport {
  Eigen::MatrixXd per_fold;         // folds x inputs, each row sums to 1
  Eigen::VectorXd mean_importance;  // per input
  Eigen::VectorXd normalized_pct;   // mean / max(mean) * 100
};

SensitivityReport sensitivity(const CvResult& cv, const Eigen::MatrixXd& X,
                              ImportanceMethod method = ImportanceMethod::Derivative);

/// Stage-two input selection: constructs on significant structural paths
/// into the outcome, sources of significant indirect chains, and moderators
/// of significant interactions, in construct declaration order. Control
/// paths never qualify. The outcome is the unique sink of the declared
/// paths. With no significant predictor, suggests the explicit `ann.inputs`
/// override in the error.
std::vector<std::string> select_inputs(const ModelSpec& m, const PlsEstimate& e,
                                       const BootstrapResult& b, double alpha);

/// Default hidden-layer width for a given input count.
int default_hidden_nodes(int inputs);

}  // namespace frpsa
