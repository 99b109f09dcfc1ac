#include "frpsa/ann.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "frpsa/effects.hpp"
#include "frpsa/errors.hpp"

namespace frpsa {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

int default_hidden_nodes(int inputs) { return (inputs + 1 + 1) / 2; }

namespace {

Eigen::VectorXd scale_input(const MlpModel& m, const Eigen::VectorXd& x) {
  Eigen::VectorXd s(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double range = m.x_max(i) - m.x_min(i);
    s(i) = range > 0.0 ? std::clamp((x(i) - m.x_min(i)) / range, 0.0, 1.0) : 0.5;
  }
  return s;
}

Eigen::MatrixXd scale_inputs(const MlpModel& m, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd s(X.rows(), X.cols());
  for (Eigen::Index r = 0; r < X.rows(); ++r) s.row(r) = scale_input(m, X.row(r).transpose()).transpose();
  return s;
}

double scale_target(const MlpModel& m, double y) {
  const double range = m.y_max - m.y_min;
  return range > 0.0 ? std::clamp((y - m.y_min) / range, 0.0, 1.0) : 0.5;
}

double unscale_target(const MlpModel& m, double o) {
  return m.y_min + o * (m.y_max - m.y_min);
}

// Forward pass in scaled space: returns the output activations and, when
// given, the hidden activations.
Eigen::VectorXd forward(const MlpModel& m, const Eigen::MatrixXd& Xs, Eigen::MatrixXd* hidden) {
  const Eigen::Index n = Xs.rows();
  Eigen::MatrixXd a(n, Xs.cols() + 1);
  a.leftCols(Xs.cols()) = Xs;
  a.col(Xs.cols()).setOnes();

  Eigen::MatrixXd h = (a * m.w1.transpose()).unaryExpr([](double z) { return sigmoid(z); });
  Eigen::MatrixXd hb(n, h.cols() + 1);
  hb.leftCols(h.cols()) = h;
  hb.col(h.cols()).setOnes();
  if (hidden != nullptr) *hidden = std::move(h);

  return (hb * m.w2.transpose()).unaryExpr([](double z) { return sigmoid(z); });
}

}  // namespace

MlpModel init_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int hidden, Rng& rng) {
  if (hidden < 1) throw input_error("init_mlp: hidden must be >= 1");
  MlpModel m;
  m.x_min = X.colwise().minCoeff();
  m.x_max = X.colwise().maxCoeff();
  m.y_min = y.minCoeff();
  m.y_max = y.maxCoeff();
  m.w1.resize(hidden, X.cols() + 1);
  m.w2.resize(hidden + 1);
  for (Eigen::Index r = 0; r < m.w1.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.w1.cols(); ++c) m.w1(r, c) = rng.uniform(-0.5, 0.5);
  }
  for (Eigen::Index c = 0; c < m.w2.size(); ++c) m.w2(c) = rng.uniform(-0.5, 0.5);
  return m;
}

double mlp_loss(const MlpModel& m, const Eigen::MatrixXd& Xs, const Eigen::VectorXd& ys) {
  const Eigen::VectorXd o = forward(m, Xs, nullptr);
  return (o - ys).squaredNorm() / 2.0;
}

void mlp_gradient(const MlpModel& m, const Eigen::MatrixXd& Xs, const Eigen::VectorXd& ys,
                  Eigen::MatrixXd& g1, Eigen::RowVectorXd& g2) {
  const Eigen::Index n = Xs.rows();
  const Eigen::Index h = m.hidden_dim();

  Eigen::MatrixXd a(n, Xs.cols() + 1);
  a.leftCols(Xs.cols()) = Xs;
  a.col(Xs.cols()).setOnes();

  Eigen::MatrixXd hidden = (a * m.w1.transpose()).unaryExpr([](double z) { return sigmoid(z); });
  Eigen::MatrixXd hb(n, h + 1);
  hb.leftCols(h) = hidden;
  hb.col(h).setOnes();

  const Eigen::VectorXd o = (hb * m.w2.transpose()).unaryExpr([](double z) { return sigmoid(z); });

  // d2 = (o - y) * o(1-o)
  const Eigen::VectorXd d2 = (o - ys).cwiseProduct(o.cwiseProduct((1.0 - o.array()).matrix()));
  g2 = d2.transpose() * hb;

  const Eigen::MatrixXd dh = d2 * m.w2.head(h);
  const Eigen::MatrixXd d1 = dh.cwiseProduct(hidden.cwiseProduct((1.0 - hidden.array()).matrix()));
  g1 = d1.transpose() * a;
}

MlpModel train_mlp_from(MlpModel m, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        int epochs, double rate) {
  if (!X.allFinite() || !y.allFinite()) throw input_error("train_mlp: non-finite inputs");
  if (X.rows() != y.size()) throw input_error("train_mlp: X and y disagree on case count");
  if (X.rows() < m.hidden_dim() + 2) {
    throw input_error("train_mlp: need at least hidden + 2 cases");
  }

  const Eigen::MatrixXd Xs = scale_inputs(m, X);
  Eigen::VectorXd ys(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) ys(i) = scale_target(m, y(i));

  double loss_prev = mlp_loss(m, Xs, ys);
  if (!std::isfinite(loss_prev)) {
    throw numeric_error("train_mlp: non-finite loss; lower the learning rate");
  }

  Eigen::MatrixXd g1;
  Eigen::RowVectorXd g2;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    mlp_gradient(m, Xs, ys, g1, g2);
    MlpModel candidate = m;
    candidate.w1 -= rate * g1;
    candidate.w2 -= rate * g2;
    const double loss_new = mlp_loss(candidate, Xs, ys);
    if (!std::isfinite(loss_new)) {
      throw numeric_error("train_mlp: training diverged; lower the learning rate");
    }
    if (loss_new > loss_prev) {
      // Roll back and halve the step; the loss sequence stays non-increasing.
      rate *= 0.5;
      if (rate < 1e-14) break;
      continue;
    }
    m = std::move(candidate);
    loss_prev = loss_new;
  }
  return m;
}

MlpModel train_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int hidden, int epochs,
                   double rate, std::uint64_t seed) {
  if (hidden < 1) throw input_error("train_mlp: hidden must be >= 1");
  Rng rng(seed);
  MlpModel m = init_mlp(X, y, hidden, rng);
  return train_mlp_from(std::move(m), X, y, epochs, rate);
}

double predict(const MlpModel& m, const Eigen::VectorXd& x) {
  if (x.size() != m.input_dim()) {
    throw input_error("predict: input has " + std::to_string(x.size()) + " dimensions, model expects " +
                      std::to_string(m.input_dim()));
  }
  const Eigen::MatrixXd Xs = scale_input(m, x).transpose();
  const Eigen::VectorXd o = forward(m, Xs, nullptr);
  return unscale_target(m, o(0));
}

Eigen::VectorXd predict_batch(const MlpModel& m, const Eigen::MatrixXd& X) {
  if (X.cols() != m.input_dim()) throw input_error("predict_batch: dimension mismatch");
  const Eigen::VectorXd o = forward(m, scale_inputs(m, X), nullptr);
  return o.unaryExpr([&](double v) { return unscale_target(m, v); });
}

CvResult kfold_cv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k, int hidden,
                  int epochs, double rate, std::uint64_t seed, int threads) {
  const int n = static_cast<int>(X.rows());
  if (k < 2) throw input_error("kfold_cv: k must be >= 2");
  if (n < 2 * k) throw input_error("kfold_cv: need at least 2k cases");
  if (X.rows() != y.size()) throw input_error("kfold_cv: X and y disagree on case count");
  if (hidden < 1) throw input_error("kfold_cv: hidden must be >= 1");

  // Seeded Fisher-Yates shuffle, then contiguous slices of near-equal size.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng = Rng::stream(seed, kShuffleStream);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(shuffle_rng.bounded(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  const int base = n / k;
  const int extra = n % k;
  CvResult cv;
  cv.folds.resize(static_cast<std::size_t>(k));
  cv.models.resize(static_cast<std::size_t>(k));
  cv.test_indices.resize(static_cast<std::size_t>(k));

  std::vector<std::pair<int, int>> ranges;  // [start, size] into `order`
  int cursor = 0;
  for (int f = 0; f < k; ++f) {
    const int size = base + (f < extra ? 1 : 0);
    ranges.emplace_back(cursor, size);
    cursor += size;
  }

  auto run_fold = [&](int f) {
    const auto [start, size] = ranges[static_cast<std::size_t>(f)];
    std::vector<int> test(order.begin() + start, order.begin() + start + size);
    std::sort(test.begin(), test.end());

    std::vector<char> in_test(static_cast<std::size_t>(n), 0);
    for (int idx : test) in_test[static_cast<std::size_t>(idx)] = 1;

    const int n_train = n - size;
    Eigen::MatrixXd Xtr(n_train, X.cols());
    Eigen::VectorXd ytr(n_train);
    Eigen::MatrixXd Xte(size, X.cols());
    Eigen::VectorXd yte(size);
    int tr = 0, te = 0;
    for (int i = 0; i < n; ++i) {
      if (in_test[static_cast<std::size_t>(i)]) {
        Xte.row(te) = X.row(i);
        yte(te++) = y(i);
      } else {
        Xtr.row(tr) = X.row(i);
        ytr(tr++) = y(i);
      }
    }

    const auto t0 = std::chrono::steady_clock::now();
    Rng init_rng = Rng::stream(seed, kFoldStream + static_cast<std::uint64_t>(f));
    MlpModel model = init_mlp(Xtr, ytr, hidden, init_rng);
    model = train_mlp_from(std::move(model), Xtr, ytr, epochs, rate);
    const auto t1 = std::chrono::steady_clock::now();

    FoldResult r;
    r.fold = f + 1;
    r.n_train = n_train;
    r.n_test = size;
    r.sse_train = (predict_batch(model, Xtr) - ytr).squaredNorm();
    r.rmse_train = std::sqrt(r.sse_train / static_cast<double>(n_train));
    r.sse_test = (predict_batch(model, Xte) - yte).squaredNorm();
    r.rmse_test = std::sqrt(r.sse_test / static_cast<double>(size));
    r.train_seconds = std::chrono::duration<double>(t1 - t0).count();

    cv.folds[static_cast<std::size_t>(f)] = std::move(r);
    cv.models[static_cast<std::size_t>(f)] = std::move(model);
    cv.test_indices[static_cast<std::size_t>(f)] = std::move(test);
  };

  const int workers = std::max(1, std::min(threads, k));
  if (workers == 1) {
    for (int f = 0; f < k; ++f) run_fold(f);
  } else {
    std::atomic<int> nextf{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const int f = nextf.fetch_add(1);
          if (f >= k) return;
          try {
            run_fold(f);
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
  return cv;
}

double variance_explained_percent(const CvResult& cv, const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y) {
  const double ybar = y.mean();
  const double sst = (y.array() - ybar).square().sum();
  if (sst == 0.0) throw input_error("variance_explained: target has zero variance");

  double sse = 0.0;
  for (std::size_t f = 0; f < cv.models.size(); ++f) {
    for (int idx : cv.test_indices[f]) {
      const double pred = predict(cv.models[f], X.row(idx).transpose());
      sse += (pred - y(idx)) * (pred - y(idx));
    }
  }
  return 100.0 * (1.0 - sse / sst);
}

namespace {

Eigen::VectorXd derivative_importance(const MlpModel& m, const Eigen::MatrixXd& X,
                                      const std::vector<int>& train_cases) {
  const int p = m.input_dim();
  const int h = m.hidden_dim();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(p);
  const double y_range = m.y_max - m.y_min;

  for (int idx : train_cases) {
    const Eigen::VectorXd xs = scale_input(m, X.row(idx).transpose());
    Eigen::VectorXd a(p + 1);
    a.head(p) = xs;
    a(p) = 1.0;
    const Eigen::VectorXd z1 = m.w1 * a;
    const Eigen::VectorXd hval = z1.unaryExpr([](double z) { return sigmoid(z); });
    double z2 = m.w2(h);
    for (int j = 0; j < h; ++j) z2 += m.w2(j) * hval(j);
    const double o = sigmoid(z2);
    const double dout = o * (1.0 - o);

    for (int i = 0; i < p; ++i) {
      double d = 0.0;
      for (int j = 0; j < h; ++j) d += m.w2(j) * hval(j) * (1.0 - hval(j)) * m.w1(j, i);
      d *= dout;
      const double x_range = m.x_max(i) - m.x_min(i);
      d *= x_range > 0.0 ? y_range / x_range : 0.0;
      acc(i) += std::fabs(d);
    }
  }
  return acc / static_cast<double>(train_cases.size());
}

Eigen::VectorXd garson_importance(const MlpModel& m) {
  const int p = m.input_dim();
  const int h = m.hidden_dim();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < h; ++j) {
    double denom = 0.0;
    for (int i = 0; i < p; ++i) denom += std::fabs(m.w1(j, i));
    if (denom == 0.0) continue;
    for (int i = 0; i < p; ++i) acc(i) += std::fabs(m.w1(j, i)) / denom * std::fabs(m.w2(j));
  }
  return acc;
}

}  // namespace

SensitivityReport sensitivity(const CvResult& cv, const Eigen::MatrixXd& X,
                              ImportanceMethod method) {
  if (cv.models.empty()) throw input_error("sensitivity: no trained models");
  const int k = static_cast<int>(cv.models.size());
  const int p = static_cast<int>(X.cols());
  const int n = static_cast<int>(X.rows());

  SensitivityReport rep;
  rep.per_fold.resize(k, p);

  for (int f = 0; f < k; ++f) {
    std::vector<char> in_test(static_cast<std::size_t>(n), 0);
    for (int idx : cv.test_indices[static_cast<std::size_t>(f)]) in_test[static_cast<std::size_t>(idx)] = 1;
    std::vector<int> train_cases;
    train_cases.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      if (!in_test[static_cast<std::size_t>(i)]) train_cases.push_back(i);
    }
    if (train_cases.empty()) train_cases.assign(1, 0);

    Eigen::VectorXd imp = method == ImportanceMethod::Derivative
                              ? derivative_importance(cv.models[static_cast<std::size_t>(f)], X, train_cases)
                              : garson_importance(cv.models[static_cast<std::size_t>(f)]);
    const double total = imp.sum();
    if (total <= 0.0) {
      throw numeric_error("sensitivity: fold " + std::to_string(f + 1) +
                          " has all-zero input derivatives");
    }
    rep.per_fold.row(f) = (imp / total).transpose();
  }

  rep.mean_importance = rep.per_fold.colwise().mean();
  const double top = rep.mean_importance.maxCoeff();
  if (top <= 0.0) throw numeric_error("sensitivity: degenerate importance profile");
  rep.normalized_pct = rep.mean_importance / top * 100.0;
  return rep;
}

std::vector<std::string> select_inputs(const ModelSpec& m, const PlsEstimate& e,
                                       const BootstrapResult& b, double alpha) {
  // The outcome is the unique sink of the declared path graph.
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
    throw input_error("select_inputs: expected exactly one outcome construct, found " +
                      std::to_string(sinks.size()));
  }
  const std::string& outcome = sinks.front();

  auto significant = [&](const std::string& param) {
    const auto* pd = b.find(param);
    return pd != nullptr && pd->t_defined && pd->p < alpha;
  };

  std::set<std::string> selected;
  for (const auto& p : e.paths) {
    if (p.target != outcome || p.role != PathRole::Structural) continue;
    if (significant("path:" + p.source + "->" + p.target)) selected.insert(p.source);
  }
  for (const auto& chain : enumerate_indirect(m)) {
    if (chain.back() != outcome) continue;
    if (significant("indirect:" + chain_name(chain))) {
      selected.insert(chain.begin(), chain.end() - 1);
    }
  }
  for (const auto& def : m.interactions) {
    if (def.target != outcome) continue;
    if (significant("path:" + def.name() + "->" + def.target)) selected.insert(def.moderator);
  }

  std::vector<std::string> inputs;
  for (const auto& c : m.constructs) {
    if (selected.count(c.name)) inputs.push_back(c.name);
  }
  if (inputs.empty()) {
    throw input_error(
        "select_inputs: no significant predictor at alpha = " + std::to_string(alpha) +
        "; list the stage-two inputs explicitly under ann.inputs to override");
  }
  return inputs;
}

}  // namespace frpsa
