#include "frpsa/diagnostics.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "frpsa/errors.hpp"
#include "frpsa/stats.hpp"

namespace frpsa {

namespace {

double column_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw numeric_error("correlation of a zero-variance column");
  return a.dot(b) / (na * nb);
}

}  // namespace

double cronbach_alpha(const Eigen::MatrixXd& items) {
  const auto k = items.cols();
  if (k < 2) throw input_error("cronbach_alpha: need at least 2 items");

  Eigen::MatrixXd centered = items;
  for (Eigen::Index c = 0; c < k; ++c) {
    centered.col(c).array() -= items.col(c).mean();
    if (centered.col(c).norm() == 0.0) throw numeric_error("cronbach_alpha: zero-variance item");
  }

  double rbar = 0.0;
  int pairs = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      rbar += column_correlation(centered.col(i), centered.col(j));
      ++pairs;
    }
  }
  rbar /= static_cast<double>(pairs);
  const double kd = static_cast<double>(k);
  return kd * rbar / (1.0 + (kd - 1.0) * rbar);
}

double composite_reliability(const Eigen::VectorXd& loadings) {
  if (loadings.size() == 0) throw input_error("composite_reliability: empty loading vector");
  double sum = 0.0, err = 0.0;
  for (Eigen::Index i = 0; i < loadings.size(); ++i) {
    const double l = loadings(i);
    if (std::fabs(l) > 1.0 + 1e-10) {
      throw input_error("composite_reliability: loading outside [-1, 1]");
    }
    sum += l;
    err += std::max(0.0, 1.0 - l * l);
  }
  const double s2 = sum * sum;
  return s2 / (s2 + err);
}

double average_variance_extracted(const Eigen::VectorXd& loadings) {
  if (loadings.size() == 0) throw input_error("average_variance_extracted: empty loading vector");
  return loadings.squaredNorm() / static_cast<double>(loadings.size());
}

Eigen::MatrixXd cross_loadings(const Eigen::MatrixXd& scores, const StandardizedDataset& d,
                               const std::vector<int>& indicator_cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(indicator_cols.size()), scores.cols());
  for (std::size_t r = 0; r < indicator_cols.size(); ++r) {
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      out(static_cast<Eigen::Index>(r), c) =
          column_correlation(d.values.col(indicator_cols[r]), scores.col(c));
    }
  }
  return out;
}

std::vector<double> full_collinearity_vif(const Eigen::MatrixXd& scores,
                                          const std::vector<std::string>& names) {
  const auto p = scores.cols();
  if (p < 2) throw input_error("full_collinearity_vif: need at least 2 constructs");

  // Center first so the regressions are correlation-based; VIF then equals
  // the diagonal of the inverse correlation matrix.
  Eigen::MatrixXd centered = scores;
  for (Eigen::Index c = 0; c < p; ++c) centered.col(c).array() -= scores.col(c).mean();

  std::vector<double> out(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::MatrixXd others(centered.rows(), p - 1);
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < p; ++c) {
      if (c != j) others.col(k++) = centered.col(c);
    }
    const Eigen::VectorXd y = centered.col(j);
    const Eigen::VectorXd beta =
        (others.transpose() * others).ldlt().solve(others.transpose() * y);
    const double sse = (y - others * beta).squaredNorm();
    const double sst = y.squaredNorm();
    const double r2 = 1.0 - sse / sst;
    if (r2 >= 1.0 - 1e-12) {
      const std::string name = j < static_cast<Eigen::Index>(names.size())
                                   ? names[static_cast<std::size_t>(j)]
                                   : std::to_string(j);
      throw numeric_error("full_collinearity_vif: '" + name +
                          "' is an exact linear combination of the other constructs");
    }
    out[static_cast<std::size_t>(j)] = 1.0 / (1.0 - r2);
  }
  return out;
}

void apply_thresholds(MeasurementReport& r, const Thresholds& t) {
  r.all_pass = true;
  for (auto& c : r.reliability) {
    c.alpha_ok = c.alpha >= t.alpha_min;
    c.cr_ok = c.composite_reliability >= t.cr_min;
    c.ave_ok = c.ave >= t.ave_min;
    c.vif_ok = c.vif < t.vif_max;
    if (!(c.alpha_ok && c.cr_ok && c.ave_ok && c.vif_ok)) r.all_pass = false;
  }
  for (const auto& row : r.cross) {
    if (!row.dominant) r.all_pass = false;
  }
}

MeasurementReport measurement_report(const PlsEstimate& e, const StandardizedDataset& d,
                                     const Thresholds& t) {
  MeasurementReport r;

  // Construct columns only; interaction products have no measurement model.
  Eigen::MatrixXd scores(e.scores.rows(), static_cast<Eigen::Index>(e.blocks.size()));
  for (std::size_t j = 0; j < e.blocks.size(); ++j) {
    r.constructs.push_back(e.blocks[j].construct);
    scores.col(static_cast<Eigen::Index>(j)) = e.scores.col(e.score_index(e.blocks[j].construct));
  }

  std::vector<double> vifs;
  if (e.blocks.size() >= 2) vifs = full_collinearity_vif(scores, r.constructs);

  for (std::size_t j = 0; j < e.blocks.size(); ++j) {
    const auto& b = e.blocks[j];
    ConstructDiagnostics c;
    c.construct = b.construct;
    c.mode = b.mode;
    c.n_items = static_cast<int>(b.indicator_cols.size());
    if (c.n_items >= 2) {
      Eigen::MatrixXd items(d.values.rows(), static_cast<Eigen::Index>(b.indicator_cols.size()));
      for (std::size_t k = 0; k < b.indicator_cols.size(); ++k) {
        items.col(static_cast<Eigen::Index>(k)) = d.values.col(b.indicator_cols[k]);
      }
      c.alpha = cronbach_alpha(items);
      c.composite_reliability = composite_reliability(b.loadings);
      c.ave = average_variance_extracted(b.loadings);
    }
    c.vif = vifs.empty() ? 1.0 : vifs[j];
    r.reliability.push_back(std::move(c));
  }

  // Cross-loadings: every indicator against every construct score, with the
  // dominance verdict taken against all other columns. Indicators repeated
  // into an expanded higher-order block keep their first-order row only.
  for (std::size_t j = 0; j < e.blocks.size(); ++j) {
    const auto& b = e.blocks[j];
    if (b.is_expanded) continue;
    const Eigen::MatrixXd cl = cross_loadings(scores, d, b.indicator_cols);
    for (std::size_t k = 0; k < b.indicator_cols.size(); ++k) {
      IndicatorRow row;
      row.indicator = b.indicator_names[k];
      row.own_construct = b.construct;
      row.loadings = cl.row(static_cast<Eigen::Index>(k));
      const double own = row.loadings(static_cast<Eigen::Index>(j));
      for (Eigen::Index c = 0; c < row.loadings.size(); ++c) {
        if (c != static_cast<Eigen::Index>(j) && row.loadings(c) >= own) row.dominant = false;
      }
      r.cross.push_back(std::move(row));
    }
  }

  apply_thresholds(r, t);
  return r;
}

}  // namespace frpsa
