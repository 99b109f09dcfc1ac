#include "frpsa/pls.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "frpsa/errors.hpp"

namespace frpsa {

namespace {

// Solve the least-squares problem min ||y - X b|| through the Gram matrix,
// with a rank check so perfect collinearity surfaces as an error instead of
// garbage coefficients.
Eigen::VectorXd solve_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const std::string& context) {
  const Eigen::MatrixXd gram = X.transpose() * X;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
  if (qr.rank() < X.cols()) {
    throw numeric_error(context + ": singular regressor matrix (perfect collinearity)");
  }
  return qr.solve(X.transpose() * y);
}

struct Edge {
  int source;
  int target;
  PathRole role;
};

// Estimation graph: declared paths, component->higher-order edges from the
// repeated-indicators expansion, and an implied main-effect edge for every
// interaction moderator without a declared path to its target.
std::vector<Edge> estimation_edges(const ModelSpec& m) {
  std::vector<Edge> edges;
  auto add_edge = [&](int s, int t, PathRole role) {
    for (const auto& e : edges) {
      if (e.source == s && e.target == t) return;
    }
    edges.push_back({s, t, role});
  };

  for (const auto& c : m.constructs) {
    const int target = m.construct_index(c.name);
    for (const auto& comp : c.composed_of) add_edge(m.construct_index(comp), target, PathRole::Structural);
  }
  for (const auto& p : m.paths) {
    add_edge(m.construct_index(p.source), m.construct_index(p.target), p.role);
  }
  for (const auto& i : m.interactions) {
    add_edge(m.construct_index(i.moderator), m.construct_index(i.target), PathRole::Structural);
  }
  return edges;
}

}  // namespace

int PlsEstimate::score_index(std::string_view name) const {
  for (std::size_t i = 0; i < score_names.size(); ++i) {
    if (score_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

const Eigen::MatrixXd::ConstColXpr PlsEstimate::score(std::string_view name) const {
  const int idx = score_index(name);
  if (idx < 0) throw input_error("no score column for construct '" + std::string(name) + "'");
  return scores.col(idx);
}

bool PlsEstimate::has_path(std::string_view source, std::string_view target) const {
  for (const auto& p : paths) {
    if (p.source == source && p.target == target) return true;
  }
  return false;
}

double PlsEstimate::path(std::string_view source, std::string_view target) const {
  for (const auto& p : paths) {
    if (p.source == source && p.target == target) return p.beta;
  }
  throw input_error("no estimated path " + std::string(source) + " -> " + std::string(target));
}

const OuterBlock* PlsEstimate::find_block(std::string_view construct) const {
  for (const auto& b : blocks) {
    if (b.construct == construct) return &b;
  }
  return nullptr;
}

PlsEstimate estimate(const ModelSpec& m, const StandardizedDataset& data,
                     const EstimateOptions& opts) {
  for (const auto& c : m.constructs) {
    if (c.is_higher_order()) {
      throw input_error("construct '" + c.name + "' is unexpanded; call expand_higher_order first");
    }
  }

  const int n = data.n_cases();
  const int n_constructs = static_cast<int>(m.constructs.size());
  const double denom = static_cast<double>(n - 1);

  PlsEstimate e;
  e.blocks.reserve(static_cast<std::size_t>(n_constructs));
  for (const auto& c : m.constructs) {
    OuterBlock b;
    b.construct = c.name;
    b.mode = c.mode;
    b.is_expanded = !c.composed_of.empty();
    b.indicator_names = c.indicators;
    for (const auto& ind : c.indicators) b.indicator_cols.push_back(data.column_index(ind));
    b.weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(b.indicator_cols.size()));
    e.blocks.push_back(std::move(b));
    e.score_names.push_back(c.name);
  }

  const auto edges = estimation_edges(m);
  std::vector<std::vector<int>> preds(n_constructs), succs(n_constructs);
  std::vector<std::vector<PathRole>> pred_roles(n_constructs);
  for (const auto& edge : edges) {
    preds[edge.target].push_back(edge.source);
    pred_roles[edge.target].push_back(edge.role);
    succs[edge.source].push_back(edge.target);
  }
  for (int j = 0; j < n_constructs; ++j) {
    if (preds[j].empty() && succs[j].empty()) {
      throw input_error("construct '" + m.constructs[static_cast<std::size_t>(j)].name +
                        "' is isolated: it appears in no path, composition, or interaction");
    }
  }

  auto block_matrix = [&](const OuterBlock& b) {
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(b.indicator_cols.size()));
    for (std::size_t k = 0; k < b.indicator_cols.size(); ++k) X.col(static_cast<Eigen::Index>(k)) = data.values.col(b.indicator_cols[k]);
    return X;
  };

  // Normalize weights so the block score has unit sample variance.
  auto normalize = [&](OuterBlock& b, const Eigen::MatrixXd& X) {
    const Eigen::VectorXd y = X * b.weights;
    const double sd = std::sqrt(y.squaredNorm() / denom);
    if (!(sd > 0.0)) {
      throw numeric_error("construct '" + b.construct + "': degenerate block (zero-variance score)");
    }
    b.weights /= sd;
  };

  std::vector<Eigen::MatrixXd> block_x;
  block_x.reserve(e.blocks.size());
  for (auto& b : e.blocks) {
    block_x.push_back(block_matrix(b));
    normalize(b, block_x.back());
  }

  Eigen::MatrixXd scores(n, n_constructs);
  auto refresh_scores = [&]() {
    for (int j = 0; j < n_constructs; ++j) {
      scores.col(j) = block_x[static_cast<std::size_t>(j)] * e.blocks[static_cast<std::size_t>(j)].weights;
    }
  };
  refresh_scores();

  bool converged = false;
  int iterations = 0;
  while (iterations < opts.max_iterations) {
    ++iterations;

    // Inner approximation, path weighting scheme: regression coefficients
    // toward predecessors, correlations toward successors.
    Eigen::MatrixXd inner(n, n_constructs);
    for (int j = 0; j < n_constructs; ++j) {
      Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
      const auto& pj = preds[static_cast<std::size_t>(j)];
      if (!pj.empty()) {
        Eigen::MatrixXd P(n, static_cast<Eigen::Index>(pj.size()));
        for (std::size_t k = 0; k < pj.size(); ++k) P.col(static_cast<Eigen::Index>(k)) = scores.col(pj[k]);
        const Eigen::VectorXd beta =
            solve_ols(P, scores.col(j), "construct '" + e.blocks[static_cast<std::size_t>(j)].construct + "' inner regression");
        z += P * beta;
      }
      for (int s : succs[static_cast<std::size_t>(j)]) {
        const double r = scores.col(j).dot(scores.col(s)) / denom;
        z += r * scores.col(s);
      }
      const double sd = std::sqrt(z.squaredNorm() / denom);
      if (!(sd > 0.0)) {
        throw numeric_error("construct '" + e.blocks[static_cast<std::size_t>(j)].construct +
                            "': inner proxy has zero variance");
      }
      inner.col(j) = z / sd;
    }

    // Outer update: Mode A correlation weights, Mode B regression weights.
    double delta = 0.0;
    for (int j = 0; j < n_constructs; ++j) {
      auto& b = e.blocks[static_cast<std::size_t>(j)];
      const Eigen::MatrixXd& X = block_x[static_cast<std::size_t>(j)];
      Eigen::VectorXd w_new;
      if (b.mode == Mode::Reflective) {
        w_new = X.transpose() * inner.col(j) / denom;
      } else {
        w_new = solve_ols(X, inner.col(j), "construct '" + b.construct + "' (Mode B outer weights)");
      }
      const Eigen::VectorXd y = X * w_new;
      const double sd = std::sqrt(y.squaredNorm() / denom);
      if (!(sd > 0.0)) {
        throw numeric_error("construct '" + b.construct + "': degenerate block (zero-variance score)");
      }
      w_new /= sd;
      delta = std::max(delta, (w_new - b.weights).cwiseAbs().maxCoeff());
      b.weights = std::move(w_new);
    }
    refresh_scores();

    if (delta < opts.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw numeric_error("PLS estimation did not converge within " +
                        std::to_string(opts.max_iterations) + " iterations");
  }
  e.iterations_used = iterations;

  // Orient every score so the sum of its outer loadings is positive (ties
  // broken by the first nonzero loading).
  for (int j = 0; j < n_constructs; ++j) {
    auto& b = e.blocks[static_cast<std::size_t>(j)];
    const Eigen::MatrixXd& X = block_x[static_cast<std::size_t>(j)];
    Eigen::VectorXd loadings = X.transpose() * scores.col(j) / denom;
    double orient = loadings.sum();
    if (orient == 0.0) {
      for (Eigen::Index k = 0; k < loadings.size(); ++k) {
        if (loadings(k) != 0.0) {
          orient = loadings(k);
          break;
        }
      }
    }
    if (orient < 0.0) {
      b.weights = -b.weights;
      scores.col(j) = -scores.col(j);
      loadings = -loadings;
    }
    b.loadings = std::move(loadings);
  }
  e.scores = std::move(scores);

  // Structural regressions on the converged scores.
  for (int j = 0; j < n_constructs; ++j) {
    const auto& pj = preds[static_cast<std::size_t>(j)];
    if (pj.empty()) continue;
    Eigen::MatrixXd P(n, static_cast<Eigen::Index>(pj.size()));
    for (std::size_t k = 0; k < pj.size(); ++k) P.col(static_cast<Eigen::Index>(k)) = e.scores.col(pj[k]);
    const std::string& target = e.blocks[static_cast<std::size_t>(j)].construct;
    const Eigen::VectorXd beta = solve_ols(P, e.scores.col(j), "structural regression of '" + target + "'");
    for (std::size_t k = 0; k < pj.size(); ++k) {
      e.paths.push_back({e.blocks[static_cast<std::size_t>(pj[k])].construct, target,
                         pred_roles[static_cast<std::size_t>(j)][k], beta(static_cast<Eigen::Index>(k))});
    }
    const double sse = (e.scores.col(j) - P * beta).squaredNorm();
    const double sst = e.scores.col(j).squaredNorm();
    e.r_squared.emplace_back(target, std::clamp(1.0 - sse / sst, 0.0, 1.0));
  }

  return e;
}

PlsEstimate build_interaction_scores(const PlsEstimate& e, const ModelSpec& m) {
  if (m.interactions.empty()) return e;

  PlsEstimate out = e;
  const int n = static_cast<int>(out.scores.rows());
  const double denom = static_cast<double>(n - 1);

  const int base_cols = static_cast<int>(out.scores.cols());
  out.scores.conservativeResize(Eigen::NoChange, base_cols + static_cast<int>(m.interactions.size()));

  for (std::size_t k = 0; k < m.interactions.size(); ++k) {
    const auto& def = m.interactions[k];
    const int mod = out.score_index(def.moderator);
    const int foc = out.score_index(def.focal);
    if (mod < 0 || foc < 0) {
      throw input_error("interaction '" + def.name() + "': moderator or focal score missing");
    }
    Eigen::VectorXd product = out.scores.col(mod).cwiseProduct(out.scores.col(foc));
    const double mean = product.mean();
    product.array() -= mean;
    const double sd = std::sqrt(product.squaredNorm() / denom);
    if (!(sd > 0.0)) {
      throw numeric_error("interaction '" + def.name() + "': product column has zero variance");
    }
    out.scores.col(base_cols + static_cast<int>(k)) = product / sd;
    out.score_names.push_back(def.name());
  }

  // Re-run the structural regression of every moderated target with its
  // product terms appended after the original predictors.
  std::set<std::string> affected;
  for (const auto& def : m.interactions) affected.insert(def.target);

  for (const auto& target : affected) {
    std::vector<std::string> pred_names;
    std::vector<PathRole> roles;
    for (const auto& p : e.paths) {
      if (p.target == target) {
        pred_names.push_back(p.source);
        roles.push_back(p.role);
      }
    }
    for (const auto& def : m.interactions) {
      if (def.target == target) {
        pred_names.push_back(def.name());
        roles.push_back(PathRole::Interaction);
      }
    }
    if (pred_names.empty()) continue;

    Eigen::MatrixXd P(n, static_cast<Eigen::Index>(pred_names.size()));
    for (std::size_t k = 0; k < pred_names.size(); ++k) {
      P.col(static_cast<Eigen::Index>(k)) = out.scores.col(out.score_index(pred_names[k]));
    }
    const Eigen::VectorXd y = out.scores.col(out.score_index(target));
    const Eigen::VectorXd beta = solve_ols(P, y, "structural regression of '" + target + "'");

    // Replace the target's old path estimates in place, then append products.
    std::erase_if(out.paths, [&](const PathEstimate& p) { return p.target == target; });
    for (std::size_t k = 0; k < pred_names.size(); ++k) {
      out.paths.push_back({pred_names[k], target, roles[k], beta(static_cast<Eigen::Index>(k))});
    }
    const double sse = (y - P * beta).squaredNorm();
    const double sst = y.squaredNorm();
    for (auto& [name, r2] : out.r_squared) {
      if (name == target) r2 = std::clamp(1.0 - sse / sst, 0.0, 1.0);
    }
  }
  return out;
}

double r_squared(const PlsEstimate& e, std::string_view target) {
  for (const auto& [name, r2] : e.r_squared) {
    if (name == target) return r2;
  }
  throw input_error("construct '" + std::string(target) + "' is exogenous: no R-squared");
}

}  // namespace frpsa
