#include "frpsa/synthetic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "frpsa/errors.hpp"
#include "frpsa/rng.hpp"

namespace frpsa {

using nlohmann::json;

namespace {

struct BlockSolution {
  std::vector<double> factor_loadings;
  double q = 1.0;  // population corr(PLS composite, factor)
};

// Population PLS Mode A fixpoint for a one-factor block: weights are
// proportional to the factor loadings, so the composite loading of indicator
// i is a_i (1 + S2 - a_i^2) / sd with S2 = sum a^2 and
// sd^2 = S2 + S2^2 - sum a^4.
std::vector<double> implied_composite_loadings(const std::vector<double>& a, double& q_out) {
  double s2 = 0.0, s4 = 0.0;
  for (double v : a) {
    s2 += v * v;
    s4 += v * v * v * v;
  }
  const double var = s2 + s2 * s2 - s4;
  const double sd = std::sqrt(var);
  std::vector<double> rho(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) rho[i] = a[i] * (1.0 + s2 - a[i] * a[i]) / sd;
  q_out = s2 / sd;
  return rho;
}

// Back-solve factor loadings whose implied composite loadings match the
// requested ones.
BlockSolution solve_composite_block(const std::string& construct,
                                    const std::vector<double>& target) {
  for (double t : target) {
    if (!(t > 0.0 && t < 1.0)) {
      if (target.size() == 1 && t == 1.0) break;  // single indicator: identity
      throw input_error("block '" + construct +
                        "': composite loadings must lie in (0, 1) (single-indicator blocks must "
                        "use 1.0)");
    }
  }
  BlockSolution sol;
  if (target.size() == 1) {
    if (target[0] != 1.0) {
      throw input_error("block '" + construct +
                        "': a single-indicator composite always loads 1.0; requested " +
                        std::to_string(target[0]));
    }
    sol.factor_loadings = {1.0};
    sol.q = 1.0;
    return sol;
  }

  std::vector<double> a = target;
  double q = 1.0;
  bool converged = false;
  for (int iter = 0; iter < 500 && !converged; ++iter) {
    const std::vector<double> rho = implied_composite_loadings(a, q);
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      err = std::max(err, std::fabs(rho[i] - target[i]));
      a[i] = std::clamp(a[i] * target[i] / rho[i], 1e-6, 0.999999);
    }
    converged = err < 1e-12;
  }
  if (!converged) {
    throw input_error("block '" + construct + "': requested composite loadings are infeasible");
  }
  implied_composite_loadings(a, q);
  sol.factor_loadings = std::move(a);
  sol.q = q;
  return sol;
}

}  // namespace

GeneratorSpec parse_generator_spec(const std::string& json_text, std::string_view origin) {
  const std::string where(origin);
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw input_error(where + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw input_error(where + ": top level must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    static const std::set<std::string> allowed{"n", "composite_loadings", "variables",
                                              "correlations", "blocks"};
    if (!allowed.count(it.key())) throw input_error(where + ": unknown key '" + it.key() + "'");
  }

  GeneratorSpec g;
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw input_error(where + ": integer 'n' is required");
  }
  g.n = doc["n"].get<int>();
  if (doc.contains("composite_loadings")) {
    if (!doc["composite_loadings"].is_boolean()) {
      throw input_error(where + ": 'composite_loadings' must be a boolean");
    }
    g.composite_loadings = doc["composite_loadings"].get<bool>();
  }

  if (!doc.contains("variables") || !doc["variables"].is_array()) {
    throw input_error(where + ": 'variables' array is required");
  }
  for (const auto& v : doc["variables"]) {
    const std::string ctx = where + ": variables[" + std::to_string(g.variables.size()) + "]";
    if (!v.is_object()) throw input_error(ctx + " must be an object");
    for (auto it = v.begin(); it != v.end(); ++it) {
      static const std::set<std::string> allowed{"name", "predictors", "interactions", "parts",
                                                "disturbance_sd"};
      if (!allowed.count(it.key())) throw input_error(ctx + ": unknown key '" + it.key() + "'");
    }
    GenVariable var;
    if (!v.contains("name") || !v["name"].is_string()) throw input_error(ctx + ": 'name' required");
    var.name = v["name"].get<std::string>();
    if (v.contains("predictors")) {
      for (const auto& p : v["predictors"]) {
        if (!p.is_object() || !p.contains("of") || !p.contains("coef")) {
          throw input_error(ctx + ": predictors need 'of' and 'coef'");
        }
        var.predictors.emplace_back(p["of"].get<std::string>(), p["coef"].get<double>());
      }
    }
    if (v.contains("interactions")) {
      for (const auto& p : v["interactions"]) {
        if (!p.is_object() || !p.contains("a") || !p.contains("b") || !p.contains("coef")) {
          throw input_error(ctx + ": interactions need 'a', 'b' and 'coef'");
        }
        var.interactions.emplace_back(p["a"].get<std::string>(), p["b"].get<std::string>(),
                                      p["coef"].get<double>());
      }
    }
    if (v.contains("parts")) {
      for (const auto& p : v["parts"]) {
        if (p.is_string()) {
          var.parts.emplace_back(p.get<std::string>(), 1.0);
        } else if (p.is_object() && p.contains("of")) {
          var.parts.emplace_back(p["of"].get<std::string>(),
                                 p.contains("weight") ? p["weight"].get<double>() : 1.0);
        } else {
          throw input_error(ctx + ": parts entries must be names or {of, weight}");
        }
      }
    }
    if (v.contains("disturbance_sd")) {
      if (v["disturbance_sd"].is_string()) {
        if (v["disturbance_sd"].get<std::string>() != "auto") {
          throw input_error(ctx + ": disturbance_sd must be a number or \"auto\"");
        }
      } else if (v["disturbance_sd"].is_number()) {
        var.disturbance_sd = v["disturbance_sd"].get<double>();
        if (var.disturbance_sd < 0.0) throw input_error(ctx + ": negative disturbance_sd");
      } else {
        throw input_error(ctx + ": disturbance_sd must be a number or \"auto\"");
      }
    }
    g.variables.push_back(std::move(var));
  }

  if (doc.contains("correlations")) {
    for (const auto& c : doc["correlations"]) {
      if (!c.is_array() || c.size() != 3) {
        throw input_error(where + ": correlations entries are [name, name, r]");
      }
      g.correlations.emplace_back(c[0].get<std::string>(), c[1].get<std::string>(),
                                  c[2].get<double>());
    }
  }

  if (doc.contains("blocks")) {
    for (const auto& b : doc["blocks"]) {
      const std::string ctx = where + ": blocks[" + std::to_string(g.blocks.size()) + "]";
      if (!b.is_object() || !b.contains("construct") || !b.contains("indicators") ||
          !b.contains("loadings")) {
        throw input_error(ctx + ": blocks need 'construct', 'indicators', 'loadings'");
      }
      GenBlock blk;
      blk.construct = b["construct"].get<std::string>();
      for (const auto& i : b["indicators"]) blk.indicators.push_back(i.get<std::string>());
      for (const auto& l : b["loadings"]) blk.loadings.push_back(l.get<double>());
      g.blocks.push_back(std::move(blk));
    }
  }
  return g;
}

GeneratorSpec load_generator_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_generator_spec(buf.str(), path.string());
}

Dataset generate_synthetic(const GeneratorSpec& g, std::uint64_t seed) {
  if (g.n < 2) throw input_error("generator: n must be >= 2");
  if (g.variables.empty()) throw input_error("generator: no variables");
  if (g.blocks.empty()) throw input_error("generator: no indicator blocks");

  // ---- validate the latent system --------------------------------------
  std::map<std::string, int> index;
  for (const auto& v : g.variables) {
    if (!index.emplace(v.name, static_cast<int>(index.size())).second) {
      throw input_error("generator: variable '" + v.name + "' declared twice");
    }
    if (!v.parts.empty() && (!v.predictors.empty() || !v.interactions.empty())) {
      throw input_error("generator: variable '" + v.name +
                        "' cannot be both a composite and an endogenous latent");
    }
  }
  auto require_before = [&](const std::string& ref, const std::string& user) {
    auto it = index.find(ref);
    if (it == index.end() || it->second >= index.at(user)) {
      throw input_error("generator: '" + user + "' references '" + ref +
                        "' which is not declared earlier");
    }
    return it->second;
  };

  const int nv = static_cast<int>(g.variables.size());
  std::vector<bool> is_gaussian(static_cast<std::size_t>(nv), true);
  std::vector<bool> referenced(static_cast<std::size_t>(nv), false);

  // Population covariance of the latent system, built in declaration order.
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(nv, nv);

  std::vector<int> exogenous;
  for (int i = 0; i < nv; ++i) {
    const auto& v = g.variables[static_cast<std::size_t>(i)];
    if (v.predictors.empty() && v.interactions.empty() && v.parts.empty()) {
      exogenous.push_back(i);
      sigma(i, i) = 1.0;
    }
  }
  for (const auto& [a, b, r] : g.correlations) {
    const auto ia = index.find(a);
    const auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
      throw input_error("generator: correlation references unknown variable");
    }
    if (std::find(exogenous.begin(), exogenous.end(), ia->second) == exogenous.end() ||
        std::find(exogenous.begin(), exogenous.end(), ib->second) == exogenous.end()) {
      throw input_error("generator: correlations may only link exogenous variables");
    }
    if (!(std::fabs(r) < 1.0)) throw input_error("generator: |correlation| must be < 1");
    sigma(ia->second, ib->second) = r;
    sigma(ib->second, ia->second) = r;
  }

  // ---- composite-loading back-solving -----------------------------------
  std::map<std::string, BlockSolution> solutions;
  std::map<std::string, double> q_of;  // construct -> composite quality
  for (const auto& blk : g.blocks) {
    if (blk.indicators.size() != blk.loadings.size() || blk.indicators.empty()) {
      throw input_error("generator block '" + blk.construct +
                        "': indicators and loadings must be non-empty and match");
    }
    if (!index.count(blk.construct)) {
      throw input_error("generator block '" + blk.construct + "': unknown variable");
    }
    if (g.composite_loadings) {
      BlockSolution sol = solve_composite_block(blk.construct, blk.loadings);
      q_of[blk.construct] = sol.q;
      solutions.emplace(blk.construct, std::move(sol));
    } else {
      for (double l : blk.loadings) {
        if (std::fabs(l) > 1.0) {
          throw input_error("generator block '" + blk.construct + "': |loading| > 1");
        }
      }
    }
  }

  // ---- per-variable population bookkeeping ------------------------------
  struct Equation {
    std::vector<std::pair<int, double>> linear;
    std::vector<std::tuple<int, int, double>> products;  // centered a*b terms
    double noise_sd = 0.0;
    double norm = 1.0;  // composites divide by their population sd
    bool composite = false;
  };
  std::vector<Equation> equations(static_cast<std::size_t>(nv));

  for (int i = 0; i < nv; ++i) {
    const auto& v = g.variables[static_cast<std::size_t>(i)];
    auto& eq = equations[static_cast<std::size_t>(i)];
    if (v.predictors.empty() && v.interactions.empty() && v.parts.empty()) continue;

    if (!v.parts.empty()) {
      eq.composite = true;
      double var = 0.0;
      for (const auto& [ref, w] : v.parts) {
        const int j = require_before(ref, v.name);
        referenced[static_cast<std::size_t>(j)] = true;
        if (!is_gaussian[static_cast<std::size_t>(j)]) {
          throw input_error("generator: composite '" + v.name +
                            "' uses non-Gaussian part '" + ref + "'");
        }
        eq.linear.emplace_back(j, w);
      }
      for (const auto& [j, wj] : eq.linear) {
        for (const auto& [k, wk] : eq.linear) var += wj * wk * sigma(j, k);
      }
      if (!(var > 0.0)) throw input_error("generator: composite '" + v.name + "' has zero variance");
      eq.norm = std::sqrt(var);
      for (int j = 0; j < nv; ++j) {
        double cov = 0.0;
        for (const auto& [k, wk] : eq.linear) cov += wk * sigma(j, k);
        sigma(i, j) = sigma(j, i) = cov / eq.norm;
      }
      sigma(i, i) = 1.0;
      continue;
    }

    // Endogenous latent; composite-loading mode rescales the slope so the
    // composite-level regression recovers the requested value.
    double lin_var = 0.0;
    for (const auto& [ref, coef] : v.predictors) {
      const int j = require_before(ref, v.name);
      referenced[static_cast<std::size_t>(j)] = true;
      double adjusted = coef;
      if (g.composite_loadings) {
        if (v.predictors.size() != 1 || !v.interactions.empty()) {
          throw input_error("generator: composite-loading mode supports exactly one predictor and "
                            "no interactions per endogenous latent ('" + v.name + "')");
        }
        const auto qs = q_of.find(ref);
        const auto qt = q_of.find(v.name);
        if (qs == q_of.end() || qt == q_of.end()) {
          throw input_error("generator: composite-loading mode requires a block on '" + ref +
                            "' and '" + v.name + "'");
        }
        adjusted = coef / (qs->second * qt->second);
      }
      eq.linear.emplace_back(j, adjusted);
    }
    for (const auto& [a, b, coef] : v.interactions) {
      const int ja = require_before(a, v.name);
      const int jb = require_before(b, v.name);
      referenced[static_cast<std::size_t>(ja)] = true;
      referenced[static_cast<std::size_t>(jb)] = true;
      if (!is_gaussian[static_cast<std::size_t>(ja)] || !is_gaussian[static_cast<std::size_t>(jb)]) {
        throw input_error("generator: interaction in '" + v.name +
                          "' uses a non-Gaussian latent");
      }
      eq.products.emplace_back(ja, jb, coef);
      is_gaussian[static_cast<std::size_t>(i)] = false;
    }

    for (const auto& [j, cj] : eq.linear) {
      if (!is_gaussian[static_cast<std::size_t>(j)]) {
        throw input_error("generator: latent '" + v.name + "' references non-Gaussian latent '" +
                          g.variables[static_cast<std::size_t>(j)].name +
                          "'; interaction-bearing latents must be terminal");
      }
      for (const auto& [k, ck] : eq.linear) lin_var += cj * ck * sigma(j, k);
    }
    // Isserlis: Var(a*b - E[ab]) terms for jointly Gaussian parts.
    double prod_var = 0.0;
    for (const auto& [a1, b1, c1] : eq.products) {
      for (const auto& [a2, b2, c2] : eq.products) {
        prod_var += c1 * c2 * (sigma(a1, a2) * sigma(b1, b2) + sigma(a1, b2) * sigma(b1, a2));
      }
    }

    if (v.disturbance_sd >= 0.0) {
      eq.noise_sd = v.disturbance_sd;
    } else {
      const double residual = 1.0 - lin_var - prod_var;
      if (residual < -1e-9) {
        throw input_error("generator: latent '" + v.name +
                          "' has explained variance > 1; lower the coefficients");
      }
      eq.noise_sd = std::sqrt(std::max(0.0, residual));
    }

    const double total_var = lin_var + prod_var + eq.noise_sd * eq.noise_sd;
    sigma(i, i) = total_var;
    for (int j = 0; j < nv; ++j) {
      if (j == i) continue;
      double cov = 0.0;
      for (const auto& [k, ck] : eq.linear) cov += ck * sigma(j, k);
      sigma(i, j) = sigma(j, i) = cov;
    }
  }

  // ---- draw -------------------------------------------------------------
  Rng rng = Rng::stream(seed, kGeneratorStream);
  const int n = g.n;
  Eigen::MatrixXd latents(n, nv);

  if (!exogenous.empty()) {
    const auto ne = static_cast<Eigen::Index>(exogenous.size());
    Eigen::MatrixXd corr(ne, ne);
    for (Eigen::Index a = 0; a < ne; ++a) {
      for (Eigen::Index b = 0; b < ne; ++b) {
        corr(a, b) = sigma(exogenous[static_cast<std::size_t>(a)],
                           exogenous[static_cast<std::size_t>(b)]);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success) {
      throw input_error("generator: exogenous correlation matrix is not positive definite");
    }
    const Eigen::MatrixXd L = llt.matrixL();
    Eigen::VectorXd z(ne);
    for (int r = 0; r < n; ++r) {
      for (Eigen::Index e = 0; e < ne; ++e) z(e) = rng.normal();
      const Eigen::VectorXd row = L * z;
      for (Eigen::Index e = 0; e < ne; ++e) {
        latents(r, exogenous[static_cast<std::size_t>(e)]) = row(e);
      }
    }
  }

  for (int i = 0; i < nv; ++i) {
    const auto& v = g.variables[static_cast<std::size_t>(i)];
    const auto& eq = equations[static_cast<std::size_t>(i)];
    if (v.predictors.empty() && v.interactions.empty() && v.parts.empty()) continue;

    Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
    for (const auto& [j, c] : eq.linear) col += c * latents.col(j);
    for (const auto& [ja, jb, c] : eq.products) {
      col += c * (latents.col(ja).cwiseProduct(latents.col(jb)).array() - sigma(ja, jb)).matrix();
    }
    if (eq.composite) {
      col /= eq.norm;
    } else if (eq.noise_sd > 0.0) {
      for (int r = 0; r < n; ++r) col(r) += eq.noise_sd * rng.normal();
    }
    latents.col(i) = col;
  }

  // ---- indicators ---------------------------------------------------------
  Dataset out;
  std::set<std::string> seen;
  std::vector<std::pair<int, double>> plan;  // latent index, loading per column
  for (const auto& blk : g.blocks) {
    const int li = index.at(blk.construct);
    const std::vector<double>& loadings = g.composite_loadings
                                              ? solutions.at(blk.construct).factor_loadings
                                              : blk.loadings;
    for (std::size_t k = 0; k < blk.indicators.size(); ++k) {
      if (!seen.insert(blk.indicators[k]).second) {
        throw input_error("generator: duplicate indicator name '" + blk.indicators[k] + "'");
      }
      out.columns.push_back(blk.indicators[k]);
      plan.emplace_back(li, loadings[k]);
    }
  }

  out.values.resize(n, static_cast<Eigen::Index>(plan.size()));
  for (std::size_t c = 0; c < plan.size(); ++c) {
    const auto [li, loading] = plan[c];
    const double noise = std::sqrt(std::max(0.0, 1.0 - loading * loading));
    for (int r = 0; r < n; ++r) {
      double x = loading * latents(r, li);
      if (noise > 0.0) x += noise * rng.normal();
      out.values(r, static_cast<Eigen::Index>(c)) = x;
    }
  }
  return out;
}

}  // namespace frpsa
