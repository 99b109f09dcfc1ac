#include "frpsa/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "frpsa/errors.hpp"
#include "frpsa/stats.hpp"
#include "frpsa/version.hpp"

namespace frpsa {

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string num_or_empty(double v, bool defined) { return defined ? num(v) : std::string(); }

// One logical table: header plus string cells; rendered as CSV or aligned
// text.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  std::string to_csv() const {
    std::string out;
    auto emit_row = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ',';
        out += r[i];
      }
      out += '\n';
    };
    emit_row(header);
    for (const auto& r : rows) emit_row(r);
    return out;
  }

  std::string to_text() const {
    std::vector<std::size_t> width(header.size(), 0);
    auto measure = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    };
    measure(header);
    for (const auto& r : rows) measure(r);
    std::string out;
    auto emit_row = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += "  ";
        out += r[i];
        out.append(width[i] - r[i].size(), ' ');
      }
      while (!out.empty() && out.back() == ' ') out.pop_back();
      out += '\n';
    };
    emit_row(header);
    for (const auto& r : rows) emit_row(r);
    return out;
  }
};

Table reliability_table(const FrpsaReport& r) {
  Table t;
  t.header = {"construct", "mode",    "items",  "alpha",  "composite_reliability",
              "ave",       "vif",     "alpha_ok", "cr_ok", "ave_ok",
              "vif_ok"};
  for (const auto& c : r.measurement.reliability) {
    t.add({c.construct, to_string(c.mode), std::to_string(c.n_items), num(c.alpha),
           num(c.composite_reliability), num(c.ave), num(c.vif), c.alpha_ok ? "pass" : "fail",
           c.cr_ok ? "pass" : "fail", c.ave_ok ? "pass" : "fail", c.vif_ok ? "pass" : "fail"});
  }
  return t;
}

Table cross_loading_table(const FrpsaReport& r) {
  Table t;
  t.header = {"indicator", "own_construct"};
  for (const auto& name : r.measurement.constructs) t.header.push_back(name);
  t.header.push_back("dominant");
  for (const auto& row : r.measurement.cross) {
    std::vector<std::string> cells{row.indicator, row.own_construct};
    for (Eigen::Index c = 0; c < row.loadings.size(); ++c) cells.push_back(num(row.loadings(c)));
    cells.push_back(row.dominant ? "pass" : "fail");
    t.add(std::move(cells));
  }
  return t;
}

Table outer_weight_table(const FrpsaReport& r) {
  Table t;
  t.header = {"indicator", "construct", "weight", "t", "p", "bias", "ci_lo", "ci_hi"};
  for (const auto& row : r.formative) {
    t.add({row.indicator, row.construct, num(row.weight), num_or_empty(row.t, row.t_defined),
           num_or_empty(row.p, row.t_defined), num_or_empty(row.bias, row.t_defined),
           num_or_empty(row.ci_lo, row.bc_defined), num_or_empty(row.ci_hi, row.bc_defined)});
  }
  return t;
}

Table structural_table(const FrpsaReport& r) {
  Table t;
  t.header = {"source", "target", "role", "estimate", "se", "t", "p", "stars"};
  for (const auto& row : r.structural) {
    t.add({row.source, row.target, to_string(row.role), num(row.beta),
           num_or_empty(row.se, row.t_defined), num_or_empty(row.t, row.t_defined),
           num_or_empty(row.p, row.t_defined),
           row.t_defined ? significance_stars(row.p) : ""});
  }
  for (const auto& [name, r2] : r.r_squared) {
    t.add({"", name, "r_squared", num(r2), "", "", "", ""});
  }
  for (const auto& te : r.totals) {
    t.add({te.source, te.target, "total", num(te.total), "", "", "", ""});
  }
  return t;
}

Table indirect_table(const FrpsaReport& r) {
  Table t;
  t.header = {"chain", "estimate", "se", "t", "p", "supported"};
  for (const auto& e : r.indirect) {
    t.add({chain_name(e.chain), num(e.estimate), num_or_empty(e.se, e.t_defined),
           num_or_empty(e.t, e.t_defined), num_or_empty(e.p, e.t_defined),
           e.t_defined ? (e.supported ? "yes" : "no") : ""});
  }
  return t;
}

Table fold_table(const FrpsaReport& r) {
  Table t;
  t.header = {"fold", "n_train", "sse_train", "rmse_train", "n_test", "sse_test", "rmse_test"};
  std::vector<double> sse_tr, rmse_tr, sse_te, rmse_te, n_tr, n_te;
  for (const auto& f : r.folds) {
    t.add({std::to_string(f.fold), std::to_string(f.n_train), num(f.sse_train),
           num(f.rmse_train), std::to_string(f.n_test), num(f.sse_test), num(f.rmse_test)});
    n_tr.push_back(f.n_train);
    sse_tr.push_back(f.sse_train);
    rmse_tr.push_back(f.rmse_train);
    n_te.push_back(f.n_test);
    sse_te.push_back(f.sse_test);
    rmse_te.push_back(f.rmse_test);
  }
  if (!r.folds.empty()) {
    t.add({"mean", num(stats::mean(n_tr)), num(stats::mean(sse_tr)), num(stats::mean(rmse_tr)),
           num(stats::mean(n_te)), num(stats::mean(sse_te)), num(stats::mean(rmse_te))});
    if (r.folds.size() >= 2) {
      t.add({"sd", num(stats::sample_sd(n_tr)), num(stats::sample_sd(sse_tr)),
             num(stats::sample_sd(rmse_tr)), num(stats::sample_sd(n_te)),
             num(stats::sample_sd(sse_te)), num(stats::sample_sd(rmse_te))});
    }
  }
  return t;
}

Table sensitivity_table(const FrpsaReport& r) {
  Table t;
  t.header = {"row"};
  for (const auto& name : r.ann_inputs) t.header.push_back(name);
  for (Eigen::Index f = 0; f < r.sensitivity.per_fold.rows(); ++f) {
    std::vector<std::string> cells{"fold " + std::to_string(f + 1)};
    for (Eigen::Index c = 0; c < r.sensitivity.per_fold.cols(); ++c) {
      cells.push_back(num(r.sensitivity.per_fold(f, c)));
    }
    t.add(std::move(cells));
  }
  if (r.sensitivity.mean_importance.size() > 0) {
    std::vector<std::string> mean_cells{"Average importance"};
    std::vector<std::string> ni_cells{"Normalized importance"};
    for (Eigen::Index c = 0; c < r.sensitivity.mean_importance.size(); ++c) {
      mean_cells.push_back(num(r.sensitivity.mean_importance(c)));
      ni_cells.push_back(num(r.sensitivity.normalized_pct(c)) + "%");
    }
    t.add(std::move(mean_cells));
    t.add(std::move(ni_cells));
  }
  return t;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw io_error("write failure on '" + path.string() + "'");
}

}  // namespace

void emit_report(const FrpsaReport& r, const std::filesystem::path& out_dir,
                 OutputFormat format) {
  namespace fs = std::filesystem;
  const fs::path staging = out_dir.string() + ".staging";

  std::error_code ec;
  fs::remove_all(staging, ec);
  fs::create_directories(staging);

  try {
    const char* ext = format == OutputFormat::Csv ? ".csv" : ".txt";
    auto render = [&](const Table& t) {
      return format == OutputFormat::Csv ? t.to_csv() : t.to_text();
    };

    if (r.has_pls) {
      write_file(staging / (std::string("table1_reliability") + ext), render(reliability_table(r)));
      write_file(staging / (std::string("table2_cross_loadings") + ext), render(cross_loading_table(r)));
      write_file(staging / (std::string("table3_outer_weights") + ext), render(outer_weight_table(r)));
      write_file(staging / (std::string("table4_structural") + ext), render(structural_table(r)));
      write_file(staging / (std::string("table5_indirect") + ext), render(indirect_table(r)));
    }
    if (r.has_ann) {
      write_file(staging / (std::string("table6_ann_folds") + ext), render(fold_table(r)));
      write_file(staging / (std::string("table7_sensitivity") + ext), render(sensitivity_table(r)));
    }

    nlohmann::json meta;
    meta["versions"] = {{"frpsa", kVersion}};
    meta["seed"] = r.seed;
    meta["alpha"] = r.alpha;
    meta["warnings"] = r.warnings;
    if (r.has_pls) {
      meta["screening"] = {{"received", r.screening.received},
                           {"excluded", r.screening.excluded},
                           {"valid", r.screening.valid}};
      meta["bootstrap"] = {{"reps", r.reps},
                           {"failed_reps", r.failed_reps},
                           {"skipped", r.bootstrap_skipped}};
      meta["pls_iterations"] = r.iterations_used;
      meta["measurement_pass"] = r.measurement.all_pass;
      meta["moderation"] = nlohmann::json::array();
      for (const auto& v : r.moderation) {
        nlohmann::json row;
        row["term"] = v.def.name();
        row["target"] = v.def.target;
        row["beta"] = v.beta;
        row["sign"] = v.sign;
        if (v.t_defined) {
          row["t"] = v.t;
          row["p"] = v.p;
          row["supported"] = v.supported;
        }
        meta["moderation"].push_back(std::move(row));
      }
      meta["totals"] = nlohmann::json::array();
      for (const auto& te : r.totals) {
        meta["totals"].push_back({{"source", te.source},
                                  {"target", te.target},
                                  {"direct", te.direct},
                                  {"indirect", te.indirect},
                                  {"total", te.total}});
      }
    }
    if (r.has_ann) {
      meta["ann"] = {{"inputs", r.ann_inputs},
                     {"folds", r.cv_folds},
                     {"hidden", r.hidden},
                     {"epochs", r.epochs},
                     {"rate", r.rate},
                     {"variance_explained_pct", r.variance_explained_pct}};
    }

    // The execution block describes the invocation (thread count, wall
    // clock); nothing else in the output depends on it. Consumers comparing
    // runs should drop this block.
    nlohmann::json execution;
    execution["threads"] = r.threads;
    execution["wall_seconds"] = r.wall_seconds;
    execution["bootstrap_seconds"] = r.bootstrap_seconds;
    std::vector<double> fold_seconds;
    for (const auto& f : r.folds) fold_seconds.push_back(f.train_seconds);
    execution["fold_train_seconds"] = fold_seconds;
    meta["execution"] = execution;

    write_file(staging / "meta.json", meta.dump(2) + "\n");

    fs::remove_all(out_dir, ec);
    fs::rename(staging, out_dir);
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

}  // namespace frpsa
