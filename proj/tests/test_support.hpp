#pragma once

// Shared fixtures and independent oracles for the test suites. The oracle
// implementations here deliberately avoid the library's code paths (plain
// loops, Gauss-Jordan inversion) so they can disagree with the
// implementation when it is wrong.

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <frpsa/dataset.hpp>
#include <frpsa/model_spec.hpp>
#include <frpsa/synthetic.hpp>

namespace testsupport {

// ---- independent metric oracles -----------------------------------------

inline double pearson_loops(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Standardized alpha straight from the definition: mean pairwise correlation
// computed by raw loops.
inline double alpha_loops(const Eigen::MatrixXd& items) {
  const int k = static_cast<int>(items.cols());
  double rbar = 0;
  int pairs = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      std::vector<double> a(items.rows()), b(items.rows());
      for (int r = 0; r < items.rows(); ++r) {
        a[static_cast<std::size_t>(r)] = items(r, i);
        b[static_cast<std::size_t>(r)] = items(r, j);
      }
      rbar += pearson_loops(a, b);
      ++pairs;
    }
  }
  rbar /= pairs;
  return k * rbar / (1.0 + (k - 1) * rbar);
}

inline double cr_loops(const std::vector<double>& loadings) {
  double s = 0, e = 0;
  for (double l : loadings) {
    s += l;
    e += 1.0 - l * l;
  }
  return s * s / (s * s + e);
}

inline double ave_loops(const std::vector<double>& loadings) {
  double s = 0;
  for (double l : loadings) s += l * l;
  return s / static_cast<double>(loadings.size());
}

// VIF through the inverse-correlation-matrix identity, with a hand-rolled
// Gauss-Jordan inversion.
inline std::vector<double> vif_inverse_corr(const Eigen::MatrixXd& scores) {
  const int p = static_cast<int>(scores.cols());
  const int n = static_cast<int>(scores.rows());
  std::vector<std::vector<double>> r(static_cast<std::size_t>(p), std::vector<double>(static_cast<std::size_t>(p)));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
      for (int t = 0; t < n; ++t) {
        a[static_cast<std::size_t>(t)] = scores(t, i);
        b[static_cast<std::size_t>(t)] = scores(t, j);
      }
      r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = pearson_loops(a, b);
    }
  }
  // Gauss-Jordan inverse of r.
  std::vector<std::vector<double>> inv(static_cast<std::size_t>(p), std::vector<double>(static_cast<std::size_t>(p), 0.0));
  for (int i = 0; i < p; ++i) inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
  for (int col = 0; col < p; ++col) {
    int pivot = col;
    for (int row = col + 1; row < p; ++row) {
      if (std::fabs(r[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)]) >
          std::fabs(r[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)])) {
        pivot = row;
      }
    }
    std::swap(r[static_cast<std::size_t>(col)], r[static_cast<std::size_t>(pivot)]);
    std::swap(inv[static_cast<std::size_t>(col)], inv[static_cast<std::size_t>(pivot)]);
    const double d = r[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    for (int j = 0; j < p; ++j) {
      r[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)] /= d;
      inv[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)] /= d;
    }
    for (int row = 0; row < p; ++row) {
      if (row == col) continue;
      const double f = r[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
      for (int j = 0; j < p; ++j) {
        r[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)] -=
            f * r[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
        inv[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)] -=
            f * inv[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) out[static_cast<std::size_t>(i)] = inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
  return out;
}

// Brute-force percentile: explicit order statistics with linear
// interpolation, written without the library's quantile helper.
inline double percentile_bruteforce(std::vector<double> v, double p) {
  for (std::size_t i = 1; i < v.size(); ++i) {  // insertion sort
    double key = v[i];
    std::size_t j = i;
    while (j > 0 && v[j - 1] > key) {
      v[j] = v[j - 1];
      --j;
    }
    v[j] = key;
  }
  const double pos = p * (static_cast<double>(v.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] * (1.0 - (pos - static_cast<double>(lo))) + v[lo + 1] * (pos - static_cast<double>(lo));
}

// ---- dataset / model builders -------------------------------------------

inline frpsa::Dataset make_dataset(const Eigen::MatrixXd& values,
                                   std::vector<std::string> columns) {
  frpsa::Dataset d;
  d.columns = std::move(columns);
  d.values = values;
  return d;
}

/// Two single-indicator constructs A -> B over columns "a", "b".
inline frpsa::ModelSpec two_construct_model() {
  frpsa::ModelSpec m;
  m.constructs.push_back({"A", frpsa::Mode::Reflective, {"a"}, {}, {}});
  m.constructs.push_back({"B", frpsa::Mode::Reflective, {"b"}, {}, {}});
  m.paths.push_back({"A", "B", frpsa::PathRole::Structural});
  return m;
}

/// Bivariate normal dataset with population correlation rho.
inline frpsa::Dataset correlated_pair(int n, double rho, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd v(n, 2);
  for (int r = 0; r < n; ++r) {
    const double u = nd(gen);
    const double w = nd(gen);
    v(r, 0) = u;
    v(r, 1) = rho * u + std::sqrt(1.0 - rho * rho) * w;
  }
  return make_dataset(v, {"a", "b"});
}

/// The bundled replica model (declared in code so tests need no file I/O).
inline std::string replica_spec_json() {
  return R"({
  "constructs": [
    {"name": "FA", "mode": "reflective", "indicators": ["FA1", "FA2"]},
    {"name": "PU", "mode": "reflective", "indicators": ["PU1", "PU2"]},
    {"name": "AE", "mode": "reflective", "indicators": ["AE1", "AE2"]},
    {"name": "EN", "mode": "reflective", "indicators": ["EN1", "EN2"]},
    {"name": "NO", "mode": "reflective", "indicators": ["NO1", "NO2"]},
    {"name": "FI", "mode": "reflective", "indicators": ["FI1", "FI2"]},
    {"name": "UE", "mode": "formative", "components": ["FA", "PU", "AE", "EN", "NO", "FI"]},
    {"name": "IMG", "mode": "reflective", "indicators": ["IMG1", "IMG2", "IMG3"]},
    {"name": "EC", "mode": "reflective", "indicators": ["EC1", "EC2", "EC3"]},
    {"name": "ITI", "mode": "reflective", "indicators": ["ITI1", "ITI2", "ITI3"]},
    {"name": "Age", "mode": "reflective", "indicators": ["AGE"]},
    {"name": "Education", "mode": "reflective", "indicators": ["EDU"]},
    {"name": "Gender", "mode": "reflective", "indicators": ["GEN"]},
    {"name": "SocialDistancing", "mode": "reflective", "indicators": ["SDC"]},
    {"name": "PerceivedSusceptibility", "mode": "reflective", "indicators": ["PSC"]}
  ],
  "paths": [
    {"source": "UE", "target": "IMG"},
    {"source": "UE", "target": "ITI"},
    {"source": "IMG", "target": "ITI"},
    {"source": "EC", "target": "ITI"},
    {"source": "Age", "target": "ITI", "role": "control"},
    {"source": "Education", "target": "ITI", "role": "control"},
    {"source": "Gender", "target": "ITI", "role": "control"},
    {"source": "SocialDistancing", "target": "ITI", "role": "control"},
    {"source": "PerceivedSusceptibility", "target": "ITI", "role": "control"}
  ],
  "interactions": [
    {"moderator": "EC", "focal": "UE", "target": "ITI"},
    {"moderator": "EC", "focal": "IMG", "target": "ITI"}
  ],
  "bootstrap": {"reps": 5000, "seed": 42},
  "alpha": 0.05,
  "ann": {"hidden": 0, "epochs": 2000, "rate": 0.1, "folds": 10}
})";
}

// ---- filesystem helpers --------------------------------------------------

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("frpsa_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

inline std::filesystem::path write_temp_file(const TempDir& dir, const std::string& name,
                                             const std::string& content) {
  const auto p = dir.path / name;
  std::FILE* f = std::fopen(p.c_str(), "wb");
  std::fwrite(content.data(), 1, content.size(), f);
  std::fclose(f);
  return p;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::FILE* f = std::fopen(p.c_str(), "rb");
  if (f == nullptr) return {};
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
  std::fclose(f);
  return out;
}

}  // namespace testsupport
