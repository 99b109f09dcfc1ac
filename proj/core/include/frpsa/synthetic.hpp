#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "frpsa/dataset.hpp"

namespace frpsa {

/// One latent variable of the generating model, in declaration order.
/// Exogenous when it has no predictors and no parts; a composite when
/// `parts` is set (normalized weighted sum of earlier latents); endogenous
/// otherwise (linear combination plus centered interaction products plus a
/// Gaussian disturbance).
struct GenVariable {
  std::string name;
  std::vector<std::pair<std::string, double>> predictors;
  std::vector<std::tuple<std::string, std::string, double>> interactions;
  std::vector<std::pair<std::string, double>> parts;
  double disturbance_sd = -1.0;  // negative = auto-complement to unit variance
};

/// Reflective indicator block: x = loading * latent + sqrt(1 - loading^2) * noise,
/// so every indicator has unit population variance.
struct GenBlock {
  std::string construct;
  std::vector<std::string> indicators;
  std::vector<double> loadings;
};

struct GeneratorSpec {
  int n = 0;
  /// When set, block loadings are interpreted as target composite loadings
  /// (the population value a PLS composite recovers) and path coefficients as
  /// target composite-regression slopes; the generator back-solves the factor
  /// parameters. In this mode every endogenous latent must have exactly one
  /// predictor and no interactions.
  bool composite_loadings = false;
  std::vector<GenVariable> variables;
  std::vector<std::tuple<std::string, std::string, double>> correlations;  // exogenous pairs
  std::vector<GenBlock> blocks;
};

GeneratorSpec parse_generator_spec(const std::string& json_text,
                                   std::string_view origin = "<memory>");
GeneratorSpec load_generator_spec(const std::filesystem::path& path);

/// Draw the latent system and its indicators. Identical (spec, seed) pairs
/// produce identical datasets byte for byte.
Dataset generate_synthetic(const GeneratorSpec& g, std::uint64_t seed);

}  // namespace frpsa
