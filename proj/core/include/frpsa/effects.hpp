#pragma once

#include <string>
#include <vector>

#include "frpsa/bootstrap.hpp"
#include "frpsa/model_spec.hpp"
#include "frpsa/pls.hpp"

namespace frpsa {

using Chain = std::vector<std::string>;

std::string chain_name(const Chain& chain);

/// Mediation chains: every directed simple path of length >= 2 declared
/// edges from an exogenous construct to a final endogenous one. A chain
/// headed by a higher-order construct is additionally emitted once per
/// component, with the component prepended (the component relation acts as
/// the leading edge). Deterministic lexicographic order, no duplicates.
std::vector<Chain> enumerate_indirect(const ModelSpec& m);

struct IndirectEffect {
  Chain chain;
  double estimate = 0.0;  // exact product of the constituent path estimates
  double se = 0.0;
  double t = 0.0;
  double p = 0.0;
  bool t_defined = false;
  bool supported = false;
};

/// Point estimate from the full-sample paths; inference from the bootstrap
/// distribution of per-replication products. Pass b = nullptr when the
/// bootstrap was skipped (estimate only, no t/p).
IndirectEffect indirect_effect(const Chain& chain, const PlsEstimate& e,
                               const BootstrapResult* b, double alpha);

struct ModerationVerdict {
  InteractionDef def;
  double beta = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 0.0;
  bool t_defined = false;
  int sign = 0;  // -1, 0, +1
  bool supported = false;
};

std::vector<ModerationVerdict> moderation_report(const ModelSpec& m, const PlsEstimate& e,
                                                 const BootstrapResult* b, double alpha);

/// Direct-plus-indirect totals for every (source, target) pair connected by
/// at least one chain of two or more edges.
struct TotalEffect {
  std::string source;
  std::string target;
  double direct = 0.0;  // 0 when no direct edge
  double indirect = 0.0;
  double total = 0.0;
};

std::vector<TotalEffect> total_effects(const ModelSpec& m, const PlsEstimate& e);

}  // namespace frpsa
