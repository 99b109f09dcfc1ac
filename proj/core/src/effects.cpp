#include "frpsa/effects.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "frpsa/errors.hpp"

namespace frpsa {

std::string chain_name(const Chain& chain) {
  std::string out;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i) out += "->";
    out += chain[i];
  }
  return out;
}

std::vector<Chain> enumerate_indirect(const ModelSpec& m) {
  std::map<std::string, std::vector<std::string>> next;
  std::set<std::string> has_incoming, has_outgoing;
  for (const auto& p : m.paths) {
    next[p.source].push_back(p.target);
    has_incoming.insert(p.target);
    has_outgoing.insert(p.source);
  }

  auto is_final = [&](const std::string& c) {
    return has_incoming.count(c) && !has_outgoing.count(c);
  };

  std::set<Chain> chains;
  Chain current;
  auto dfs = [&](auto&& self, const std::string& node) -> void {
    current.push_back(node);
    if (current.size() >= 3 && is_final(node)) chains.insert(current);
    for (const auto& succ : next[node]) {
      if (std::find(current.begin(), current.end(), succ) == current.end()) self(self, succ);
    }
    current.pop_back();
  };

  for (const auto& c : m.constructs) {
    if (!has_incoming.count(c.name) && has_outgoing.count(c.name)) dfs(dfs, c.name);
  }

  // Component-level variants of chains headed by a higher-order construct.
  std::vector<Chain> prefixed;
  for (const auto& chain : chains) {
    const auto* head = m.find_construct(chain.front());
    if (head == nullptr) continue;
    const auto& components = head->components.empty() ? head->composed_of : head->components;
    for (const auto& comp : components) {
      Chain extended;
      extended.reserve(chain.size() + 1);
      extended.push_back(comp);
      extended.insert(extended.end(), chain.begin(), chain.end());
      prefixed.push_back(std::move(extended));
    }
  }
  for (auto& c : prefixed) chains.insert(std::move(c));

  return {chains.begin(), chains.end()};
}

IndirectEffect indirect_effect(const Chain& chain, const PlsEstimate& e,
                               const BootstrapResult* b, double alpha) {
  if (chain.size() < 3) throw input_error("indirect_effect: chain must span at least 2 edges");

  IndirectEffect out;
  out.chain = chain;
  out.estimate = 1.0;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    out.estimate *= e.path(chain[i], chain[i + 1]);  // throws on a missing edge
  }

  if (b != nullptr) {
    const auto* param = b->find("indirect:" + chain_name(chain));
    if (param == nullptr) {
      throw input_error("bootstrap result has no draws for chain " + chain_name(chain));
    }
    out.se = param->se;
    out.t = param->t;
    out.p = param->p;
    out.t_defined = param->t_defined;
    out.supported = param->t_defined && param->p < alpha;
  }
  return out;
}

std::vector<ModerationVerdict> moderation_report(const ModelSpec& m, const PlsEstimate& e,
                                                 const BootstrapResult* b, double alpha) {
  std::vector<ModerationVerdict> out;
  for (const auto& def : m.interactions) {
    ModerationVerdict v;
    v.def = def;
    v.beta = e.path(def.name(), def.target);
    if (b != nullptr) {
      const auto* param = b->find("path:" + def.name() + "->" + def.target);
      if (param != nullptr) {
        v.se = param->se;
        v.t = param->t;
        v.p = param->p;
        v.t_defined = param->t_defined;
        v.supported = param->t_defined && param->p < alpha;
      }
    }
    v.sign = v.beta > 0.0 ? 1 : (v.beta < 0.0 ? -1 : 0);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<TotalEffect> total_effects(const ModelSpec& m, const PlsEstimate& e) {
  // Edges as estimated: declared paths plus component and implied moderator
  // edges, all present in e.paths.
  std::map<std::string, std::vector<std::string>> next;
  for (const auto& p : e.paths) {
    if (p.role == PathRole::Interaction) continue;
    next[p.source].push_back(p.target);
  }

  std::vector<TotalEffect> out;
  for (const auto& src : m.constructs) {
    for (const auto& tgt : m.constructs) {
      if (src.name == tgt.name) continue;
      double indirect = 0.0;
      bool any_chain = false;
      Chain current;
      auto dfs = [&](auto&& self, const std::string& node, double product) -> void {
        current.push_back(node);
        for (const auto& succ : next[node]) {
          if (std::find(current.begin(), current.end(), succ) != current.end()) continue;
          const double p = product * e.path(node, succ);
          if (succ == tgt.name) {
            if (current.size() >= 2) {  // at least 2 edges
              indirect += p;
              any_chain = true;
            }
          } else {
            self(self, succ, p);
          }
        }
        current.pop_back();
      };
      dfs(dfs, src.name, 1.0);
      if (!any_chain) continue;

      TotalEffect t;
      t.source = src.name;
      t.target = tgt.name;
      t.direct = e.has_path(src.name, tgt.name) ? e.path(src.name, tgt.name) : 0.0;
      t.indirect = indirect;
      t.total = t.direct + t.indirect;
      out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace frpsa
