#pragma once

#include <frpsa/model_spec.hpp>
#include <frpsa/synthetic.hpp>

namespace bench {

// Three reflective constructs in a chain, three indicators each.
inline frpsa::GeneratorSpec chain_generator(int n) {
  frpsa::GeneratorSpec g;
  g.n = n;
  g.variables.push_back({"A", {}, {}, {}, -1.0});
  g.variables.push_back({"B", {{"A", 0.5}}, {}, {}, -1.0});
  g.variables.push_back({"C", {{"B", 0.3}}, {}, {}, -1.0});
  g.blocks.push_back({"A", {"a1", "a2", "a3"}, {0.9, 0.8, 0.7}});
  g.blocks.push_back({"B", {"b1", "b2", "b3"}, {0.9, 0.8, 0.7}});
  g.blocks.push_back({"C", {"c1", "c2", "c3"}, {0.9, 0.8, 0.7}});
  return g;
}

inline frpsa::ModelSpec chain_model() {
  frpsa::ModelSpec m;
  frpsa::ConstructDef a{"A", frpsa::Mode::Reflective, {"a1", "a2", "a3"}, {}, {}};
  frpsa::ConstructDef b{"B", frpsa::Mode::Reflective, {"b1", "b2", "b3"}, {}, {}};
  frpsa::ConstructDef c{"C", frpsa::Mode::Reflective, {"c1", "c2", "c3"}, {}, {}};
  m.constructs = {a, b, c};
  m.paths = {{"A", "B", frpsa::PathRole::Structural}, {"B", "C", frpsa::PathRole::Structural}};
  return m;
}

}  // namespace bench
