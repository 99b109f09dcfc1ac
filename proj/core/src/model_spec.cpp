#include "frpsa/model_spec.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "frpsa/errors.hpp"

namespace frpsa {

using nlohmann::json;

namespace {

// Fail-closed: any key we do not recognise is an error, so typos cannot
// silently change the model.
void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return it.key() == k; }) == allowed.end()) {
      throw input_error(where + ": unknown key '" + it.key() + "'");
    }
  }
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw input_error(where + ": missing key '" + key + "'");
  if (!obj[key].is_string()) throw input_error(where + ": '" + key + "' must be a string");
  std::string v = obj[key].get<std::string>();
  if (v.empty()) throw input_error(where + ": '" + key + "' is empty");
  return v;
}

Mode parse_mode(const std::string& s, const std::string& where) {
  if (s == "reflective") return Mode::Reflective;
  if (s == "formative") return Mode::Formative;
  throw input_error(where + ": mode must be 'reflective' or 'formative', got '" + s + "'");
}

PathRole parse_role(const std::string& s, const std::string& where) {
  if (s == "structural") return PathRole::Structural;
  if (s == "control") return PathRole::Control;
  throw input_error(where + ": role must be 'structural' or 'control', got '" + s + "'");
}

std::vector<std::string> get_string_array(const json& obj, const char* key,
                                          const std::string& where) {
  std::vector<std::string> out;
  if (!obj.contains(key)) return out;
  if (!obj[key].is_array()) throw input_error(where + ": '" + key + "' must be an array");
  for (const auto& item : obj[key]) {
    if (!item.is_string()) throw input_error(where + ": '" + key + "' entries must be strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

// Reports one concrete cycle by name, e.g. "UE -> IMG -> ITI -> UE".
void check_acyclic(const ModelSpec& m) {
  std::map<std::string, std::vector<std::string>> next;
  for (const auto& p : m.paths) next[p.source].push_back(p.target);

  enum class Color { White, Grey, Black };
  std::map<std::string, Color> color;
  for (const auto& c : m.constructs) color[c.name] = Color::White;

  std::vector<std::string> stack;
  auto dfs = [&](auto&& self, const std::string& node) -> void {
    color[node] = Color::Grey;
    stack.push_back(node);
    for (const auto& succ : next[node]) {
      if (color[succ] == Color::Grey) {
        std::string cycle;
        auto it = std::find(stack.begin(), stack.end(), succ);
        for (; it != stack.end(); ++it) cycle += *it + " -> ";
        cycle += succ;
        throw input_error("structural graph has a cycle: " + cycle);
      }
      if (color[succ] == Color::White) self(self, succ);
    }
    stack.pop_back();
    color[node] = Color::Black;
  };
  for (const auto& c : m.constructs) {
    if (color[c.name] == Color::White) dfs(dfs, c.name);
  }
}

void validate(const ModelSpec& m, const std::string& origin) {
  if (m.constructs.empty()) throw input_error(origin + ": no constructs declared");

  std::set<std::string> names;
  for (const auto& c : m.constructs) {
    if (c.name.empty()) throw input_error(origin + ": construct with empty name");
    if (!names.insert(c.name).second) {
      throw input_error(origin + ": construct '" + c.name + "' declared twice");
    }
    const bool has_ind = !c.indicators.empty();
    const bool has_comp = !c.components.empty();
    if (has_ind == has_comp) {
      throw input_error(origin + ": construct '" + c.name +
                        "' must list exactly one of indicators or components");
    }
  }

  auto require_construct = [&](const std::string& name, const std::string& where) {
    if (!names.count(name)) {
      throw input_error(origin + ": " + where + " references undeclared construct '" + name + "'");
    }
  };

  // Higher-order components must be declared, first-order, and distinct.
  for (const auto& c : m.constructs) {
    std::set<std::string> seen;
    for (const auto& comp : c.components) {
      require_construct(comp, "construct '" + c.name + "'");
      if (!seen.insert(comp).second) {
        throw input_error(origin + ": construct '" + c.name + "' lists component '" + comp +
                          "' twice");
      }
      const auto* def = m.find_construct(comp);
      if (def->is_higher_order()) {
        throw input_error(origin + ": component '" + comp + "' of '" + c.name +
                          "' is itself higher-order; components must be first-order");
      }
    }
  }

  // Each indicator belongs to exactly one first-order construct.
  std::map<std::string, std::string> owner;
  for (const auto& c : m.constructs) {
    for (const auto& ind : c.indicators) {
      auto [it, inserted] = owner.emplace(ind, c.name);
      if (!inserted && c.composed_of.empty()) {
        throw input_error(origin + ": indicator '" + ind + "' claimed by both '" + it->second +
                          "' and '" + c.name + "'");
      }
    }
  }

  for (const auto& p : m.paths) {
    require_construct(p.source, "path");
    require_construct(p.target, "path");
    if (p.source == p.target) {
      throw input_error(origin + ": self-loop path on '" + p.source + "'");
    }
  }
  for (const auto& i : m.interactions) {
    require_construct(i.moderator, "interaction");
    require_construct(i.focal, "interaction");
    require_construct(i.target, "interaction");
    if (i.moderator == i.focal) {
      throw input_error(origin + ": interaction on '" + i.target +
                        "' has identical moderator and focal construct '" + i.moderator + "'");
    }
  }

  if (m.bootstrap_reps < 2) throw input_error(origin + ": bootstrap reps must be >= 2");
  if (!(m.alpha > 0.0 && m.alpha <= 1.0)) throw input_error(origin + ": alpha must be in (0, 1]");
  if (m.ann.folds < 2) throw input_error(origin + ": ann folds must be >= 2");
  if (m.ann.epochs < 1) throw input_error(origin + ": ann epochs must be >= 1");
  if (m.ann.hidden < 0) throw input_error(origin + ": ann hidden must be >= 0");
  if (!(m.ann.rate > 0.0)) throw input_error(origin + ": ann rate must be > 0");

  check_acyclic(m);
}

}  // namespace

const ConstructDef* ModelSpec::find_construct(std::string_view name) const {
  for (const auto& c : constructs) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

int ModelSpec::construct_index(std::string_view name) const {
  for (std::size_t i = 0; i < constructs.size(); ++i) {
    if (constructs[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

bool ModelSpec::has_path(std::string_view source, std::string_view target) const {
  for (const auto& p : paths) {
    if (p.source == source && p.target == target) return true;
  }
  return false;
}

ModelSpec parse_spec(const std::string& json_text, std::string_view origin) {
  const std::string where(origin);
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw input_error(where + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw input_error(where + ": top level must be an object");
  check_keys(doc, {"constructs", "paths", "interactions", "bootstrap", "alpha", "ann"}, where);

  ModelSpec m;

  if (!doc.contains("constructs") || !doc["constructs"].is_array()) {
    throw input_error(where + ": 'constructs' array is required");
  }
  for (const auto& c : doc["constructs"]) {
    const std::string ctx = where + ": constructs[" + std::to_string(m.constructs.size()) + "]";
    if (!c.is_object()) throw input_error(ctx + " must be an object");
    check_keys(c, {"name", "mode", "indicators", "components"}, ctx);
    ConstructDef def;
    def.name = get_string(c, "name", ctx);
    if (c.contains("mode")) def.mode = parse_mode(get_string(c, "mode", ctx), ctx);
    def.indicators = get_string_array(c, "indicators", ctx);
    def.components = get_string_array(c, "components", ctx);
    m.constructs.push_back(std::move(def));
  }

  if (doc.contains("paths")) {
    if (!doc["paths"].is_array()) throw input_error(where + ": 'paths' must be an array");
    for (const auto& p : doc["paths"]) {
      const std::string ctx = where + ": paths[" + std::to_string(m.paths.size()) + "]";
      if (!p.is_object()) throw input_error(ctx + " must be an object");
      check_keys(p, {"source", "target", "role"}, ctx);
      PathDef def;
      def.source = get_string(p, "source", ctx);
      def.target = get_string(p, "target", ctx);
      if (p.contains("role")) def.role = parse_role(get_string(p, "role", ctx), ctx);
      m.paths.push_back(std::move(def));
    }
  }

  if (doc.contains("interactions")) {
    if (!doc["interactions"].is_array()) throw input_error(where + ": 'interactions' must be an array");
    for (const auto& i : doc["interactions"]) {
      const std::string ctx = where + ": interactions[" + std::to_string(m.interactions.size()) + "]";
      if (!i.is_object()) throw input_error(ctx + " must be an object");
      check_keys(i, {"moderator", "focal", "target"}, ctx);
      InteractionDef def;
      def.moderator = get_string(i, "moderator", ctx);
      def.focal = get_string(i, "focal", ctx);
      def.target = get_string(i, "target", ctx);
      m.interactions.push_back(std::move(def));
    }
  }

  if (doc.contains("bootstrap")) {
    const auto& b = doc["bootstrap"];
    const std::string ctx = where + ": bootstrap";
    if (!b.is_object()) throw input_error(ctx + " must be an object");
    check_keys(b, {"reps", "seed"}, ctx);
    if (b.contains("reps")) {
      if (!b["reps"].is_number_integer()) throw input_error(ctx + ": 'reps' must be an integer");
      m.bootstrap_reps = b["reps"].get<int>();
    }
    if (b.contains("seed")) {
      if (!b["seed"].is_number_unsigned() && !b["seed"].is_number_integer()) {
        throw input_error(ctx + ": 'seed' must be an integer");
      }
      m.seed = b["seed"].get<std::uint64_t>();
    }
  }

  if (doc.contains("alpha")) {
    if (!doc["alpha"].is_number()) throw input_error(where + ": 'alpha' must be a number");
    m.alpha = doc["alpha"].get<double>();
  }

  if (doc.contains("ann")) {
    const auto& a = doc["ann"];
    const std::string ctx = where + ": ann";
    if (!a.is_object()) throw input_error(ctx + " must be an object");
    check_keys(a, {"hidden", "epochs", "rate", "folds", "inputs"}, ctx);
    if (a.contains("hidden")) {
      if (!a["hidden"].is_number_integer()) throw input_error(ctx + ": 'hidden' must be an integer");
      m.ann.hidden = a["hidden"].get<int>();
    }
    if (a.contains("epochs")) {
      if (!a["epochs"].is_number_integer()) throw input_error(ctx + ": 'epochs' must be an integer");
      m.ann.epochs = a["epochs"].get<int>();
    }
    if (a.contains("rate")) {
      if (!a["rate"].is_number()) throw input_error(ctx + ": 'rate' must be a number");
      m.ann.rate = a["rate"].get<double>();
    }
    if (a.contains("folds")) {
      if (!a["folds"].is_number_integer()) throw input_error(ctx + ": 'folds' must be an integer");
      m.ann.folds = a["folds"].get<int>();
    }
    m.ann.inputs = get_string_array(a, "inputs", ctx);
  }

  validate(m, where);
  for (const auto& name : m.ann.inputs) {
    if (m.construct_index(name) < 0) {
      throw input_error(where + ": ann input '" + name + "' is not a declared construct");
    }
  }
  return m;
}

ModelSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("read failure on '" + path.string() + "'");
  return parse_spec(buf.str(), path.string());
}

std::string serialize_spec(const ModelSpec& m) {
  json doc;
  doc["constructs"] = json::array();
  for (const auto& c : m.constructs) {
    json jc;
    jc["name"] = c.name;
    jc["mode"] = to_string(c.mode);
    if (!c.indicators.empty()) jc["indicators"] = c.indicators;
    if (!c.components.empty()) jc["components"] = c.components;
    doc["constructs"].push_back(std::move(jc));
  }
  doc["paths"] = json::array();
  for (const auto& p : m.paths) {
    doc["paths"].push_back({{"source", p.source}, {"target", p.target}, {"role", to_string(p.role)}});
  }
  doc["interactions"] = json::array();
  for (const auto& i : m.interactions) {
    doc["interactions"].push_back(
        {{"moderator", i.moderator}, {"focal", i.focal}, {"target", i.target}});
  }
  doc["bootstrap"] = {{"reps", m.bootstrap_reps}, {"seed", m.seed}};
  doc["alpha"] = m.alpha;
  doc["ann"] = {{"hidden", m.ann.hidden},
                {"epochs", m.ann.epochs},
                {"rate", m.ann.rate},
                {"folds", m.ann.folds}};
  if (!m.ann.inputs.empty()) doc["ann"]["inputs"] = m.ann.inputs;
  return doc.dump(2) + "\n";
}

ModelSpec expand_higher_order(const ModelSpec& m) {
  ModelSpec out = m;
  for (auto& c : out.constructs) {
    if (!c.is_higher_order()) continue;
    std::vector<std::string> indicators;
    for (const auto& comp : c.components) {
      const auto* def = out.find_construct(comp);
      if (def->indicators.empty()) {
        throw input_error("cannot expand '" + c.name + "': component '" + comp +
                          "' has no indicators");
      }
      indicators.insert(indicators.end(), def->indicators.begin(), def->indicators.end());
    }
    c.indicators = std::move(indicators);
    c.composed_of = std::move(c.components);
    c.components.clear();
    c.mode = Mode::Formative;  // repeated indicators are weighted in Mode B
  }
  return out;
}

void validate_against_columns(const ModelSpec& m, const std::vector<std::string>& columns) {
  std::set<std::string> have(columns.begin(), columns.end());
  for (const auto& c : m.constructs) {
    for (const auto& ind : c.indicators) {
      if (!have.count(ind)) {
        throw input_error("construct '" + c.name + "' references indicator '" + ind +
                          "' which is not a dataset column");
      }
    }
  }
}

std::string to_string(Mode m) { return m == Mode::Reflective ? "reflective" : "formative"; }

std::string to_string(PathRole r) {
  switch (r) {
    case PathRole::Structural: return "structural";
    case PathRole::Control: return "control";
    case PathRole::Interaction: return "interaction";
  }
  return "?";
}

}  // namespace frpsa
