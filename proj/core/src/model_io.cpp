#include "treeaudit/model_io.hpp"

#include <charconv>
#include <cmath>

#include "json_util.hpp"
#include "treeaudit/files.hpp"

namespace treeaudit {

using detail::Json;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw InvariantViolation("cannot format double");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("expected a decimal number, got '" + std::string(text) + "'");
  }
  return v;
}

namespace detail {

Json schema_to_json(const FeatureSchema& schema) {
  Json features = Json::array();
  for (const auto& f : schema.features()) {
    features.push_back({{"name", f.name},
                        {"direction", f.direction == Direction::kIn ? "in" : "out"},
                        {"unit", f.unit == Unit::kPkt ? "pkt" : "byte"}});
  }
  Json pairs = Json::array();
  for (const auto& p : schema.flow_pairs()) {
    pairs.push_back({{"flow", p.flow},
                     {"pkt", schema.feature(p.pkt).name},
                     {"byte", schema.feature(p.byte).name}});
  }
  return Json{{"features", features},
              {"flow_pairs", pairs},
              {"frame_min", schema.frame_min()},
              {"frame_max", schema.frame_max()}};
}

FeatureSchema schema_from_json(const Json& j, const std::string& path) {
  const auto& fs = require(j, "features", path);
  if (!fs.is_array()) throw ParseError(path + ".features: expected an array");
  std::vector<Feature> features;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const std::string fp = path + ".features[" + std::to_string(i) + "]";
    const auto& f = fs[i];
    if (f.is_string()) {
      // Short form: a bare name is an incoming packet counter.
      features.push_back({f.get<std::string>(), Direction::kIn, Unit::kPkt});
      continue;
    }
    Feature feat{require_string(f, "name", fp), Direction::kIn, Unit::kPkt};
    const auto dir = f.value("direction", std::string("in"));
    if (dir != "in" && dir != "out") throw ParseError(fp + ".direction: expected 'in' or 'out'");
    feat.direction = dir == "in" ? Direction::kIn : Direction::kOut;
    const auto unit = f.value("unit", std::string("pkt"));
    if (unit != "pkt" && unit != "byte") throw ParseError(fp + ".unit: expected 'pkt' or 'byte'");
    feat.unit = unit == "pkt" ? Unit::kPkt : Unit::kByte;
    features.push_back(std::move(feat));
  }
  auto index = [&](const std::string& name, const std::string& where) {
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (features[i].name == name) return i;
    }
    throw ParseError(where + ": unknown feature '" + name + "'");
  };
  std::vector<FlowPair> pairs;
  if (auto it = j.find("flow_pairs"); it != j.end()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string pp = path + ".flow_pairs[" + std::to_string(i) + "]";
      const auto& p = (*it)[i];
      pairs.push_back({require_string(p, "flow", pp), index(require_string(p, "pkt", pp), pp + ".pkt"),
                       index(require_string(p, "byte", pp), pp + ".byte")});
    }
  }
  const auto frame_min = j.value("frame_min", kDefaultFrameMin);
  const auto frame_max = j.value("frame_max", kDefaultFrameMax);
  try {
    return FeatureSchema(std::move(features), std::move(pairs), frame_min, frame_max);
  } catch (const SchemaError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace detail

namespace {

Json node_to_json(const VotingEnsemble& m, const DecisionTree& t, std::int32_t i) {
  const auto& n = t.nodes[i];
  if (n.is_leaf()) {
    Json leaf{{"label", m.classes[n.label]}};
    if (!n.guards.empty()) {
      Json guards = Json::array();
      for (const auto& g : n.guards) {
        guards.push_back({{"feature", m.schema.feature(g.feature).name}, {"threshold", g.threshold}});
      }
      leaf["guards"] = guards;
    }
    return leaf;
  }
  return Json{{"feature", m.schema.feature(n.feature).name},
              {"threshold", n.threshold},
              {"left", node_to_json(m, t, n.left)},
              {"right", node_to_json(m, t, n.right)}};
}

class TreeReader {
 public:
  TreeReader(const FeatureSchema& schema, const std::vector<std::string>& classes)
      : schema_(schema), classes_(classes) {}

  DecisionTree read(const Json& j, const std::string& path) {
    DecisionTree t;
    read_node(t, j, path, 0);
    return t;
  }

 private:
  static constexpr std::size_t kMaxDepth = 4096;

  std::size_t feature(const Json& v, const std::string& path) const {
    if (v.is_number_unsigned()) {
      const auto i = v.get<std::size_t>();
      if (i >= schema_.size()) throw ParseError(path + ": feature index out of range");
      return i;
    }
    if (!v.is_string()) throw ParseError(path + ": expected a feature name");
    if (auto i = schema_.index_of(v.get<std::string>())) return *i;
    throw ParseError(path + ": unknown feature '" + v.get<std::string>() + "'");
  }

  std::int32_t read_node(DecisionTree& t, const Json& j, const std::string& path, std::size_t depth) {
    if (depth > kMaxDepth) throw ParseError(path + ": tree too deep");
    if (!j.is_object()) throw ParseError(path + ": expected a node object");
    const auto id = static_cast<std::int32_t>(t.nodes.size());
    t.nodes.emplace_back();
    if (j.contains("label")) {
      const auto label = detail::require_string(j, "label", path);
      ClassId c = 0;
      for (; c < classes_.size() && classes_[c] != label; ++c) {
      }
      if (c == classes_.size()) throw ParseError(path + ".label: unknown class '" + label + "'");
      t.nodes[id].label = c;
      if (auto g = j.find("guards"); g != j.end()) {
        if (!g->is_array()) throw ParseError(path + ".guards: expected an array");
        for (std::size_t k = 0; k < g->size(); ++k) {
          const std::string gp = path + ".guards[" + std::to_string(k) + "]";
          const auto& gj = (*g)[k];
          Guard guard{feature(detail::require(gj, "feature", gp), gp + ".feature"),
                      detail::require_number(gj, "threshold", gp)};
          t.nodes[id].guards.push_back(guard);
        }
      }
      return id;
    }
    const auto f = feature(detail::require(j, "feature", path), path + ".feature");
    const double threshold = detail::require_number(j, "threshold", path);
    const auto& lj = detail::require(j, "left", path);
    const auto& rj = detail::require(j, "right", path);
    const auto l = read_node(t, lj, path + ".left", depth + 1);
    const auto r = read_node(t, rj, path + ".right", depth + 1);
    auto& n = t.nodes[id];
    n.feature = static_cast<std::int32_t>(f);
    n.threshold = threshold;
    n.left = l;
    n.right = r;
    return id;
  }

  const FeatureSchema& schema_;
  const std::vector<std::string>& classes_;
};

}  // namespace

std::string save_model(const VotingEnsemble& model, const std::optional<ClassThresholds>& thresholds) {
  Json doc;
  doc["format"] = "treeaudit-model/1";
  doc["schema"] = detail::schema_to_json(model.schema);
  Json classes = model.classes;
  if (model.has_guards()) classes.push_back(std::string(kAnomalousLabel));
  doc["classes"] = classes;
  Json trees = Json::array();
  for (const auto& t : model.trees) trees.push_back(node_to_json(model, t, 0));
  doc["trees"] = trees;
  doc["weights"] = model.weights.empty() ? Json::array() : Json(model.weights);
  if (thresholds) {
    Json th = Json::object();
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
      const auto& ct = thresholds->at(static_cast<ClassId>(c));
      th[model.classes[c]] = {{"mu", format_double(ct.mu)},
                              {"sigma", format_double(ct.sigma)},
                              {"t", format_double(ct.t)}};
    }
    doc["thresholds"] = th;
  }
  return doc.dump(1) + "\n";
}

ModelDocument load_model(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document.begin(), document.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("model: invalid JSON: ") + e.what());
  }
  ModelDocument out;
  auto& m = out.model;
  m.schema = detail::schema_from_json(detail::require(doc, "schema", "model"), "model.schema");
  const auto& classes = detail::require(doc, "classes", "model");
  if (!classes.is_array()) throw ParseError("model.classes: expected an array");
  for (const auto& c : classes) {
    if (!c.is_string()) throw ParseError("model.classes: expected strings");
    if (c.get<std::string>() == kAnomalousLabel) continue;
    m.classes.push_back(c.get<std::string>());
  }
  const auto& trees = detail::require(doc, "trees", "model");
  if (!trees.is_array()) throw ParseError("model.trees: expected an array");
  TreeReader reader(m.schema, m.classes);
  for (std::size_t t = 0; t < trees.size(); ++t) {
    m.trees.push_back(reader.read(trees[t], "model.trees[" + std::to_string(t) + "]"));
  }
  if (auto w = doc.find("weights"); w != doc.end() && !w->is_null()) {
    if (!w->is_array()) throw ParseError("model.weights: expected an array");
    for (const auto& v : *w) {
      if (!v.is_number()) throw ParseError("model.weights: expected numbers");
      m.weights.push_back(v.get<double>());
    }
  }
  try {
    m.validate();
  } catch (const SchemaError& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  if (auto th = doc.find("thresholds"); th != doc.end() && !th->is_null()) {
    ClassThresholds thresholds;
    for (const auto& name : m.classes) {
      const std::string path = "model.thresholds." + name;
      const auto& entry = detail::require(*th, name.c_str(), "model.thresholds");
      auto field = [&](const char* key) {
        const auto& v = detail::require(entry, key, path);
        try {
          if (v.is_string()) return parse_double(v.get<std::string>());
          if (v.is_number()) return v.get<double>();
        } catch (const ParseError& e) {
          throw ParseError(path + "." + key + ": " + e.what());
        }
        throw ParseError(path + "." + key + ": expected a decimal string");
      };
      thresholds.per_class.push_back({field("mu"), field("sigma"), field("t")});
    }
    out.thresholds = std::move(thresholds);
  }
  return out;
}

ModelDocument load_model_file(const std::string& path) { return load_model(read_file(path)); }

void save_model_file(const std::string& path, const VotingEnsemble& model,
                     const std::optional<ClassThresholds>& thresholds) {
  write_file_atomic(path, save_model(model, thresholds));
}

}  // namespace treeaudit
