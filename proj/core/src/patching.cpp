#include "treeaudit/patching.hpp"

#include <algorithm>

#include "treeaudit/errors.hpp"
#include "treeaudit/model_io.hpp"

namespace treeaudit {

namespace {

enum Role : std::uint8_t { kAbsent, kRightOnly, kBounded };

void walk(const DecisionTree& tree, std::int32_t i, std::vector<Role>& roles, LeafBoundAnalysis& out) {
  const auto& node = tree.nodes[i];
  if (node.is_leaf()) {
    auto leaf_roles = roles;
    for (const auto& g : node.guards) leaf_roles[g.feature] = kBounded;
    LeafBounds b;
    b.leaf = i;
    for (std::size_t f = 0; f < leaf_roles.size(); ++f) {
      switch (leaf_roles[f]) {
        case kBounded:
          b.bounded.push_back(f);
          break;
        case kRightOnly:
          b.right_only.push_back(f);
          break;
        case kAbsent:
          b.absent.push_back(f);
          break;
      }
    }
    out.leaves.push_back(std::move(b));
    return;
  }
  const auto f = static_cast<std::size_t>(node.feature);
  const Role saved = roles[f];
  roles[f] = kBounded;
  walk(tree, node.left, roles, out);
  roles[f] = saved == kBounded ? kBounded : kRightOnly;
  walk(tree, node.right, roles, out);
  roles[f] = saved;
}

// Maxima rows of `maxima` indexed by the model's class ids.
std::vector<const FeatureVector*> align_maxima(const VotingEnsemble& model, const ClassFeatureMax& maxima) {
  std::vector<const FeatureVector*> out;
  for (const auto& name : model.classes) {
    const auto& row = maxima.of(name);
    if (row.size() != model.schema.size()) {
      throw PatchError("maxima of class '" + name + "' have " + std::to_string(row.size()) + " features, model has " +
                       std::to_string(model.schema.size()));
    }
    out.push_back(&row);
  }
  return out;
}

class Patcher {
 public:
  Patcher(const VotingEnsemble& model, const ClassFeatureMax& maxima, const PatchOptions& options)
      : result_{model, {}}, class_max_(align_maxima(model, maxima)), options_(options) {
    model.validate();
    if (options.leaf_maxima && options.leaf_maxima->per_node.size() != model.trees.size()) {
      throw PatchError("leaf maxima do not match the model's trees");
    }
  }

  // Adds the guard unless the leaf already has one at least as tight.
  void guard(std::size_t t, std::int32_t leaf, std::size_t feature, PatchKind kind) {
    auto& node = result_.model.trees[t].nodes[leaf];
    const double threshold = bound(t, leaf, feature);
    for (const auto& g : node.guards) {
      if (g.feature == feature && g.threshold <= threshold) return;
    }
    node.guards.push_back({feature, threshold});
    result_.records.push_back({t, leaf, feature, threshold, kind});
  }

  PatchResult take() { return std::move(result_); }
  const VotingEnsemble& model() const { return result_.model; }

 private:
  double bound(std::size_t t, std::int32_t leaf, std::size_t feature) const {
    if (options_.leaf_maxima) {
      const auto& per_node = options_.leaf_maxima->per_node[t];
      if (static_cast<std::size_t>(leaf) < per_node.size() && !per_node[leaf].empty()) {
        return static_cast<double>(per_node[leaf][feature]);
      }
    }
    const auto label = result_.model.trees[t].nodes[leaf].label;
    return static_cast<double>((*class_max_[label])[feature]);
  }

  PatchResult result_;
  std::vector<const FeatureVector*> class_max_;
  PatchOptions options_;
};

}  // namespace

const LeafBounds& LeafBoundAnalysis::at(std::int32_t leaf) const {
  for (const auto& b : leaves) {
    if (b.leaf == leaf) return b;
  }
  throw SchemaError("node " + std::to_string(leaf) + " is not a leaf");
}

LeafBoundAnalysis analyze_leaf_bounds(const DecisionTree& tree, std::size_t n_features) {
  LeafBoundAnalysis out;
  if (tree.nodes.empty()) return out;
  for (const auto& n : tree.nodes) {
    if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= n_features) {
      throw SchemaError("tree splits on feature " + std::to_string(n.feature) + " of " + std::to_string(n_features));
    }
  }
  std::vector<Role> roles(n_features, kAbsent);
  walk(tree, 0, roles, out);
  return out;
}

const FeatureVector& ClassFeatureMax::of(std::string_view cls) const {
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c] == cls) return values[c];
  }
  throw PatchError("no training maxima for class '" + std::string(cls) + "'");
}

ClassFeatureMax compute_class_maxima(const Dataset& training) {
  training.validate();
  ClassFeatureMax out;
  out.classes = training.classes;
  out.values.assign(training.classes.size(), FeatureVector(training.schema.size(), 0));
  std::vector<bool> seen(training.classes.size(), false);
  for (std::size_t i = 0; i < training.size(); ++i) {
    const auto c = training.labels[i];
    auto& m = out.values[c];
    for (std::size_t f = 0; f < m.size(); ++f) {
      m[f] = seen[c] ? std::max(m[f], training.rows[i][f]) : training.rows[i][f];
    }
    seen[c] = true;
  }
  for (std::size_t c = 0; c < seen.size(); ++c) {
    if (!seen[c]) throw PatchError("class '" + training.classes[c] + "' has no training rows");
  }
  return out;
}

LeafMaxima compute_leaf_maxima(const VotingEnsemble& model, const Dataset& training) {
  if (!(training.schema == model.schema)) throw SchemaError("dataset schema differs from the model's");
  LeafMaxima out;
  for (const auto& tree : model.trees) {
    std::vector<FeatureVector> per_node(tree.nodes.size());
    for (const auto& row : training.rows) {
      auto& m = per_node[reach_leaf(tree, row)];
      if (m.empty()) {
        m = row;
      } else {
        for (std::size_t f = 0; f < m.size(); ++f) m[f] = std::max(m[f], row[f]);
      }
    }
    out.per_node.push_back(std::move(per_node));
  }
  return out;
}

std::string_view to_string(PatchKind kind) { return kind == PatchKind::kEssential ? "essential" : "additional"; }

PatchResult essential_patch(const VotingEnsemble& model, const ClassFeatureMax& maxima, const PatchOptions& options) {
  Patcher patcher(model, maxima, options);
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    for (const auto& leaf : analyze_leaf_bounds(model.trees[t], model.schema.size()).leaves) {
      for (auto f : leaf.right_only) patcher.guard(t, leaf.leaf, f, PatchKind::kEssential);
    }
  }
  return patcher.take();
}

PatchResult additional_patch(const VotingEnsemble& model, const ClassFeatureMax& maxima,
                             std::span<const std::size_t> features, const PatchOptions& options) {
  for (auto f : features) {
    if (f >= model.schema.size()) throw PatchError("feature index " + std::to_string(f) + " is outside the schema");
  }
  Patcher patcher(model, maxima, options);
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const auto& nodes = model.trees[t].nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!nodes[i].is_leaf()) continue;
      for (auto f : features) patcher.guard(t, static_cast<std::int32_t>(i), f, PatchKind::kAdditional);
    }
  }
  return patcher.take();
}

bool fires_guard(const VotingEnsemble& model, FeatureView x) {
  return std::any_of(model.trees.begin(), model.trees.end(),
                     [&](const DecisionTree& t) { return tree_predict(t, x) == kAnomalous; });
}

RecipeSet audit_patched(const PatchedEnsemble& patched, const TargetRules& rules, double min_score,
                        const GenerateOptions& options) {
  return generate_recipes(patched, rules, min_score, options);
}

std::string patch_report_csv(std::span<const PatchRecord> records, const VotingEnsemble& model) {
  std::string out = "tree,leaf,feature,threshold,kind\n";
  for (const auto& r : records) {
    out += std::to_string(r.tree) + ',' + std::to_string(r.leaf) + ',' + model.schema.feature(r.feature).name + ',' +
           format_double(r.threshold) + ',' + std::string(to_string(r.kind)) + '\n';
  }
  return out;
}

}  // namespace treeaudit
