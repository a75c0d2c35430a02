#include "treeaudit/model.hpp"

#include <algorithm>
#include <cmath>

#include "treeaudit/errors.hpp"

namespace treeaudit {

namespace {

void append_shifted(std::vector<TreeNode>& out, const DecisionTree& sub) {
  const auto offset = static_cast<std::int32_t>(out.size());
  for (TreeNode node : sub.nodes) {
    if (!node.is_leaf()) {
      node.left += offset;
      node.right += offset;
    }
    out.push_back(std::move(node));
  }
}

std::size_t depth_from(const DecisionTree& tree, std::int32_t i) {
  const auto& n = tree.nodes[i];
  if (n.is_leaf()) return 0;
  return 1 + std::max(depth_from(tree, n.left), depth_from(tree, n.right));
}

}  // namespace

DecisionTree DecisionTree::leaf(ClassId label) {
  DecisionTree t;
  TreeNode n;
  n.label = label;
  t.nodes.push_back(std::move(n));
  return t;
}

DecisionTree DecisionTree::split(std::size_t feature, double threshold, const DecisionTree& left,
                                 const DecisionTree& right) {
  DecisionTree t;
  t.nodes.reserve(1 + left.nodes.size() + right.nodes.size());
  TreeNode root;
  root.feature = static_cast<std::int32_t>(feature);
  root.threshold = threshold;
  root.left = 1;
  root.right = static_cast<std::int32_t>(1 + left.nodes.size());
  t.nodes.push_back(std::move(root));
  append_shifted(t.nodes, left);
  append_shifted(t.nodes, right);
  return t;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::depth() const { return nodes.empty() ? 0 : depth_from(*this, 0); }

std::int32_t reach_leaf(const DecisionTree& tree, FeatureView x) {
  std::int32_t i = 0;
  while (!tree.nodes[i].is_leaf()) {
    const auto& n = tree.nodes[i];
    i = static_cast<double>(x[n.feature]) <= n.threshold ? n.left : n.right;
  }
  return i;
}

ClassId tree_predict(const DecisionTree& tree, FeatureView x) {
  const auto& leaf = tree.nodes[reach_leaf(tree, x)];
  for (const auto& g : leaf.guards) {
    if (static_cast<double>(x[g.feature]) > g.threshold) return kAnomalous;
  }
  return leaf.label;
}

double VotingEnsemble::total_weight() const {
  if (weights.empty()) return static_cast<double>(trees.size());
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

bool VotingEnsemble::has_guards() const {
  for (const auto& t : trees) {
    for (const auto& n : t.nodes) {
      if (!n.guards.empty()) return true;
    }
  }
  return false;
}

ClassId VotingEnsemble::class_id(std::string_view name) const {
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c] == name) return static_cast<ClassId>(c);
  }
  throw SchemaError("unknown class '" + std::string(name) + "'");
}

void VotingEnsemble::validate() const {
  if (classes.empty()) throw SchemaError("ensemble has no classes");
  if (trees.empty()) throw SchemaError("ensemble has no trees");
  if (!weights.empty()) {
    if (weights.size() != trees.size()) throw SchemaError("weights must match tree count");
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw SchemaError("tree weights must be finite and >= 0");
    }
    if (total_weight() <= 0.0) throw SchemaError("tree weights sum to zero");
  }
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const auto& nodes = trees[t].nodes;
    const std::string where = "tree " + std::to_string(t);
    if (nodes.empty()) throw SchemaError(where + " is empty");
    std::vector<int> parents(nodes.size(), 0);
    for (const auto& n : nodes) {
      if (n.is_leaf()) {
        if (n.label >= classes.size()) throw SchemaError(where + ": leaf label out of range");
        for (const auto& g : n.guards) {
          if (g.feature >= schema.size()) throw SchemaError(where + ": guard feature out of range");
        }
        continue;
      }
      if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= schema.size()) {
        throw SchemaError(where + ": split feature out of range");
      }
      for (auto child : {n.left, n.right}) {
        if (child <= 0 || static_cast<std::size_t>(child) >= nodes.size()) {
          throw SchemaError(where + ": child index out of range");
        }
        ++parents[child];
      }
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      if (parents[i] != 1) throw SchemaError(where + ": node " + std::to_string(i) + " is not a tree node");
    }
    // Every node referenced once still allows a detached cycle; walk from the root.
    std::vector<std::int32_t> stack{0};
    std::size_t reached = 0;
    while (!stack.empty() && reached <= nodes.size()) {
      const auto& n = nodes[stack.back()];
      stack.pop_back();
      ++reached;
      if (!n.is_leaf()) {
        stack.push_back(n.left);
        stack.push_back(n.right);
      }
    }
    if (reached != nodes.size()) throw SchemaError(where + ": nodes unreachable from the root");
  }
}

Prediction predict(const VotingEnsemble& model, FeatureView x) {
  model.schema.validate(x);
  Prediction p;
  p.class_scores.assign(model.classes.size(), 0.0);
  double anomalous = 0.0;
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const ClassId vote = tree_predict(model.trees[t], x);
    if (vote == kAnomalous) {
      anomalous += model.weight(t);
    } else {
      p.class_scores[vote] += model.weight(t);
    }
  }
  const double total = model.total_weight();
  for (auto& s : p.class_scores) s /= total;
  p.anomalous_share = anomalous / total;
  const auto best = std::max_element(p.class_scores.begin(), p.class_scores.end());
  p.label = static_cast<ClassId>(best - p.class_scores.begin());
  p.score = *best;
  return p;
}

ClassThreshold make_threshold(double mu, double sigma) {
  return ClassThreshold{mu, sigma, std::clamp(mu - sigma, 0.0, 1.0)};
}

}  // namespace treeaudit
