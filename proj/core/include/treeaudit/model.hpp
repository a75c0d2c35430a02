#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "treeaudit/schema.hpp"

namespace treeaudit {

using ClassId = std::uint32_t;

// Vote cast by a patched leaf whose guard fired. Never a prediction.
inline constexpr ClassId kAnomalous = std::numeric_limits<ClassId>::max();
inline constexpr std::string_view kAnomalousLabel = "ANOMALOUS";

// Upper-bound check attached to a leaf: passes while x[feature] <= threshold.
struct Guard {
  std::size_t feature = 0;
  double threshold = 0.0;

  bool operator==(const Guard&) const = default;
};

// Decision nodes route `x[feature] <= threshold` to `left`, everything else
// to `right`. Leaves have feature == kNone.
struct TreeNode {
  static constexpr std::int32_t kNone = -1;

  std::int32_t feature = kNone;
  double threshold = 0.0;
  std::int32_t left = kNone;
  std::int32_t right = kNone;
  ClassId label = 0;
  std::vector<Guard> guards;

  bool is_leaf() const noexcept { return feature == kNone; }
  bool operator==(const TreeNode&) const = default;
};

// Flat binary tree; nodes[0] is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  static DecisionTree leaf(ClassId label);
  // Composes a new tree whose root splits on `feature <= threshold`.
  static DecisionTree split(std::size_t feature, double threshold, const DecisionTree& left,
                            const DecisionTree& right);

  const TreeNode& root() const { return nodes.front(); }
  std::size_t leaf_count() const;
  std::size_t depth() const;

  bool operator==(const DecisionTree&) const = default;
};

// Node index of the leaf `x` reaches. Guards are not consulted.
std::int32_t reach_leaf(const DecisionTree& tree, FeatureView x);

// Label of the reached leaf, or kAnomalous when one of its guards fires.
ClassId tree_predict(const DecisionTree& tree, FeatureView x);

struct VotingEnsemble {
  FeatureSchema schema;
  std::vector<std::string> classes;
  std::vector<DecisionTree> trees;
  // Empty means every tree weighs 1.
  std::vector<double> weights;

  double weight(std::size_t tree) const { return weights.empty() ? 1.0 : weights[tree]; }
  double total_weight() const;
  bool has_guards() const;
  ClassId class_id(std::string_view name) const;

  // Structural checks: child indices, feature indices, labels, weights.
  // Throws SchemaError.
  void validate() const;

  bool operator==(const VotingEnsemble&) const = default;
};

// A patched ensemble is a VotingEnsemble whose leaves carry guards.
using PatchedEnsemble = VotingEnsemble;

struct Prediction {
  ClassId label = 0;
  double score = 0.0;
  // Vote share per real class; together with anomalous_share sums to 1.
  std::vector<double> class_scores;
  double anomalous_share = 0.0;
};

// Weighted hard vote. Ties go to the lowest class index; kAnomalous never
// wins. Throws SchemaError on a dimension mismatch or negative count.
Prediction predict(const VotingEnsemble& model, FeatureView x);

struct ClassThreshold {
  double mu = 0.0;
  double sigma = 0.0;
  double t = 0.0;

  bool operator==(const ClassThreshold&) const = default;
};

struct ClassThresholds {
  std::vector<ClassThreshold> per_class;

  const ClassThreshold& at(ClassId c) const { return per_class.at(c); }
  bool operator==(const ClassThresholds&) const = default;
};

// mu - sigma clamped into [0, 1].
ClassThreshold make_threshold(double mu, double sigma);

// The anomaly rule: score of the predicted label below that label's t.
inline bool is_detected(const Prediction& p, const ClassThresholds& th) {
  return p.score < th.at(p.label).t;
}

}  // namespace treeaudit
