#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeaudit/dataset.hpp"
#include "treeaudit/model.hpp"
#include "treeaudit/recipe_search.hpp"

namespace treeaudit {

// Feature roles on one root-to-leaf path. A feature is bounded when the path
// holds an `f <= t` condition on it (a guard on the leaf counts as one).
struct LeafBounds {
  std::int32_t leaf = TreeNode::kNone;
  std::vector<std::size_t> bounded;
  // Unbounded, split into features seen only on `>` branches and features
  // never tested.
  std::vector<std::size_t> right_only;
  std::vector<std::size_t> absent;
};

struct LeafBoundAnalysis {
  // One entry per leaf, in pre-order.
  std::vector<LeafBounds> leaves;

  const LeafBounds& at(std::int32_t leaf) const;
};

LeafBoundAnalysis analyze_leaf_bounds(const DecisionTree& tree, std::size_t n_features);

// Per-class column maxima of the training set.
struct ClassFeatureMax {
  std::vector<std::string> classes;
  // values[c][f]
  std::vector<FeatureVector> values;

  // Throws PatchError when the class is missing.
  const FeatureVector& of(std::string_view cls) const;
};

// Throws PatchError for classes without rows.
ClassFeatureMax compute_class_maxima(const Dataset& training);

// Maxima over the training rows that reach each node, per tree. Nodes no row
// reaches have an empty vector.
struct LeafMaxima {
  std::vector<std::vector<FeatureVector>> per_node;
};

LeafMaxima compute_leaf_maxima(const VotingEnsemble& model, const Dataset& training);

enum class PatchKind { kEssential, kAdditional };
std::string_view to_string(PatchKind kind);

struct PatchRecord {
  std::size_t tree = 0;
  std::int32_t leaf = TreeNode::kNone;
  std::size_t feature = 0;
  double threshold = 0.0;
  PatchKind kind = PatchKind::kEssential;

  bool operator==(const PatchRecord&) const = default;
};

struct PatchOptions {
  // When set, guards use the maxima of rows reaching the leaf instead of the
  // leaf class's maxima (falling back to the class when no row reaches it).
  const LeafMaxima* leaf_maxima = nullptr;
};

struct PatchResult {
  PatchedEnsemble model;
  std::vector<PatchRecord> records;
};

// Guards every feature that is right-branch-only on a leaf's path with
// f <= max(leaf class, f). The input model is left untouched.
PatchResult essential_patch(const VotingEnsemble& model, const ClassFeatureMax& maxima,
                            const PatchOptions& options = {});

// Guards `features` on every leaf unless an equal or tighter guard is there.
PatchResult additional_patch(const VotingEnsemble& model, const ClassFeatureMax& maxima,
                             std::span<const std::size_t> features, const PatchOptions& options = {});

// True when some tree's reached leaf has a guard that fires on x.
bool fires_guard(const VotingEnsemble& model, FeatureView x);

// generate_recipes on the patched model; the search treats guards as extra
// `<=` conditions on the target leaf.
RecipeSet audit_patched(const PatchedEnsemble& patched, const TargetRules& rules, double min_score,
                        const GenerateOptions& options);

// "tree,leaf,feature,threshold,kind" rows.
std::string patch_report_csv(std::span<const PatchRecord> records, const VotingEnsemble& model);

}  // namespace treeaudit
