#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeaudit/intervals.hpp"
#include "treeaudit/model.hpp"

namespace treeaudit {

// Lower bounds `x[feature] > threshold` an intended attack imposes, plus the
// victim class.
struct TargetRules {
  struct LowerBound {
    std::size_t feature = 0;
    double threshold = 0.0;
  };
  std::vector<LowerBound> bounds;
  ClassId target = 0;

  RecipeBox to_box(std::size_t n_features) const;
};

// `x[feature] <= threshold` when at_most, otherwise `x[feature] > threshold`.
struct Condition {
  std::size_t feature = 0;
  double threshold = 0.0;
  bool at_most = true;

  bool operator==(const Condition&) const = default;
};

struct AdversarialPath {
  // Root-to-leaf conditions; a patched leaf's guards follow as at_most conditions.
  std::vector<Condition> conditions;
  std::int32_t leaf = TreeNode::kNone;
  // The recipe after merging this path in.
  RecipeBox merged;
};

struct SearchOptions {
  std::int64_t p_cap = kDefaultPacketCap;
};

// Pre-order search for the first root-to-leaf path ending in a `target` leaf
// whose conditions stay consistent (single feature, frame size, boundary) with
// `recipe`. A branch is entered only if its condition keeps the merged box
// consistent. On a guarded leaf the guards must be satisfiable too; the
// ANOMALOUS alternative is never taken.
std::optional<AdversarialPath> find_adv_path(const DecisionTree& tree, ClassId target, const RecipeBox& recipe,
                                             const FeatureSchema& schema, const SearchOptions& options = {});

// Smallest admissible integer vector in the box. Each flow pair takes the
// smallest packet count with an equal-size realization, then the smallest frame
// size. Throws InvariantViolation naming the flow when the box is not
// realizable.
FeatureVector project(const RecipeBox& recipe, const FeatureSchema& schema, std::int64_t p_cap = kDefaultPacketCap);

struct RecipeAttempt {
  std::optional<RecipeBox> recipe;
  // Box after visiting every tree, accepted or not.
  RecipeBox candidate;
  std::optional<FeatureVector> projected;
  std::optional<Prediction> prediction;
  std::size_t trees_merged = 0;
  bool timed_out = false;
};

// Greedy single pass over the trees in `tree_order`, merging each tree's first
// consistent adversarial path (trees without one are skipped). The recipe is
// returned only if its projection is predicted as `rules.target` with score
// >= min_score.
RecipeAttempt find_recipe(const VotingEnsemble& model, std::span<const std::size_t> tree_order,
                          const TargetRules& rules, double min_score, const SearchOptions& options = {},
                          std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt);

struct GenerateOptions {
  std::size_t permutations = 1;
  std::uint64_t seed = 1;
  // Run every ordering of the trees instead (only sensible for tiny models).
  bool all_orderings = false;
  std::chrono::milliseconds budget_per_permutation{60'000};
  std::size_t threads = 1;
  SearchOptions search;
};

struct RecipeSet {
  // Unique regions in order of first discovery.
  std::vector<RecipeBox> recipes;
  // Accepted recipes before deduplication, one per successful permutation.
  std::size_t accepted = 0;
  std::size_t permutations_run = 0;
  // Some permutation hit its time budget.
  bool partial = false;
};

// Tree orderings used by generate_recipes: the identity first, then uniform
// shuffles drawn from one seeded stream, so a shorter run is a prefix of a
// longer one with the same seed.
std::vector<std::vector<std::size_t>> tree_orderings(std::size_t n_trees, const GenerateOptions& options);

RecipeSet generate_recipes(const VotingEnsemble& model, const TargetRules& rules, double min_score,
                           const GenerateOptions& options);

// One JSON Lines record. Infinite endpoints are written as null.
struct RecipeRecord {
  RecipeBox recipe;
  std::string attack;
  std::int64_t impact = 0;
};

std::string recipe_to_json_line(const RecipeRecord& record, const VotingEnsemble& model);
// Throws ParseError with the line number.
std::vector<RecipeRecord> parse_recipes_jsonl(std::string_view text, const VotingEnsemble& model);

}  // namespace treeaudit
