#pragma once

#include <cstddef>
#include <cstdint>

#include "treeaudit/dataset.hpp"
#include "treeaudit/model.hpp"

namespace treeaudit {

// Minimal CART random forest (Gini impurity, midpoint thresholds) so models
// can be produced without external tooling.
struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 12;
  std::size_t min_leaf = 1;
  // Bootstrap sample size as a fraction of the dataset, drawn with replacement.
  double bootstrap_fraction = 1.0;
  // Features tried per split; 0 picks ceil(sqrt(n_features)).
  std::size_t feature_subsample = 0;
  std::uint64_t seed = 1;
};

// Throws TrainerError on fewer than two classes or bad parameters.
VotingEnsemble train_random_forest(const Dataset& training, const ForestParams& params);

// Per class: mean and population standard deviation of the predicted-class
// score over rows of that class the model labels correctly; t = mu - sigma
// clamped to [0, 1]. Throws ThresholdError naming any class left empty.
ClassThresholds compute_thresholds(const VotingEnsemble& model, const Dataset& training);

// Fraction of rows predicted with their own label.
double accuracy(const VotingEnsemble& model, const Dataset& data);

}  // namespace treeaudit
