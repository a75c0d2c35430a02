#include "treeaudit/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "treeaudit/errors.hpp"

namespace treeaudit {

namespace {

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted Gini numerator, lower is better
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ForestParams& params, std::size_t features_per_split,
              std::mt19937_64& rng)
      : data_(data), params_(params), features_per_split_(features_per_split), rng_(rng) {
    feature_order_.resize(data.schema.size());
    std::iota(feature_order_.begin(), feature_order_.end(), std::size_t{0});
  }

  DecisionTree build(std::vector<std::size_t> sample) {
    tree_.nodes.clear();
    grow(sample, 0);
    return std::move(tree_);
  }

 private:
  std::int32_t grow(std::vector<std::size_t>& sample, std::size_t depth) {
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::vector<std::size_t> counts(data_.classes.size(), 0);
    for (auto r : sample) ++counts[data_.labels[r]];
    const auto majority = static_cast<ClassId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    const bool pure = counts[majority] == sample.size();

    SplitChoice split;
    if (!pure && depth < params_.max_depth && sample.size() >= 2 * params_.min_leaf) {
      split = best_split(sample, counts);
    }
    if (!split.found) {
      tree_.nodes[id].label = majority;
      return id;
    }

    std::vector<std::size_t> left, right;
    for (auto r : sample) {
      (static_cast<double>(data_.rows[r][split.feature]) <= split.threshold ? left : right).push_back(r);
    }
    sample.clear();
    sample.shrink_to_fit();
    const auto l = grow(left, depth + 1);
    const auto r = grow(right, depth + 1);
    auto& node = tree_.nodes[id];
    node.feature = static_cast<std::int32_t>(split.feature);
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  SplitChoice best_split(const std::vector<std::size_t>& sample, const std::vector<std::size_t>& counts) {
    std::shuffle(feature_order_.begin(), feature_order_.end(), rng_);
    SplitChoice best;
    const double n = static_cast<double>(sample.size());
    std::vector<std::size_t> sorted = sample;
    std::vector<std::size_t> left_counts(counts.size());
    for (std::size_t k = 0; k < features_per_split_; ++k) {
      const std::size_t f = feature_order_[k];
      std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        return data_.rows[a][f] < data_.rows[b][f];
      });
      std::fill(left_counts.begin(), left_counts.end(), 0);
      double left_sq = 0.0;
      double right_sq = 0.0;
      for (auto c : counts) right_sq += static_cast<double>(c) * static_cast<double>(c);
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const ClassId c = data_.labels[sorted[i]];
        const double lc = static_cast<double>(left_counts[c]);
        const double rc = static_cast<double>(counts[c] - left_counts[c]);
        left_sq += 2.0 * lc + 1.0;
        right_sq -= 2.0 * rc - 1.0;
        ++left_counts[c];

        const auto v = data_.rows[sorted[i]][f];
        const auto next = data_.rows[sorted[i + 1]][f];
        if (v == next) continue;
        const std::size_t nl = i + 1;
        const std::size_t nr = sorted.size() - nl;
        if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
        // n * weighted Gini = nl - sum(l^2)/nl + nr - sum(r^2)/nr
        const double impurity = n - left_sq / static_cast<double>(nl) - right_sq / static_cast<double>(nr);
        if (!best.found || impurity < best.impurity - 1e-12) {
          best = {true, f, (static_cast<double>(v) + static_cast<double>(next)) / 2.0, impurity};
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  const ForestParams& params_;
  std::size_t features_per_split_;
  std::mt19937_64& rng_;
  std::vector<std::size_t> feature_order_;
  DecisionTree tree_;
};

}  // namespace

VotingEnsemble train_random_forest(const Dataset& training, const ForestParams& params) {
  training.validate();
  if (training.size() == 0) throw TrainerError("training dataset is empty");
  std::vector<bool> seen(training.classes.size(), false);
  for (auto l : training.labels) seen[l] = true;
  if (std::count(seen.begin(), seen.end(), true) < 2) {
    throw TrainerError("training dataset must contain at least two classes");
  }
  if (params.n_trees == 0) throw TrainerError("n_trees must be >= 1");
  if (params.min_leaf == 0) throw TrainerError("min_leaf must be >= 1");
  if (!(params.bootstrap_fraction > 0.0)) throw TrainerError("bootstrap fraction must be > 0");
  const std::size_t n_features = training.schema.size();
  std::size_t per_split = params.feature_subsample;
  if (per_split == 0) per_split = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features))));
  per_split = std::min(per_split, n_features);

  std::mt19937_64 rng(params.seed);
  VotingEnsemble model;
  model.schema = training.schema;
  model.classes = training.classes;
  TreeBuilder builder(training, params, per_split, rng);
  const auto sample_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(params.bootstrap_fraction * static_cast<double>(training.size()))));
  std::uniform_int_distribution<std::size_t> pick(0, training.size() - 1);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    std::vector<std::size_t> sample(sample_size);
    for (auto& s : sample) s = pick(rng);
    model.trees.push_back(builder.build(std::move(sample)));
  }
  return model;
}

ClassThresholds compute_thresholds(const VotingEnsemble& model, const Dataset& training) {
  std::vector<std::vector<double>> scores(model.classes.size());
  for (std::size_t r = 0; r < training.size(); ++r) {
    const ClassId truth = model.class_id(training.classes[training.labels[r]]);
    const auto p = predict(model, training.rows[r]);
    if (p.label == truth) scores[truth].push_back(p.score);
  }
  std::string empty;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (scores[c].empty()) empty += (empty.empty() ? "" : ", ") + model.classes[c];
  }
  if (!empty.empty()) throw ThresholdError("no correctly labelled training rows for class(es): " + empty);

  ClassThresholds out;
  for (const auto& s : scores) {
    const double n = static_cast<double>(s.size());
    const double mu = std::accumulate(s.begin(), s.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : s) ss += (v - mu) * (v - mu);
    out.per_class.push_back(make_threshold(mu, std::sqrt(ss / n)));
  }
  return out;
}

double accuracy(const VotingEnsemble& model, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    if (predict(model, data.rows[r]).label == model.class_id(data.classes[data.labels[r]])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace treeaudit
