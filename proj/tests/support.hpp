#pragma once

// Fixtures, independent oracles and random model builders shared by the unit
// and acceptance tests. Oracles here deliberately avoid calling the library
// routine they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "treeaudit/intervals.hpp"
#include "treeaudit/model.hpp"
#include "treeaudit/model_io.hpp"
#include "treeaudit/schema.hpp"
#include "treeaudit/training.hpp"
#include "treeaudit/traffic.hpp"

namespace treeaudit::testing {

inline std::string fixture(const std::string& name) { return std::string(TREEAUDIT_FIXTURE_DIR) + "/" + name; }

// Three unpaired packet counters named f1, f2, f3 (or as many as asked).
inline FeatureSchema plain_schema(std::size_t n = 3) {
  std::vector<Feature> features;
  for (std::size_t i = 0; i < n; ++i) features.push_back({"f" + std::to_string(i + 1), Direction::kIn, Unit::kPkt});
  return FeatureSchema(features, {});
}

// One flow: pkt then byte.
inline FeatureSchema pair_schema(std::int64_t frame_min = kDefaultFrameMin, std::int64_t frame_max = kDefaultFrameMax) {
  return FeatureSchema({{"p", Direction::kIn, Unit::kPkt}, {"b", Direction::kIn, Unit::kByte}}, {{"flow", 0, 1}},
                       frame_min, frame_max);
}

struct Stats {
  double mu = 0.0;
  double sigma = 0.0;
};

// Population mean and standard deviation, two passes.
inline Stats two_pass(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mu = sum / static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - mu) * (x - mu);
  return {mu, std::sqrt(sq / static_cast<double>(v.size()))};
}

inline std::int64_t first_count(const Interval& iv) {
  return iv.lo < 0 ? 0 : static_cast<std::int64_t>(std::floor(iv.lo)) + 1;
}

// Brute force over every packet count and frame size.
inline bool oracle_equal_size(const Interval& pkt, const Interval& byte, std::int64_t fmin, std::int64_t fmax,
                              std::int64_t p_limit) {
  for (std::int64_t p = 0; p <= p_limit; ++p) {
    if (!pkt.contains(p)) continue;
    if (p == 0) {
      if (byte.contains(0)) return true;
      continue;
    }
    for (std::int64_t s = fmin; s <= fmax; ++s) {
      if (byte.contains(p * s)) return true;
    }
  }
  return false;
}

// Brute force over packet counts and byte totals.
inline bool oracle_frame_size(const Interval& pkt, const Interval& byte, std::int64_t fmin, std::int64_t fmax,
                              std::int64_t p_limit) {
  for (std::int64_t p = 0; p <= p_limit; ++p) {
    if (!pkt.contains(p)) continue;
    for (std::int64_t b = p * fmin; b <= p * fmax; ++b) {
      if (static_cast<double>(b) > byte.hi) break;
      if (byte.contains(b)) return true;
    }
  }
  return false;
}

struct FlowCost {
  std::int64_t packets = 0;
  std::int64_t bytes = 0;
};

// Cheapest additions (packets, then bytes) taking one flow from (bp, bb) into
// (pkt, byte), by a linear scan over the number of added packets.
inline std::optional<FlowCost> oracle_flow_cost(const Interval& pkt, const Interval& byte, std::int64_t bp,
                                                std::int64_t bb, std::int64_t fmin, std::int64_t fmax, bool equal_size,
                                                std::int64_t k_limit = 200'000) {
  for (std::int64_t k = 0; k <= k_limit; ++k) {
    if (!pkt.contains(bp + k)) {
      if (static_cast<double>(bp + k) > pkt.hi) return std::nullopt;
      continue;
    }
    if (k == 0) {
      if (byte.contains(bb)) return FlowCost{0, 0};
      continue;
    }
    if (equal_size) {
      // Scan frame sizes from the smallest; the first landing in range is cheapest.
      for (std::int64_t s = fmin; s <= fmax; ++s) {
        const auto total = bb + k * s;
        if (static_cast<double>(total) > byte.hi) break;
        if (byte.contains(total)) return FlowCost{k, k * s};
      }
    } else {
      for (std::int64_t add = k * fmin; add <= k * fmax; ++add) {
        const auto total = bb + add;
        if (static_cast<double>(total) > byte.hi) break;
        if (byte.contains(total)) return FlowCost{k, add};
      }
    }
  }
  return std::nullopt;
}

// Overhead of reaching `box` from `base` under the schema, or nullopt.
inline std::optional<FlowCost> oracle_overhead(const RecipeBox& box, FeatureView base, const FeatureSchema& schema,
                                               bool equal_size) {
  FlowCost total;
  std::vector<bool> paired(schema.size(), false);
  for (const auto& pair : schema.flow_pairs()) {
    paired[pair.pkt] = paired[pair.byte] = true;
    auto c = oracle_flow_cost(box.intervals[pair.pkt], box.intervals[pair.byte], base[pair.pkt], base[pair.byte],
                              schema.frame_min(), schema.frame_max(), equal_size);
    if (!c) return std::nullopt;
    total.packets += c->packets;
    total.bytes += c->bytes;
  }
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (paired[f]) continue;
    const auto& iv = box.intervals[f];
    std::int64_t v = base[f];
    while (!iv.contains(v) && static_cast<double>(v) <= iv.hi) ++v;
    if (!iv.contains(v)) return std::nullopt;
    const auto add = v - base[f];
    if (schema.feature(f).unit == Unit::kPkt) {
      total.packets += add;
    } else {
      total.bytes += add;
    }
  }
  return total;
}

// Random tree over n_features unpaired features with integer thresholds drawn
// from [0, max_threshold].
inline DecisionTree random_tree(std::mt19937_64& rng, std::size_t depth, std::size_t n_features, ClassId n_classes,
                                int max_threshold = 200, double leaf_chance = 0.25) {
  std::uniform_int_distribution<std::size_t> feature(0, n_features - 1);
  std::uniform_int_distribution<int> threshold(0, max_threshold);
  std::uniform_int_distribution<ClassId> label(0, n_classes - 1);
  std::bernoulli_distribution stop(leaf_chance);
  std::function<DecisionTree(std::size_t)> build = [&](std::size_t d) {
    if (d == 0 || stop(rng)) return DecisionTree::leaf(label(rng));
    const auto f = feature(rng);
    const double t = threshold(rng);
    auto l = build(d - 1);
    auto r = build(d - 1);
    return DecisionTree::split(f, t, l, r);
  };
  return build(depth);
}

struct PathStep {
  std::size_t feature;
  bool at_most;
};

struct LeafPath {
  std::int32_t leaf;
  std::vector<PathStep> steps;
};

// Every root-to-leaf path, listed explicitly.
inline std::vector<LeafPath> enumerate_paths(const DecisionTree& tree) {
  std::vector<LeafPath> out;
  std::vector<std::pair<std::int32_t, std::vector<PathStep>>> stack{{0, {}}};
  while (!stack.empty()) {
    auto [i, steps] = std::move(stack.back());
    stack.pop_back();
    const auto& n = tree.nodes[i];
    if (n.is_leaf()) {
      out.push_back({i, steps});
      continue;
    }
    auto right = steps;
    right.push_back({static_cast<std::size_t>(n.feature), false});
    steps.push_back({static_cast<std::size_t>(n.feature), true});
    stack.push_back({n.right, std::move(right)});
    stack.push_back({n.left, std::move(steps)});
  }
  return out;
}

// Integer grid with one representative of every cell the thresholds cut out.
inline std::vector<std::vector<std::int64_t>> threshold_grid(const VotingEnsemble& model,
                                                             const std::vector<double>& extra_cuts = {}) {
  std::vector<std::set<std::int64_t>> values(model.schema.size(), std::set<std::int64_t>{0});
  auto add = [&](std::size_t f, double t) {
    const auto c = static_cast<std::int64_t>(std::floor(t));
    for (auto v : {c - 1, c, c + 1, c + 2}) {
      if (v >= 0 && v <= 2000) values[f].insert(v);
    }
  };
  for (const auto& tree : model.trees) {
    for (const auto& n : tree.nodes) {
      if (!n.is_leaf()) add(static_cast<std::size_t>(n.feature), n.threshold);
      for (const auto& g : n.guards) add(g.feature, g.threshold);
    }
  }
  for (std::size_t f = 0; f < extra_cuts.size(); ++f) {
    if (!std::isinf(extra_cuts[f])) add(f, extra_cuts[f]);
  }
  std::vector<std::vector<std::int64_t>> out;
  for (auto& s : values) out.emplace_back(s.begin(), s.end());
  return out;
}

// Calls fn on every point of the cartesian grid; stops when fn returns true.
inline bool any_grid_point(const std::vector<std::vector<std::int64_t>>& grid,
                           const std::function<bool(const FeatureVector&)>& fn) {
  FeatureVector x(grid.size(), 0);
  std::function<bool(std::size_t)> rec = [&](std::size_t f) {
    if (f == grid.size()) return fn(x);
    for (auto v : grid[f]) {
      x[f] = v;
      if (rec(f + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

// Vote counting written out directly: per-class weight over total weight.
inline std::pair<ClassId, double> oracle_vote(const VotingEnsemble& model, FeatureView x) {
  std::vector<double> votes(model.classes.size(), 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const auto& nodes = model.trees[t].nodes;
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      i = static_cast<double>(x[nodes[i].feature]) <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    }
    bool fired = false;
    for (const auto& g : nodes[i].guards) fired = fired || static_cast<double>(x[g.feature]) > g.threshold;
    const double w = model.weight(t);
    total += w;
    if (!fired) votes[nodes[i].label] += w;
  }
  ClassId best = 0;
  for (ClassId c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return {best, votes[best] / total};
}

// Random integer point inside the box whose flows are frame-size realizable.
// Unbounded ranges are capped a little above their lower end.
inline std::optional<FeatureVector> sample_region(const RecipeBox& box, const FeatureSchema& schema,
                                                  std::mt19937_64& rng, int attempts = 50) {
  auto pick = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  auto upper = [](const Interval& iv, std::int64_t lo, std::int64_t span) {
    return std::isinf(iv.hi) ? lo + span : std::min(lo + span, static_cast<std::int64_t>(std::floor(iv.hi)));
  };
  for (int a = 0; a < attempts; ++a) {
    FeatureVector x(schema.size(), 0);
    std::vector<bool> done(schema.size(), false);
    bool ok = true;
    for (const auto& pair : schema.flow_pairs()) {
      const auto& P = box.intervals[pair.pkt];
      const auto& B = box.intervals[pair.byte];
      // Only counts whose frames can hold the byte interval.
      const auto fmin = schema.frame_min(), fmax = schema.frame_max();
      const auto plo = std::max(first_count(P), (first_count(B) + fmax - 1) / fmax);
      auto phi = upper(P, plo, 50);
      if (!std::isinf(B.hi)) phi = std::min(phi, static_cast<std::int64_t>(std::floor(B.hi)) / fmin);
      if (plo > phi) {
        ok = false;
        break;
      }
      const auto p = pick(plo, phi);
      auto blo = std::max(first_count(B), p * fmin);
      const auto bhi = std::min(upper(B, blo, 5000), p * fmax);
      if (blo > bhi) {
        ok = false;
        break;
      }
      x[pair.pkt] = p;
      x[pair.byte] = pick(blo, bhi);
      done[pair.pkt] = done[pair.byte] = true;
    }
    if (!ok) continue;
    for (std::size_t f = 0; f < schema.size(); ++f) {
      if (done[f]) continue;
      const auto lo = first_count(box.intervals[f]);
      x[f] = pick(lo, upper(box.intervals[f], lo, 50));
    }
    return x;
  }
  return std::nullopt;
}

// The synthetic world most tests share: nine device classes, 100 trees.
struct SyntheticWorld {
  Dataset data;
  VotingEnsemble model;
  ClassThresholds thresholds;
};

inline SyntheticWorld make_world(std::uint64_t data_seed = 7, std::uint64_t train_seed = 3,
                                 std::size_t epochs_per_class = 400, std::size_t trees = 100) {
  SyntheticWorld w;
  w.data = generate_dataset(BenignTraceModel::iot_default(), epochs_per_class, data_seed);
  ForestParams params;
  params.n_trees = trees;
  params.max_depth = 12;
  params.seed = train_seed;
  w.model = train_random_forest(w.data, params);
  w.thresholds = compute_thresholds(w.model, w.data);
  return w;
}

inline const SyntheticWorld& shared_world() {
  static const SyntheticWorld w = make_world();
  return w;
}

}  // namespace treeaudit::testing
