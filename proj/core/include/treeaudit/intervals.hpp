#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "treeaudit/model.hpp"
#include "treeaudit/schema.hpp"

namespace treeaudit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest packet count the equal-size search will try.
inline constexpr std::int64_t kDefaultPacketCap = 1'000'000;

// Stand-in for "no upper limit" in integer count ranges.
inline constexpr std::int64_t kUnboundedCount = std::numeric_limits<std::int64_t>::max();

// Inclusive integer range; hi == kUnboundedCount means unbounded.
struct CountRange {
  std::int64_t lo = 0;
  std::int64_t hi = kUnboundedCount;

  bool empty() const noexcept { return lo > hi; }
  bool contains(std::int64_t v) const noexcept { return lo <= v && v <= hi; }
};

// (lo, hi] over the reals, matching the `<= threshold` / `> threshold` split
// semantics. Counts are non-negative integers, so a feature value v is
// admissible iff v >= 0 and lo < v <= hi.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  static Interval full() { return {}; }
  static Interval greater_than(double tau) { return {tau, kInf}; }
  static Interval at_most(double tau) { return {-kInf, tau}; }

  bool is_full() const noexcept { return lo == -kInf && hi == kInf; }
  bool contains(std::int64_t v) const noexcept {
    const auto d = static_cast<double>(v);
    return lo < d && d <= hi;
  }
  // Admissible non-negative integers; empty() when there are none.
  CountRange counts() const noexcept;
  bool consistent() const noexcept { return !counts().empty(); }

  bool operator==(const Interval&) const = default;
};

// Intersection (max of lows, min of highs), or nullopt when it admits no
// non-negative integer.
std::optional<Interval> merge(const Interval& a, const Interval& b);

// Realizability of one flow: some p in `pkt`, b in `byte` with
// p * frame_min <= b <= p * frame_max. p = 0 requires b = 0.
bool pair_frame_size_consistent(const Interval& pkt, const Interval& byte, std::int64_t frame_min,
                                std::int64_t frame_max);

// Equal-size realizability: some p in `pkt` and frame size s in
// [frame_min, frame_max] with p * s in `byte`. Packet counts above p_cap are
// not searched.
bool pair_boundary_consistent(const Interval& pkt, const Interval& byte, std::int64_t frame_min,
                              std::int64_t frame_max, std::int64_t p_cap = kDefaultPacketCap);

struct EqualSizeRealization {
  std::int64_t packets = 0;
  std::int64_t frame_size = 0;  // 0 when packets == 0
  std::int64_t bytes() const noexcept { return packets * frame_size; }
};

// Smallest packet count, then smallest frame size, whose product lands in
// `byte`. Packets are counted on top of `base_packets`/`base_bytes` already
// present: the result satisfies base_packets + p in pkt and
// base_bytes + p * s in byte.
std::optional<EqualSizeRealization> smallest_equal_size(const Interval& pkt, const Interval& byte,
                                                         std::int64_t frame_min, std::int64_t frame_max,
                                                         std::int64_t base_packets = 0,
                                                         std::int64_t base_bytes = 0,
                                                         std::int64_t p_cap = kDefaultPacketCap);

struct RecipeProvenance {
  std::size_t permutation = 0;
  // Original tree indices whose adversarial paths were merged, in visit order.
  std::vector<std::size_t> trees;

  bool operator==(const RecipeProvenance&) const = default;
};

// One adversarial recipe: an interval per schema feature plus target class.
struct RecipeBox {
  std::vector<Interval> intervals;
  ClassId target = 0;
  RecipeProvenance provenance;

  static RecipeBox full(std::size_t n_features, ClassId target) {
    return RecipeBox{std::vector<Interval>(n_features), target, {}};
  }

  // Same region and target; provenance is ignored.
  bool same_region(const RecipeBox& o) const { return target == o.target && intervals == o.intervals; }
};

bool single_feature_consistent(const RecipeBox& box);
bool frame_size_consistent(const RecipeBox& box, const FeatureSchema& schema);
bool boundary_consistent(const RecipeBox& box, const FeatureSchema& schema,
                         std::int64_t p_cap = kDefaultPacketCap);
// All three checks.
bool fully_consistent(const RecipeBox& box, const FeatureSchema& schema,
                      std::int64_t p_cap = kDefaultPacketCap);

// lo_f < x_f <= hi_f for every feature.
bool admits(const RecipeBox& box, FeatureView x);

}  // namespace treeaudit
