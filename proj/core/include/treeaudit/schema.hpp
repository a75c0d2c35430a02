#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace treeaudit {

// Per-device counters over one window: one non-negative integer per feature.
using FeatureVector = std::vector<std::int64_t>;
using FeatureView = std::span<const std::int64_t>;

enum class Direction { kIn, kOut };
enum class Unit { kPkt, kByte };

struct Feature {
  std::string name;
  Direction direction = Direction::kIn;
  Unit unit = Unit::kPkt;

  bool operator==(const Feature&) const = default;
};

// Packet and byte counters of the same network flow.
struct FlowPair {
  std::string flow;
  std::size_t pkt = 0;
  std::size_t byte = 0;

  bool operator==(const FlowPair&) const = default;
};

inline constexpr std::int64_t kDefaultFrameMin = 64;
inline constexpr std::int64_t kDefaultFrameMax = 1518;

class FeatureSchema {
 public:
  FeatureSchema() = default;

  // Throws SchemaError when names repeat, a byte feature is not in exactly one
  // pair, a pkt feature sits in more than one pair, or frame bounds are bad.
  FeatureSchema(std::vector<Feature> features, std::vector<FlowPair> pairs,
                std::int64_t frame_min = kDefaultFrameMin,
                std::int64_t frame_max = kDefaultFrameMax);

  // The sixteen flow counters: pkt/byte of DNS, NTP (both directions),
  // outgoing SSDP, incoming LAN and WAN in both directions.
  static FeatureSchema iot_default();

  std::size_t size() const noexcept { return features_.size(); }
  const std::vector<Feature>& features() const noexcept { return features_; }
  const Feature& feature(std::size_t i) const { return features_.at(i); }
  const std::vector<FlowPair>& flow_pairs() const noexcept { return pairs_; }
  std::int64_t frame_min() const noexcept { return frame_min_; }
  std::int64_t frame_max() const noexcept { return frame_max_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  // Like index_of but throws SchemaError naming the feature.
  std::size_t require_index(std::string_view name) const;

  // Index into flow_pairs() of the pair containing feature `i`, if any.
  std::optional<std::size_t> pair_of(std::size_t i) const { return pair_of_.at(i); }
  std::optional<std::size_t> flow_index(std::string_view flow) const;

  // Throws SchemaError on wrong length or negative counts.
  void validate(FeatureView x) const;

  FeatureSchema with_frame_bounds(std::int64_t frame_min, std::int64_t frame_max) const {
    return FeatureSchema(features_, pairs_, frame_min, frame_max);
  }

  bool operator==(const FeatureSchema& o) const {
    return features_ == o.features_ && pairs_ == o.pairs_ && frame_min_ == o.frame_min_ &&
           frame_max_ == o.frame_max_;
  }

 private:
  std::vector<Feature> features_;
  std::vector<FlowPair> pairs_;
  std::vector<std::optional<std::size_t>> pair_of_;
  std::int64_t frame_min_ = kDefaultFrameMin;
  std::int64_t frame_max_ = kDefaultFrameMax;
};

}  // namespace treeaudit
