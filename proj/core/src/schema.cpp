#include "treeaudit/schema.hpp"

#include <set>

#include "treeaudit/errors.hpp"

namespace treeaudit {

FeatureSchema::FeatureSchema(std::vector<Feature> features, std::vector<FlowPair> pairs,
                             std::int64_t frame_min, std::int64_t frame_max)
    : features_(std::move(features)),
      pairs_(std::move(pairs)),
      pair_of_(features_.size()),
      frame_min_(frame_min),
      frame_max_(frame_max) {
  if (frame_min_ < 1 || frame_max_ < frame_min_) {
    throw SchemaError("frame bounds must satisfy 1 <= frame_min <= frame_max, got [" +
                      std::to_string(frame_min_) + ", " + std::to_string(frame_max_) + "]");
  }
  std::set<std::string> names;
  for (const auto& f : features_) {
    if (!names.insert(f.name).second) throw SchemaError("duplicate feature name '" + f.name + "'");
  }
  std::set<std::string> flows;
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto& pair = pairs_[p];
    if (pair.pkt >= features_.size() || pair.byte >= features_.size()) {
      throw SchemaError("flow pair '" + pair.flow + "' references a missing feature");
    }
    if (features_[pair.pkt].unit != Unit::kPkt || features_[pair.byte].unit != Unit::kByte) {
      throw SchemaError("flow pair '" + pair.flow + "' must join a pkt and a byte feature");
    }
    if (!flows.insert(pair.flow).second) throw SchemaError("duplicate flow '" + pair.flow + "'");
    for (std::size_t idx : {pair.pkt, pair.byte}) {
      if (pair_of_[idx]) {
        throw SchemaError("feature '" + features_[idx].name + "' belongs to two flow pairs");
      }
      pair_of_[idx] = p;
    }
  }
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].unit == Unit::kByte && !pair_of_[i]) {
      throw SchemaError("byte feature '" + features_[i].name + "' is not in a flow pair");
    }
  }
}

FeatureSchema FeatureSchema::iot_default() {
  struct FlowDef {
    const char* flow;
    Direction dir;
  };
  constexpr FlowDef kFlows[] = {
      {"dns_in", Direction::kIn},   {"dns_out", Direction::kOut}, {"ntp_in", Direction::kIn},
      {"ntp_out", Direction::kOut}, {"ssdp_out", Direction::kOut}, {"lan_in", Direction::kIn},
      {"wan_in", Direction::kIn},   {"wan_out", Direction::kOut},
  };
  std::vector<Feature> features;
  std::vector<FlowPair> pairs;
  for (const auto& def : kFlows) {
    std::string flow = def.flow;
    pairs.push_back({flow, features.size(), features.size() + 1});
    features.push_back({flow + "_pkt", def.dir, Unit::kPkt});
    features.push_back({flow + "_byte", def.dir, Unit::kByte});
  }
  return FeatureSchema(std::move(features), std::move(pairs));
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t FeatureSchema::require_index(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw SchemaError("unknown feature '" + std::string(name) + "'");
}

std::optional<std::size_t> FeatureSchema::flow_index(std::string_view flow) const {
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    if (pairs_[p].flow == flow) return p;
  }
  return std::nullopt;
}

void FeatureSchema::validate(FeatureView x) const {
  if (x.size() != features_.size()) {
    throw SchemaError("feature vector has " + std::to_string(x.size()) + " values, schema expects " +
                      std::to_string(features_.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0) throw SchemaError("negative count for feature '" + features_[i].name + "'");
  }
}

}  // namespace treeaudit
