#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "treeaudit/recipe_search.hpp"
#include "treeaudit/schema.hpp"

namespace treeaudit {

// SYN/SYN-ACK frame size implied by 1,000 packets carrying 74,000 bytes.
inline constexpr std::int64_t kSynFrameSize = 74;
// Assumed SSDP response size; overridable.
inline constexpr std::int64_t kSsdpResponseFrameSize = 300;

struct AffectedFlow {
  std::string flow;
  std::int64_t frame_size = 0;
};

// A volumetric attack: each affected flow carries `impact` packets of
// `frame_size` bytes per inference window.
struct AttackProfile {
  std::string name;
  std::vector<AffectedFlow> flows;
  // Counters outside any flow pair, raised by `impact` per window.
  std::vector<std::string> counters;
  std::int64_t impact = 1;

  // Throws ProfileError on unknown flows or counters, impact < 1, or frame
  // sizes outside the schema's frame bounds.
  void validate(const FeatureSchema& schema) const;
};

// Reflected SYN-ACKs leave the victim towards the WAN and the spoofed SYNs
// arrive from it: both WAN directions carry the same volume.
AttackProfile syn_reflection(std::int64_t impact, std::int64_t frame_size = kSynFrameSize);
AttackProfile ssdp_reflection(std::int64_t impact, std::int64_t frame_size = kSsdpResponseFrameSize);

// {"name": ..., "features": [{"feature": "<pkt, byte or flow name>", "size": N}, ...]}
// A feature outside every flow pair becomes a counter and needs no size.
AttackProfile parse_attack_profile(std::string_view json_text, const FeatureSchema& schema, std::int64_t impact);

// "syn", "ssdp" or "custom:<path>".
AttackProfile resolve_attack(std::string_view spec, const FeatureSchema& schema, std::int64_t impact);

// pkt feature > impact - 1 and byte feature > impact * size - 1 per flow;
// counter > impact - 1.
TargetRules build_target_rules(const AttackProfile& profile, const FeatureSchema& schema, ClassId target);

// Counts the attack adds to one window.
FeatureVector attack_delta(const AttackProfile& profile, const FeatureSchema& schema);

enum class ImpactLevel { kLow, kMedium, kHigh };

// Packets per minute: below 200 low, 200..700 medium, above 700 high.
ImpactLevel classify_impact(std::int64_t packets);
std::string_view to_string(ImpactLevel level);

}  // namespace treeaudit
