#include "treeaudit/attacks.hpp"

#include <algorithm>

#include "json_util.hpp"
#include "treeaudit/files.hpp"

namespace treeaudit {

void AttackProfile::validate(const FeatureSchema& schema) const {
  if (impact < 1) throw ProfileError("attack '" + name + "': impact must be >= 1");
  if (flows.empty() && counters.empty()) throw ProfileError("attack '" + name + "': no affected features");
  for (const auto& c : counters) {
    const auto i = schema.index_of(c);
    if (!i) throw ProfileError("attack '" + name + "': unknown feature '" + c + "'");
    if (schema.pair_of(*i)) throw ProfileError("attack '" + name + "': feature '" + c + "' belongs to a flow");
  }
  for (const auto& f : flows) {
    if (!schema.flow_index(f.flow)) throw ProfileError("attack '" + name + "': unknown flow '" + f.flow + "'");
    if (f.frame_size < schema.frame_min() || f.frame_size > schema.frame_max()) {
      throw ProfileError("attack '" + name + "': frame size " + std::to_string(f.frame_size) + " of flow '" +
                         f.flow + "' is outside [" + std::to_string(schema.frame_min()) + ", " +
                         std::to_string(schema.frame_max()) + "]");
    }
  }
}

AttackProfile syn_reflection(std::int64_t impact, std::int64_t frame_size) {
  return {"syn_reflection", {{"wan_in", frame_size}, {"wan_out", frame_size}}, {}, impact};
}

AttackProfile ssdp_reflection(std::int64_t impact, std::int64_t frame_size) {
  return {"ssdp_reflection", {{"ssdp_out", frame_size}}, {}, impact};
}

AttackProfile parse_attack_profile(std::string_view json_text, const FeatureSchema& schema, std::int64_t impact) {
  detail::Json j;
  try {
    j = detail::Json::parse(json_text.begin(), json_text.end());
  } catch (const detail::Json::parse_error& e) {
    throw ProfileError(std::string("attack profile: invalid JSON: ") + e.what());
  }
  AttackProfile profile;
  profile.impact = impact;
  try {
    profile.name = detail::require_string(j, "name", "profile");
    const auto& features = detail::require(j, "features", "profile");
    if (!features.is_array()) throw ParseError("profile.features: expected an array");
    for (std::size_t i = 0; i < features.size(); ++i) {
      const std::string path = "profile.features[" + std::to_string(i) + "]";
      const auto name = detail::require_string(features[i], "feature", path);
      std::string flow = name;
      if (auto idx = schema.index_of(name)) {
        auto pair = schema.pair_of(*idx);
        if (!pair) {
          if (std::find(profile.counters.begin(), profile.counters.end(), name) == profile.counters.end()) {
            profile.counters.push_back(name);
          }
          continue;
        }
        flow = schema.flow_pairs()[*pair].flow;
      }
      const auto size = static_cast<std::int64_t>(detail::require_number(features[i], "size", path));
      const bool dup = std::any_of(profile.flows.begin(), profile.flows.end(),
                                   [&](const AffectedFlow& f) { return f.flow == flow; });
      if (!dup) profile.flows.push_back({flow, size});
    }
  } catch (const ParseError& e) {
    throw ProfileError(e.what());
  }
  profile.validate(schema);
  return profile;
}

AttackProfile resolve_attack(std::string_view spec, const FeatureSchema& schema, std::int64_t impact) {
  AttackProfile profile;
  if (spec == "syn" || spec == "syn_reflection") {
    profile = syn_reflection(impact);
  } else if (spec == "ssdp" || spec == "ssdp_reflection") {
    profile = ssdp_reflection(impact);
  } else if (spec.starts_with("custom:")) {
    return parse_attack_profile(read_file(std::string(spec.substr(7))), schema, impact);
  } else {
    throw ProfileError("unknown attack '" + std::string(spec) + "' (expected syn, ssdp or custom:<file>)");
  }
  profile.validate(schema);
  return profile;
}

TargetRules build_target_rules(const AttackProfile& profile, const FeatureSchema& schema, ClassId target) {
  profile.validate(schema);
  TargetRules rules;
  rules.target = target;
  for (const auto& f : profile.flows) {
    const auto& pair = schema.flow_pairs()[*schema.flow_index(f.flow)];
    rules.bounds.push_back({pair.pkt, static_cast<double>(profile.impact - 1)});
    rules.bounds.push_back({pair.byte, static_cast<double>(profile.impact * f.frame_size - 1)});
  }
  for (const auto& c : profile.counters) {
    rules.bounds.push_back({*schema.index_of(c), static_cast<double>(profile.impact - 1)});
  }
  return rules;
}

FeatureVector attack_delta(const AttackProfile& profile, const FeatureSchema& schema) {
  profile.validate(schema);
  FeatureVector delta(schema.size(), 0);
  for (const auto& f : profile.flows) {
    const auto& pair = schema.flow_pairs()[*schema.flow_index(f.flow)];
    delta[pair.pkt] += profile.impact;
    delta[pair.byte] += profile.impact * f.frame_size;
  }
  for (const auto& c : profile.counters) delta[*schema.index_of(c)] += profile.impact;
  return delta;
}

ImpactLevel classify_impact(std::int64_t packets) {
  if (packets < 200) return ImpactLevel::kLow;
  if (packets <= 700) return ImpactLevel::kMedium;
  return ImpactLevel::kHigh;
}

std::string_view to_string(ImpactLevel level) {
  switch (level) {
    case ImpactLevel::kLow:
      return "low";
    case ImpactLevel::kMedium:
      return "medium";
    case ImpactLevel::kHigh:
      return "high";
  }
  return "unknown";
}

}  // namespace treeaudit
