#include <gtest/gtest.h>

#include "support.hpp"
#include "treeaudit/attacks.hpp"
#include "treeaudit/errors.hpp"

namespace treeaudit {
namespace {

const FeatureSchema& iot() {
  static const FeatureSchema s = FeatureSchema::iot_default();
  return s;
}

double bound_on(const TargetRules& r, const char* feature) {
  const auto f = iot().require_index(feature);
  for (const auto& b : r.bounds) {
    if (b.feature == f) return b.threshold;
  }
  return -1;
}

TEST(TargetRules, SynReflectionThousand) {
  const auto r = build_target_rules(syn_reflection(1000, 74), iot(), 2);
  ASSERT_EQ(r.bounds.size(), 4u);
  EXPECT_EQ(r.target, 2u);
  EXPECT_EQ(bound_on(r, "wan_in_pkt"), 999);
  EXPECT_EQ(bound_on(r, "wan_in_byte"), 73999);
  EXPECT_EQ(bound_on(r, "wan_out_pkt"), 999);
  EXPECT_EQ(bound_on(r, "wan_out_byte"), 73999);
  const auto box = r.to_box(iot().size());
  EXPECT_TRUE(box.intervals[iot().require_index("wan_in_pkt")].contains(1000));
  EXPECT_FALSE(box.intervals[iot().require_index("wan_in_pkt")].contains(999));
}

TEST(TargetRules, SingleMinimalPacket) {
  const auto r = build_target_rules(ssdp_reflection(1, 64), iot(), 0);
  EXPECT_EQ(bound_on(r, "ssdp_out_pkt"), 0);
  EXPECT_EQ(bound_on(r, "ssdp_out_byte"), 63);
}

TEST(TargetRules, SsdpFiveHundred) {
  const auto r = build_target_rules(ssdp_reflection(500, 300), iot(), 0);
  ASSERT_EQ(r.bounds.size(), 2u);
  EXPECT_EQ(bound_on(r, "ssdp_out_pkt"), 499);
  EXPECT_EQ(bound_on(r, "ssdp_out_byte"), 149999);
  const auto delta = attack_delta(ssdp_reflection(500, 300), iot());
  EXPECT_EQ(delta[iot().require_index("ssdp_out_pkt")], 500);
  EXPECT_EQ(delta[iot().require_index("ssdp_out_byte")], 150000);
}

TEST(TargetRules, OnlyLowerBounds) {
  for (const auto& p : {syn_reflection(37), ssdp_reflection(900)}) {
    const auto box = build_target_rules(p, iot(), 0).to_box(iot().size());
    for (const auto& iv : box.intervals) EXPECT_EQ(iv.hi, kInf);
  }
}

TEST(Profiles, Validation) {
  EXPECT_THROW(build_target_rules(syn_reflection(0), iot(), 0), ProfileError);
  EXPECT_THROW(build_target_rules(syn_reflection(10, 63), iot(), 0), ProfileError);
  EXPECT_THROW(build_target_rules(AttackProfile{"x", {{"telnet", 80}}, {}, 5}, iot(), 0), ProfileError);
  EXPECT_THROW(resolve_attack("smurf", iot(), 10), ProfileError);
  EXPECT_EQ(resolve_attack("syn", iot(), 10).name, "syn_reflection");
  EXPECT_EQ(resolve_attack("ssdp", iot(), 10).flows.at(0).frame_size, kSsdpResponseFrameSize);
}

TEST(Profiles, CustomDocument) {
  const auto p = parse_attack_profile(
      R"({"name": "ntp_reflect", "features": [{"feature": "ntp_out_pkt", "size": 468}, {"feature": "ntp_out", "size": 468}]})",
      iot(), 20);
  ASSERT_EQ(p.flows.size(), 1u);
  EXPECT_EQ(p.flows[0].flow, "ntp_out");
  EXPECT_EQ(bound_on(build_target_rules(p, iot(), 0), "ntp_out_byte"), 20 * 468 - 1);
  EXPECT_THROW(parse_attack_profile(R"({"name": "x", "features": [{"feature": "dns_in"}]})", iot(), 1), ProfileError);
  EXPECT_THROW(parse_attack_profile("[", iot(), 1), ProfileError);
}

TEST(Profiles, UnpairedCounter) {
  const auto schema = testing::plain_schema();
  const auto p = parse_attack_profile(R"({"name": "f1_volume", "features": [{"feature": "f1"}]})", schema, 1001);
  EXPECT_EQ(p.counters, (std::vector<std::string>{"f1"}));
  const auto r = build_target_rules(p, schema, 0);
  ASSERT_EQ(r.bounds.size(), 1u);
  EXPECT_EQ(r.bounds[0].threshold, 1000);
  EXPECT_EQ(attack_delta(p, schema), (FeatureVector{1001, 0, 0}));
}

TEST(Impact, Levels) {
  EXPECT_EQ(classify_impact(0), ImpactLevel::kLow);
  EXPECT_EQ(classify_impact(199), ImpactLevel::kLow);
  EXPECT_EQ(classify_impact(200), ImpactLevel::kMedium);
  EXPECT_EQ(classify_impact(700), ImpactLevel::kMedium);
  EXPECT_EQ(classify_impact(701), ImpactLevel::kHigh);
  EXPECT_EQ(to_string(ImpactLevel::kHigh), "high");
}

}  // namespace
}  // namespace treeaudit
