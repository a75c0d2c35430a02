#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treeaudit/attacks.hpp"
#include "treeaudit/intervals.hpp"
#include "treeaudit/model.hpp"
#include "treeaudit/traffic.hpp"

namespace treeaudit {

// How injected bytes of one flow may be split across injected frames.
enum class ByteRealization {
  // Every injected frame of a flow has the same size.
  kEqualSize,
  // Frames may differ; only k * frame_min <= bytes <= k * frame_max holds.
  kMixedSize,
};

struct InjectionOptions {
  ByteRealization realization = ByteRealization::kEqualSize;
  std::int64_t p_cap = kDefaultPacketCap;
  // Devices whose forwarding breaks under spoofed traffic cannot be attacked adversarially.
  bool injection_supported = true;
};

// Spoofed header fields for packets injected on one flow. "GW" and "VIC"
// stand for gateway and victim, "*" for any value.
struct SpoofFields {
  std::string_view src_mac;
  std::string_view dst_mac;
  std::string_view src_ip;
  std::string_view dst_ip;
  std::string_view src_port;
  std::string_view dst_port;
};

// Entry for the default schema's flows; nullopt for unknown flows.
std::optional<SpoofFields> spoof_fields(std::string_view flow);

struct FlowInjection {
  std::size_t pair = 0;
  std::int64_t packets = 0;
  std::int64_t bytes = 0;
  // Size of every injected frame under kEqualSize, 0 otherwise.
  std::int64_t frame_size = 0;
};

struct InjectionPlan {
  // Overhead counts per feature (never negative).
  FeatureVector overhead;
  // Flows that receive overhead packets.
  std::vector<FlowInjection> flows;
  // Injected frames spoof the victim's MAC, so a broadcast ICMP on its behalf
  // has to restore the gateway's MAC table afterwards.
  bool corrective_icmp = false;

  std::int64_t overhead_packets(const FeatureSchema& schema) const;
  std::int64_t overhead_bytes(const FeatureSchema& schema) const;
};

// Cheapest way to move `base` (current counters plus attack traffic) into the
// recipe by only adding traffic: per flow the fewest packets, then the fewest
// bytes. nullopt when the recipe cannot be reached.
std::optional<InjectionPlan> plan_injection(const RecipeBox& recipe, FeatureView base, const FeatureSchema& schema,
                                            const InjectionOptions& options = {});

// Indices of recipes reachable from current + attack_delta by adding traffic.
std::vector<std::size_t> feasible_recipes(std::span<const RecipeBox> recipes, FeatureView current,
                                          FeatureView attack_delta, const FeatureSchema& schema,
                                          const InjectionOptions& options = {});

struct ClosestChoice {
  std::size_t recipe = 0;
  FeatureVector final_instance;
  InjectionPlan plan;
};

// Among `candidates` (indices into recipes), the one needing the fewest
// overhead packets; ties by overhead bytes, then by index order. nullopt when
// none is reachable.
std::optional<ClosestChoice> select_closest(std::span<const RecipeBox> recipes, std::span<const std::size_t> candidates,
                                            FeatureView current, FeatureView attack_delta, const FeatureSchema& schema,
                                            const InjectionOptions& options = {});

enum class EpochMode { kBenign, kAdversarial, kNonAdversarial };
std::string_view to_string(EpochMode mode);

struct EpisodeTiming {
  // The attacker's windows end shift_seconds before the model's epochs end.
  std::int64_t shift_seconds = 0;
  // Mode of each attacker window; windows past the end are benign.
  std::vector<EpochMode> schedule;
};

// `mode` for every epoch in `attack_epochs`, benign elsewhere.
std::vector<EpochMode> make_schedule(std::size_t n_epochs, EpochMode mode, std::span<const std::size_t> attack_epochs);
// Consecutive benign, adversarial and non-adversarial stages.
std::vector<EpochMode> staged_schedule(std::size_t benign, std::size_t adversarial, std::size_t non_adversarial);

struct EpochOutcome {
  std::size_t epoch = 0;
  EpochMode mode = EpochMode::kBenign;
  FeatureVector final_counts;
  ClassId predicted = 0;
  double score = 0.0;
  double threshold = 0.0;
  bool detected = false;
  // Reflected attack packets that left the victim during this epoch.
  std::int64_t attack_packets = 0;
  std::int64_t overhead_packets = 0;
  // For adversarial windows: a feasible recipe existed and the attack ran.
  bool feasible = true;
};

// What the attacker did in one of its windows.
struct WindowPlan {
  std::size_t window = 0;
  EpochMode mode = EpochMode::kBenign;
  FeatureVector observed;
  std::optional<std::size_t> recipe;
  std::optional<FeatureVector> target_instance;
  std::optional<InjectionPlan> injection;
  std::int64_t attack_packets_sent = 0;
  std::int64_t overhead_packets_sent = 0;
};

struct EpisodeResult {
  std::vector<EpochOutcome> outcomes;
  std::vector<WindowPlan> windows;

  std::int64_t attack_packets_sent() const;
  std::int64_t overhead_packets_sent() const;
};

// Replays `trace` against the model's epoch grid. The attacker sees a perfect
// copy of the victim's counters over its own (shifted) windows, picks the
// closest feasible recipe, and spreads attack and overhead packets uniformly
// over its window. Timestamps are drawn from `seed`.
EpisodeResult run_episode(const VotingEnsemble& model, const ClassThresholds& thresholds,
                          std::span<const RecipeBox> recipes, std::span<const TelemetryEpoch> trace,
                          const AttackProfile& attack, const EpisodeTiming& timing, std::uint64_t seed,
                          const InjectionOptions& options = {});

}  // namespace treeaudit
