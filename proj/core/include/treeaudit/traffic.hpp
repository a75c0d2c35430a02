#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "treeaudit/dataset.hpp"
#include "treeaudit/schema.hpp"

namespace treeaudit {

// Synthetic benign behaviour of one flow of one device class, per window.
struct FlowTraffic {
  double base_packets = 0.0;
  // Relative uniform jitter: packets ~ base * (1 + U(-jitter, jitter)).
  double jitter = 0.0;
  // Volume multiplier during a burst window; 1 leaves the flow alone.
  double burst_factor = 1.0;
  std::int64_t max_packets = 0;
  std::int64_t frame_min = kDefaultFrameMin;
  std::int64_t frame_max = kDefaultFrameMin;
};

struct ClassTraffic {
  std::string name;
  // One entry per schema flow pair, same order.
  std::vector<FlowTraffic> flows;
  // Chance that a window is a burst (one event drives every flow's factor).
  double burst_probability = 0.0;
  // False models devices on which spoofed injection breaks forwarding.
  bool injection_supported = true;
};

struct BenignTraceModel {
  FeatureSchema schema;
  std::vector<ClassTraffic> classes;
  std::int64_t window_seconds = 60;

  // Nine household device profiles over the default sixteen-counter schema.
  static BenignTraceModel iot_default();

  const ClassTraffic& find(std::string_view name) const;
  // Largest count the generator can emit for (class, feature) in one window.
  std::int64_t configured_max(std::string_view cls, std::size_t feature) const;
  void validate() const;
};

// Counters of one device over one inference window. per_second holds the same
// counts at one-second resolution (window_seconds entries) so windows that do
// not align with the epoch grid can be re-aggregated.
struct TelemetryEpoch {
  std::string device_class;
  std::int64_t start_seconds = 0;
  std::int64_t window_seconds = 60;
  FeatureVector counts;
  std::vector<FeatureVector> per_second;
};

// Deterministic for a given seed. Every flow keeps bytes >= frame_min * pkts
// and packets <= max_packets.
std::vector<TelemetryEpoch> generate_benign_trace(const BenignTraceModel& model, std::string_view cls,
                                                  std::size_t n_epochs, std::uint64_t seed);

// epochs_per_class windows for every class, labelled by class name.
Dataset generate_dataset(const BenignTraceModel& model, std::size_t epochs_per_class, std::uint64_t seed);

}  // namespace treeaudit
