#include "treeaudit/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "treeaudit/errors.hpp"

namespace treeaudit {

namespace {

struct ProfileRow {
  const char* name;
  // dns_in, dns_out, ntp_in, ntp_out, ssdp_out, lan_in, wan_in, wan_out
  double base[8];
  double jitter;
  double burst_probability;
  double burst_factor[8];
  std::int64_t wan_in_size[2];
  std::int64_t wan_out_size[2];
};

// Per-minute packet volumes loosely shaped after common household devices.
// Control flows (DNS, NTP, SSDP) are mostly idle; the WAN flows carry the
// device's service traffic.
constexpr ProfileRow kProfiles[] = {
    {"smart_speaker", {0.6, 0.6, 0.2, 0.2, 0, 3, 180, 150}, 0.3, 0.10, {1, 1, 1, 1, 1, 2, 3, 3}, {64, 1200}, {64, 600}},
    {"motion_sensor", {0.3, 0.3, 0, 0.1, 1.5, 1, 40, 35}, 0.2, 0.35, {3, 3, 1, 1, 6, 3, 5, 8}, {64, 400}, {64, 300}},
    {"smart_plug", {0.4, 0.4, 0.2, 0.2, 0.8, 1.5, 25, 20}, 0.3, 0.10, {1, 1, 1, 1, 1, 1, 2, 2}, {64, 400}, {64, 300}},
    {"media_streamer", {2, 2, 0.2, 0.2, 3, 15, 900, 500}, 0.4, 0.20, {2, 2, 1, 1, 2, 2, 3, 2}, {600, 1518}, {64, 400}},
    {"light_bulb", {0.2, 0.2, 0, 0, 0, 0.5, 8, 8}, 0.1, 0.0, {1, 1, 1, 1, 1, 1, 1, 1}, {64, 200}, {64, 200}},
    {"color_bulb", {0.3, 0.3, 0.1, 0.1, 0.5, 3, 12, 12}, 0.4, 0.10, {1, 1, 1, 1, 2, 2, 2, 2}, {64, 300}, {64, 300}},
    {"indoor_camera", {1, 1, 0.2, 0.2, 0, 0.5, 600, 1500}, 0.2, 0.10, {1, 1, 1, 1, 1, 1, 2, 2}, {64, 300}, {600, 1518}},
    {"security_camera", {0.5, 0.5, 0.2, 0.2, 0.8, 0.3, 300, 2500}, 0.2, 0.05, {1, 1, 1, 1, 1, 1, 2, 2}, {64, 200}, {900, 1518}},
    {"power_switch", {0.5, 0.5, 0.2, 0.2, 0, 1.2, 30, 28}, 0.3, 0.10, {1, 1, 1, 1, 1, 1, 3, 3}, {64, 500}, {64, 300}},
};

// Frame size ranges of the non-WAN flows, same order as ProfileRow::base.
constexpr std::int64_t kFlowSizes[6][2] = {{120, 120}, {74, 74}, {90, 90}, {90, 90}, {350, 350}, {64, 600}};

}  // namespace

BenignTraceModel BenignTraceModel::iot_default() {
  BenignTraceModel model;
  model.schema = FeatureSchema::iot_default();
  for (const auto& row : kProfiles) {
    ClassTraffic cls{row.name, {}, row.burst_probability, true};
    for (int f = 0; f < 8; ++f) {
      FlowTraffic flow;
      flow.base_packets = row.base[f];
      flow.jitter = row.jitter;
      flow.burst_factor = row.burst_factor[f];
      const double peak = row.burst_probability > 0 ? row.burst_factor[f] : 1.0;
      flow.max_packets = static_cast<std::int64_t>(std::ceil(row.base[f] * (1.0 + row.jitter) * peak));
      if (f < 6) {
        flow.frame_min = kFlowSizes[f][0];
        flow.frame_max = kFlowSizes[f][1];
      } else {
        const auto& size = f == 6 ? row.wan_in_size : row.wan_out_size;
        flow.frame_min = size[0];
        flow.frame_max = size[1];
      }
      cls.flows.push_back(flow);
    }
    model.classes.push_back(std::move(cls));
  }
  return model;
}

const ClassTraffic& BenignTraceModel::find(std::string_view name) const {
  for (const auto& c : classes) {
    if (c.name == name) return c;
  }
  throw SchemaError("trace model has no class '" + std::string(name) + "'");
}

std::int64_t BenignTraceModel::configured_max(std::string_view cls, std::size_t feature) const {
  const auto pair = schema.pair_of(feature);
  if (!pair) throw SchemaError("feature '" + schema.feature(feature).name + "' is not part of a flow");
  const auto& flow = find(cls).flows.at(*pair);
  return schema.flow_pairs()[*pair].pkt == feature ? flow.max_packets : flow.max_packets * flow.frame_max;
}

void BenignTraceModel::validate() const {
  if (window_seconds < 1) throw SchemaError("window must be at least one second");
  for (const auto& c : classes) {
    if (c.flows.size() != schema.flow_pairs().size()) {
      throw SchemaError("class '" + c.name + "' must describe every flow of the schema");
    }
    for (const auto& f : c.flows) {
      if (f.base_packets < 0 || f.jitter < 0 || f.jitter > 1 || f.max_packets < 0 || f.burst_factor < 1 ||
          c.burst_probability < 0 || c.burst_probability > 1) {
        throw SchemaError("class '" + c.name + "' has an invalid flow profile");
      }
      if (f.frame_min < schema.frame_min() || f.frame_max > schema.frame_max() || f.frame_min > f.frame_max) {
        throw SchemaError("class '" + c.name + "' has frame sizes outside the schema bounds");
      }
    }
  }
}

std::vector<TelemetryEpoch> generate_benign_trace(const BenignTraceModel& model, std::string_view cls,
                                                  std::size_t n_epochs, std::uint64_t seed) {
  model.validate();
  const auto& traffic = model.find(cls);
  const auto class_index = static_cast<std::uint64_t>(&traffic - model.classes.data());
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(class_index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto window = model.window_seconds;
  const auto& pairs = model.schema.flow_pairs();

  std::vector<TelemetryEpoch> trace;
  trace.reserve(n_epochs);
  for (std::size_t e = 0; e < n_epochs; ++e) {
    TelemetryEpoch epoch{std::string(cls), static_cast<std::int64_t>(e) * window, window,
                         FeatureVector(model.schema.size(), 0),
                         std::vector<FeatureVector>(window, FeatureVector(model.schema.size(), 0))};
    // One event per burst window, concentrated into 10..30 seconds.
    const bool burst = unit(rng) < traffic.burst_probability;
    const std::int64_t burst_span = std::min<std::int64_t>(window, 10 + static_cast<std::int64_t>(unit(rng) * 21));
    const auto burst_first = static_cast<std::int64_t>(unit(rng) * static_cast<double>(window - burst_span + 1));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& flow = traffic.flows[p];
      double volume = flow.base_packets * (1.0 + flow.jitter * (2.0 * unit(rng) - 1.0));
      const bool bursty = burst && flow.burst_factor > 1.0;
      if (bursty) volume *= flow.burst_factor;
      auto packets = static_cast<std::int64_t>(std::floor(volume));
      if (unit(rng) < volume - std::floor(volume)) ++packets;
      packets = std::clamp<std::int64_t>(packets, 0, flow.max_packets);

      const std::int64_t first = bursty ? burst_first : 0;
      const std::int64_t span = bursty ? burst_span : window;
      std::uniform_int_distribution<std::int64_t> second(first, first + span - 1);
      std::uniform_int_distribution<std::int64_t> size(flow.frame_min, flow.frame_max);
      for (std::int64_t k = 0; k < packets; ++k) {
        auto& slot = epoch.per_second[second(rng)];
        const auto bytes = size(rng);
        ++slot[pairs[p].pkt];
        slot[pairs[p].byte] += bytes;
        ++epoch.counts[pairs[p].pkt];
        epoch.counts[pairs[p].byte] += bytes;
      }
    }
    trace.push_back(std::move(epoch));
  }
  return trace;
}

Dataset generate_dataset(const BenignTraceModel& model, std::size_t epochs_per_class, std::uint64_t seed) {
  Dataset data;
  data.schema = model.schema;
  for (const auto& c : model.classes) {
    const auto label = data.intern_class(c.name);
    for (auto& epoch : generate_benign_trace(model, c.name, epochs_per_class, seed)) {
      data.add(std::move(epoch.counts), label);
    }
  }
  return data;
}

}  // namespace treeaudit
