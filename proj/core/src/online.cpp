#include "treeaudit/online.hpp"

#include <algorithm>
#include <random>

#include "treeaudit/errors.hpp"

namespace treeaudit {

namespace {

struct SpoofRow {
  std::string_view flow;
  SpoofFields fields;
};

constexpr SpoofRow kSpoofTable[] = {
    {"dns_in", {"GW", "VIC", "*", "VIC", "53", "*"}},
    {"dns_out", {"VIC", "GW", "VIC", "*", "*", "53"}},
    {"ntp_in", {"GW", "VIC", "*", "VIC", "123", "*"}},
    {"ntp_out", {"VIC", "GW", "VIC", "*", "*", "123"}},
    {"ssdp_out", {"VIC", "*", "VIC", "*", "*", "1900"}},
    {"lan_in", {"*", "VIC", "LAN IP", "VIC", "*", "*"}},
    {"wan_in", {"GW", "VIC", "WAN IP", "VIC", "*", "*"}},
    {"wan_out", {"VIC", "GW", "VIC", "WAN IP", "*", "*"}},
};

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

struct PairInjection {
  std::int64_t packets = 0;
  std::int64_t bytes = 0;
  std::int64_t frame_size = 0;
};

std::optional<PairInjection> mixed_size_injection(const Interval& pkt, const Interval& byte, std::int64_t frame_min,
                                                  std::int64_t frame_max, std::int64_t base_p, std::int64_t base_b,
                                                  std::int64_t p_cap) {
  const CountRange p = pkt.counts();
  const CountRange b = byte.counts();
  if (p.empty() || b.empty()) return std::nullopt;
  if (p.contains(base_p) && b.contains(base_b)) return PairInjection{};
  const std::int64_t need_lo = b.lo - base_b;
  std::int64_t from = std::max<std::int64_t>({1, p.lo - base_p, ceil_div(need_lo, frame_max)});
  std::int64_t to = p_cap;
  if (p.hi != kUnboundedCount) to = std::min(to, p.hi - base_p);
  if (b.hi != kUnboundedCount) {
    if (b.hi < base_b) return std::nullopt;
    to = std::min(to, (b.hi - base_b) / frame_min);
  }
  if (from > to) return std::nullopt;
  // Any k in [from, to] admits bytes in [max(k*frame_min, need_lo), min(k*frame_max, need_hi)].
  return PairInjection{from, std::max(from * frame_min, need_lo), 0};
}

}  // namespace

std::optional<SpoofFields> spoof_fields(std::string_view flow) {
  for (const auto& row : kSpoofTable) {
    if (row.flow == flow) return row.fields;
  }
  return std::nullopt;
}

std::int64_t InjectionPlan::overhead_packets(const FeatureSchema& schema) const {
  std::int64_t total = 0;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (schema.feature(f).unit == Unit::kPkt) total += overhead[f];
  }
  return total;
}

std::int64_t InjectionPlan::overhead_bytes(const FeatureSchema& schema) const {
  std::int64_t total = 0;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (schema.feature(f).unit == Unit::kByte) total += overhead[f];
  }
  return total;
}

std::optional<InjectionPlan> plan_injection(const RecipeBox& recipe, FeatureView base, const FeatureSchema& schema,
                                            const InjectionOptions& options) {
  schema.validate(base);
  InjectionPlan plan;
  plan.overhead.assign(schema.size(), 0);
  std::vector<bool> done(schema.size(), false);
  const auto& pairs = schema.flow_pairs();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& pair = pairs[p];
    const auto& pkt = recipe.intervals[pair.pkt];
    const auto& byte = recipe.intervals[pair.byte];
    std::optional<PairInjection> inj;
    if (options.realization == ByteRealization::kEqualSize) {
      if (auto r = smallest_equal_size(pkt, byte, schema.frame_min(), schema.frame_max(), base[pair.pkt],
                                       base[pair.byte], options.p_cap)) {
        inj = PairInjection{r->packets, r->bytes(), r->frame_size};
      }
    } else {
      inj = mixed_size_injection(pkt, byte, schema.frame_min(), schema.frame_max(), base[pair.pkt], base[pair.byte],
                                 options.p_cap);
    }
    if (!inj) return std::nullopt;
    plan.overhead[pair.pkt] = inj->packets;
    plan.overhead[pair.byte] = inj->bytes;
    done[pair.pkt] = done[pair.byte] = true;
    if (inj->packets > 0) {
      plan.flows.push_back({p, inj->packets, inj->bytes, inj->frame_size});
      auto spoof = spoof_fields(pair.flow);
      if (spoof && spoof->src_mac == "VIC") plan.corrective_icmp = true;
    }
  }
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (done[f]) continue;
    const auto range = recipe.intervals[f].counts();
    if (range.empty() || base[f] > range.hi) return std::nullopt;
    plan.overhead[f] = std::max<std::int64_t>(0, range.lo - base[f]);
  }
  return plan;
}

std::vector<std::size_t> feasible_recipes(std::span<const RecipeBox> recipes, FeatureView current,
                                          FeatureView attack_delta, const FeatureSchema& schema,
                                          const InjectionOptions& options) {
  FeatureVector base(current.begin(), current.end());
  for (std::size_t f = 0; f < base.size(); ++f) base[f] += attack_delta[f];
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < recipes.size(); ++i) {
    if (plan_injection(recipes[i], base, schema, options)) out.push_back(i);
  }
  return out;
}

std::optional<ClosestChoice> select_closest(std::span<const RecipeBox> recipes, std::span<const std::size_t> candidates,
                                            FeatureView current, FeatureView attack_delta, const FeatureSchema& schema,
                                            const InjectionOptions& options) {
  schema.validate(current);
  schema.validate(attack_delta);
  FeatureVector base(current.begin(), current.end());
  for (std::size_t f = 0; f < base.size(); ++f) base[f] += attack_delta[f];
  std::optional<ClosestChoice> best;
  std::int64_t best_pkts = 0;
  std::int64_t best_bytes = 0;
  for (std::size_t i : candidates) {
    auto plan = plan_injection(recipes[i], base, schema, options);
    if (!plan) continue;
    const auto pkts = plan->overhead_packets(schema);
    const auto bytes = plan->overhead_bytes(schema);
    if (best && (pkts > best_pkts || (pkts == best_pkts && bytes >= best_bytes))) continue;
    FeatureVector final_instance = base;
    for (std::size_t f = 0; f < base.size(); ++f) final_instance[f] += plan->overhead[f];
    best = ClosestChoice{i, std::move(final_instance), std::move(*plan)};
    best_pkts = pkts;
    best_bytes = bytes;
  }
  return best;
}

std::string_view to_string(EpochMode mode) {
  switch (mode) {
    case EpochMode::kBenign:
      return "benign";
    case EpochMode::kAdversarial:
      return "adversarial";
    case EpochMode::kNonAdversarial:
      return "non_adversarial";
  }
  return "unknown";
}

std::vector<EpochMode> make_schedule(std::size_t n_epochs, EpochMode mode, std::span<const std::size_t> attack_epochs) {
  std::vector<EpochMode> schedule(n_epochs, EpochMode::kBenign);
  for (auto e : attack_epochs) {
    if (e < n_epochs) schedule[e] = mode;
  }
  return schedule;
}

std::vector<EpochMode> staged_schedule(std::size_t benign, std::size_t adversarial, std::size_t non_adversarial) {
  std::vector<EpochMode> schedule(benign, EpochMode::kBenign);
  schedule.insert(schedule.end(), adversarial, EpochMode::kAdversarial);
  schedule.insert(schedule.end(), non_adversarial, EpochMode::kNonAdversarial);
  return schedule;
}

std::int64_t EpisodeResult::attack_packets_sent() const {
  std::int64_t total = 0;
  for (const auto& w : windows) total += w.attack_packets_sent;
  return total;
}

std::int64_t EpisodeResult::overhead_packets_sent() const {
  std::int64_t total = 0;
  for (const auto& w : windows) total += w.overhead_packets_sent;
  return total;
}

namespace {

// Spreads injected packets over one attacker window and adds them to the
// epoch they land in.
class Emitter {
 public:
  Emitter(const FeatureSchema& schema, std::vector<FeatureVector>& epochs, std::int64_t window, std::uint64_t seed)
      : schema_(schema), epochs_(epochs), window_(window), rng_(seed) {}

  // `packets` frames totalling `bytes` on `pair`; returns landed packets per epoch.
  void emit(std::int64_t start, std::size_t pair, std::int64_t packets, std::int64_t bytes,
            std::vector<std::int64_t>* landed) {
    if (packets <= 0) return;
    const auto& fp = schema_.flow_pairs()[pair];
    const std::int64_t small = bytes / packets;
    const std::int64_t larger = bytes % packets;
    std::uniform_int_distribution<std::int64_t> offset(0, window_ - 1);
    for (std::int64_t k = 0; k < packets; ++k) {
      const std::int64_t t = start + offset(rng_);
      if (t < 0) continue;
      const auto epoch = static_cast<std::size_t>(t / window_);
      if (epoch >= epochs_.size()) continue;
      ++epochs_[epoch][fp.pkt];
      epochs_[epoch][fp.byte] += small + (k < larger ? 1 : 0);
      if (landed) ++(*landed)[epoch];
    }
  }

  // Count units on a feature that is not part of a flow.
  void emit_units(std::int64_t start, std::size_t feature, std::int64_t units, std::vector<std::int64_t>* landed) {
    std::uniform_int_distribution<std::int64_t> offset(0, window_ - 1);
    for (std::int64_t k = 0; k < units; ++k) {
      const std::int64_t t = start + offset(rng_);
      if (t < 0) continue;
      const auto epoch = static_cast<std::size_t>(t / window_);
      if (epoch >= epochs_.size()) continue;
      ++epochs_[epoch][feature];
      if (landed) ++(*landed)[epoch];
    }
  }

 private:
  const FeatureSchema& schema_;
  std::vector<FeatureVector>& epochs_;
  std::int64_t window_;
  std::mt19937_64 rng_;
};

}  // namespace

EpisodeResult run_episode(const VotingEnsemble& model, const ClassThresholds& thresholds,
                          std::span<const RecipeBox> recipes, std::span<const TelemetryEpoch> trace,
                          const AttackProfile& attack, const EpisodeTiming& timing, std::uint64_t seed,
                          const InjectionOptions& options) {
  const auto& schema = model.schema;
  EpisodeResult result;
  if (trace.empty()) return result;
  const std::int64_t window = trace.front().window_seconds;
  if (timing.shift_seconds < 0 || timing.shift_seconds >= window) {
    throw SchemaError("time shift must lie in [0, window)");
  }
  const std::size_t n = trace.size();
  const FeatureVector delta = attack_delta(attack, schema);

  std::vector<FeatureVector> epochs;
  for (const auto& e : trace) {
    schema.validate(e.counts);
    if (e.window_seconds != window || static_cast<std::int64_t>(e.per_second.size()) != window) {
      throw SchemaError("trace epochs must share one window and carry per-second counts");
    }
    epochs.push_back(e.counts);
  }
  auto observed_over = [&](std::int64_t start) {
    FeatureVector sum(schema.size(), 0);
    for (std::int64_t t = std::max<std::int64_t>(0, start); t < start + window; ++t) {
      const auto e = static_cast<std::size_t>(t / window);
      if (e >= n) break;
      const auto& slot = trace[e].per_second[static_cast<std::size_t>(t % window)];
      for (std::size_t f = 0; f < sum.size(); ++f) sum[f] += slot[f];
    }
    return sum;
  };

  // Reflected packets are the ones leaving the victim; fall back to every
  // affected flow when the profile has no outgoing one.
  std::vector<bool> reflected(attack.flows.size(), false);
  bool any_out = false;
  for (std::size_t i = 0; i < attack.flows.size(); ++i) {
    const auto& pair = schema.flow_pairs()[*schema.flow_index(attack.flows[i].flow)];
    reflected[i] = schema.feature(pair.pkt).direction == Direction::kOut;
    any_out = any_out || reflected[i];
  }
  std::vector<bool> counter_out(attack.counters.size(), false);
  for (std::size_t i = 0; i < attack.counters.size(); ++i) {
    counter_out[i] = schema.feature(*schema.index_of(attack.counters[i])).direction == Direction::kOut;
    any_out = any_out || counter_out[i];
  }
  if (!any_out) {
    std::fill(reflected.begin(), reflected.end(), true);
    std::fill(counter_out.begin(), counter_out.end(), true);
  }

  std::vector<std::int64_t> attack_landed(n, 0);
  std::vector<std::int64_t> overhead_landed(n, 0);
  std::vector<bool> feasible(n, true);
  std::vector<EpochMode> modes(n, EpochMode::kBenign);
  Emitter emitter(schema, epochs, window, seed);
  std::vector<std::size_t> all(recipes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  for (std::size_t j = 0; j < n; ++j) {
    const EpochMode mode = j < timing.schedule.size() ? timing.schedule[j] : EpochMode::kBenign;
    modes[j] = mode;
    const std::int64_t start = static_cast<std::int64_t>(j) * window - timing.shift_seconds;
    WindowPlan plan{j, mode, observed_over(start), std::nullopt, std::nullopt, std::nullopt, 0, 0};
    if (mode == EpochMode::kAdversarial) {
      std::optional<ClosestChoice> choice;
      if (options.injection_supported) {
        choice = select_closest(recipes, all, plan.observed, delta, schema, options);
      }
      if (!choice) {
        feasible[j] = false;
        result.windows.push_back(std::move(plan));
        continue;
      }
      plan.recipe = choice->recipe;
      plan.target_instance = std::move(choice->final_instance);
      for (const auto& flow : choice->plan.flows) {
        emitter.emit(start, flow.pair, flow.packets, flow.bytes, &overhead_landed);
      }
      std::vector<bool> paired(schema.size(), false);
      for (const auto& p : schema.flow_pairs()) paired[p.pkt] = paired[p.byte] = true;
      for (std::size_t f = 0; f < schema.size(); ++f) {
        if (!paired[f]) emitter.emit_units(start, f, choice->plan.overhead[f], &overhead_landed);
      }
      plan.overhead_packets_sent = choice->plan.overhead_packets(schema);
      plan.injection = std::move(choice->plan);
    }
    if (mode != EpochMode::kBenign) {
      for (std::size_t i = 0; i < attack.flows.size(); ++i) {
        const auto& flow = attack.flows[i];
        const auto pair = *schema.flow_index(flow.flow);
        emitter.emit(start, pair, attack.impact, attack.impact * flow.frame_size,
                     reflected[i] ? &attack_landed : nullptr);
        if (reflected[i]) plan.attack_packets_sent += attack.impact;
      }
      for (std::size_t i = 0; i < attack.counters.size(); ++i) {
        emitter.emit_units(start, *schema.index_of(attack.counters[i]), attack.impact,
                           counter_out[i] ? &attack_landed : nullptr);
        if (counter_out[i]) plan.attack_packets_sent += attack.impact;
      }
    }
    result.windows.push_back(std::move(plan));
  }

  for (std::size_t k = 0; k < n; ++k) {
    auto p = predict(model, epochs[k]);
    EpochOutcome out;
    out.epoch = k;
    out.mode = modes[k];
    out.predicted = p.label;
    out.score = p.score;
    out.threshold = thresholds.at(p.label).t;
    out.detected = is_detected(p, thresholds);
    out.attack_packets = attack_landed[k];
    out.overhead_packets = overhead_landed[k];
    out.feasible = feasible[k];
    out.final_counts = std::move(epochs[k]);
    result.outcomes.push_back(std::move(out));
  }
  return result;
}

}  // namespace treeaudit
