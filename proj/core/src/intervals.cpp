#include "treeaudit/intervals.hpp"

#include <algorithm>
#include <cmath>

namespace treeaudit {

namespace {

// Doubles at or beyond this are treated as unbounded counts.
constexpr double kCountCeiling = 9.0e18;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

}  // namespace

CountRange Interval::counts() const noexcept {
  CountRange r;
  if (std::isnan(lo) || std::isnan(hi)) return {1, 0};
  if (lo >= kCountCeiling) return {1, 0};
  r.lo = lo < 0.0 ? 0 : static_cast<std::int64_t>(std::floor(lo)) + 1;
  if (hi < 0.0) {
    r.hi = -1;
  } else if (hi < kCountCeiling) {
    r.hi = static_cast<std::int64_t>(std::floor(hi));
  }
  return r;
}

std::optional<Interval> merge(const Interval& a, const Interval& b) {
  Interval m{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (!m.consistent()) return std::nullopt;
  return m;
}

bool pair_frame_size_consistent(const Interval& pkt, const Interval& byte, std::int64_t frame_min,
                                std::int64_t frame_max) {
  const CountRange p = pkt.counts();
  const CountRange b = byte.counts();
  if (p.empty() || b.empty()) return false;
  if (p.lo == 0 && b.lo == 0) return true;
  std::int64_t from = std::max<std::int64_t>({p.lo, 1, ceil_div(b.lo, frame_max)});
  std::int64_t to = p.hi;
  if (b.hi != kUnboundedCount) to = std::min(to, b.hi / frame_min);
  return from <= to;
}

std::optional<EqualSizeRealization> smallest_equal_size(const Interval& pkt, const Interval& byte,
                                                         std::int64_t frame_min, std::int64_t frame_max,
                                                         std::int64_t base_packets, std::int64_t base_bytes,
                                                         std::int64_t p_cap) {
  const CountRange p = pkt.counts();
  const CountRange b = byte.counts();
  if (p.empty() || b.empty()) return std::nullopt;
  if (p.contains(base_packets) && b.contains(base_bytes)) return EqualSizeRealization{};

  // Added packets k and bytes k*s must satisfy
  //   p.lo <= base_packets + k <= p.hi,  b.lo <= base_bytes + k*s <= b.hi.
  const std::int64_t need_lo = b.lo - base_bytes;
  std::int64_t from = std::max<std::int64_t>({1, p.lo - base_packets, ceil_div(need_lo, frame_max)});
  std::int64_t to = p_cap;
  if (p.hi != kUnboundedCount) to = std::min(to, p.hi - base_packets);
  std::int64_t need_hi = kUnboundedCount;
  if (b.hi != kUnboundedCount) {
    need_hi = b.hi - base_bytes;
    if (need_hi < 0) return std::nullopt;
    to = std::min(to, need_hi / frame_min);
  }
  for (std::int64_t k = from; k <= to; ++k) {
    const std::int64_t s_lo = std::max(frame_min, ceil_div(need_lo, k));
    const std::int64_t s_hi = need_hi == kUnboundedCount ? frame_max : std::min(frame_max, floor_div(need_hi, k));
    if (s_lo <= s_hi) return EqualSizeRealization{k, s_lo};
  }
  return std::nullopt;
}

bool pair_boundary_consistent(const Interval& pkt, const Interval& byte, std::int64_t frame_min,
                              std::int64_t frame_max, std::int64_t p_cap) {
  return smallest_equal_size(pkt, byte, frame_min, frame_max, 0, 0, p_cap).has_value();
}

bool single_feature_consistent(const RecipeBox& box) {
  return std::all_of(box.intervals.begin(), box.intervals.end(),
                     [](const Interval& i) { return i.consistent(); });
}

bool frame_size_consistent(const RecipeBox& box, const FeatureSchema& schema) {
  for (const auto& pair : schema.flow_pairs()) {
    if (!pair_frame_size_consistent(box.intervals[pair.pkt], box.intervals[pair.byte], schema.frame_min(),
                                    schema.frame_max())) {
      return false;
    }
  }
  return true;
}

bool boundary_consistent(const RecipeBox& box, const FeatureSchema& schema, std::int64_t p_cap) {
  for (const auto& pair : schema.flow_pairs()) {
    if (!pair_boundary_consistent(box.intervals[pair.pkt], box.intervals[pair.byte], schema.frame_min(),
                                  schema.frame_max(), p_cap)) {
      return false;
    }
  }
  return true;
}

bool fully_consistent(const RecipeBox& box, const FeatureSchema& schema, std::int64_t p_cap) {
  return single_feature_consistent(box) && frame_size_consistent(box, schema) &&
         boundary_consistent(box, schema, p_cap);
}

bool admits(const RecipeBox& box, FeatureView x) {
  if (x.size() != box.intervals.size()) return false;
  for (std::size_t f = 0; f < x.size(); ++f) {
    if (!box.intervals[f].contains(x[f])) return false;
  }
  return true;
}

}  // namespace treeaudit
