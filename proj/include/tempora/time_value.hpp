#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace tempora {

using VertexId = std::uint32_t;

// The largest vertex id is reserved as a probe sentinel so block lookups of
// the form pred((l, +inf), B) can be phrased as a non-strict predecessor.
inline constexpr VertexId kProbeVertex = static_cast<VertexId>(-1);

// Finite time stamps are restricted to a symmetric range so that negation
// and +/-1 neighbour probes can never overflow.
inline constexpr std::int64_t kMaxFiniteTime = std::int64_t{1} << 62;
inline constexpr std::int64_t kMinFiniteTime = -kMaxFiniteTime;

// A time stamp extended with two sentinels, ordered -inf < finite < +inf.
// Negation is an involution that swaps the sentinels.
class TimeValue {
 public:
  constexpr TimeValue() : tag_(0), value_(0) {}

  static constexpr TimeValue finite(std::int64_t v) {
    TimeValue t;
    t.tag_ = 0;
    t.value_ = v;
    return t;
  }
  static constexpr TimeValue neg_inf() {
    TimeValue t;
    t.tag_ = -1;
    return t;
  }
  static constexpr TimeValue pos_inf() {
    TimeValue t;
    t.tag_ = 1;
    return t;
  }

  constexpr bool is_finite() const { return tag_ == 0; }
  constexpr bool is_neg_inf() const { return tag_ < 0; }
  constexpr bool is_pos_inf() const { return tag_ > 0; }

  constexpr std::int64_t value() const {
    if (!is_finite()) throw std::logic_error("TimeValue: value() on infinity");
    return value_;
  }

  constexpr TimeValue operator-() const {
    if (tag_ != 0) {
      return tag_ < 0 ? pos_inf() : neg_inf();
    }
    return finite(-value_);
  }

  friend constexpr bool operator==(const TimeValue& a, const TimeValue& b) {
    if (a.tag_ != b.tag_) return false;
    return a.tag_ != 0 || a.value_ == b.value_;
  }
  friend constexpr std::strong_ordering operator<=>(const TimeValue& a,
                                                    const TimeValue& b) {
    if (a.tag_ != b.tag_) return a.tag_ <=> b.tag_;
    if (a.tag_ != 0) return std::strong_ordering::equal;
    return a.value_ <=> b.value_;
  }

  std::string str() const {
    if (is_neg_inf()) return "-inf";
    if (is_pos_inf()) return "+inf";
    return std::to_string(value_);
  }

 private:
  std::int8_t tag_;  // -1, 0, +1
  std::int64_t value_;
};

// One label on an edge: departure at the lower endpoint, arrival at the
// upper endpoint.  arrival >= departure always holds; in the latency-free
// setting the two coincide.
struct TemporalLabel {
  std::int64_t departure = 0;
  std::int64_t arrival = 0;

  constexpr TemporalLabel() = default;
  constexpr TemporalLabel(std::int64_t dep, std::int64_t arr)
      : departure(dep), arrival(arr) {}
  static constexpr TemporalLabel plain(std::int64_t t) { return {t, t}; }

  constexpr bool is_plain() const { return departure == arrival; }
  // Traversing the edge in the opposite direction of a negated instance.
  constexpr TemporalLabel mirrored() const { return {-arrival, -departure}; }

  friend constexpr bool operator==(const TemporalLabel&,
                                   const TemporalLabel&) = default;
  friend constexpr auto operator<=>(const TemporalLabel& a,
                                    const TemporalLabel& b) {
    if (auto c = a.departure <=> b.departure; c != 0) return c;
    return a.arrival <=> b.arrival;
  }
};

inline void check_label_range(std::int64_t v, const char* what) {
  if (v < kMinFiniteTime || v > kMaxFiniteTime) {
    throw std::invalid_argument(std::string(what) + ": time out of range");
  }
}

inline void check_label(const TemporalLabel& l, const char* what) {
  check_label_range(l.departure, what);
  check_label_range(l.arrival, what);
  if (l.arrival < l.departure) {
    throw std::invalid_argument(std::string(what) +
                                ": arrival precedes departure");
  }
}

}  // namespace tempora

template <>
struct std::hash<tempora::TemporalLabel> {
  std::size_t operator()(const tempora::TemporalLabel& l) const noexcept {
    std::uint64_t x = static_cast<std::uint64_t>(l.departure) * 0x9e3779b97f4a7c15ull;
    x ^= static_cast<std::uint64_t>(l.arrival) + 0x9e3779b97f4a7c15ull + (x << 6) + (x >> 2);
    return static_cast<std::size_t>(x);
  }
};
