#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>

namespace replan {

// Seconds since midnight of the service day. Values past 86400 denote
// service after midnight (GTFS convention).
using timestamp = std::int32_t;
using duration = std::int32_t;

constexpr timestamp kInfinity = std::numeric_limits<timestamp>::max();
constexpr duration kUnreachable = std::numeric_limits<duration>::max();

template <typename Tag>
struct strong_idx {
  using value_type = std::uint32_t;

  constexpr strong_idx() = default;
  constexpr explicit strong_idx(value_type const v) : v_{v} {}
  template <typename T>
    requires std::is_integral_v<T>
  constexpr explicit strong_idx(T const v) : v_{static_cast<value_type>(v)} {}

  static constexpr strong_idx invalid() {
    return strong_idx{std::numeric_limits<value_type>::max()};
  }

  constexpr bool valid() const { return *this != invalid(); }
  constexpr value_type v() const { return v_; }

  constexpr auto operator<=>(strong_idx const&) const = default;

  value_type v_{std::numeric_limits<value_type>::max()};
};

struct stop_tag {};
struct trip_tag {};
struct route_tag {};
struct con_tag {};

using stop_idx_t = strong_idx<stop_tag>;
using trip_idx_t = strong_idx<trip_tag>;
using route_idx_t = strong_idx<route_tag>;
using con_idx_t = strong_idx<con_tag>;

// Formats as HH:MM:SS (hours may exceed 23).
std::string format_time(timestamp);

// Accepts H:MM, HH:MM or HH:MM:SS. Throws replan::error on malformed input.
timestamp parse_time(std::string_view);

// 64-bit FNV-1a of a byte string; used for config and feed hashes.
std::uint64_t fnv1a_text(std::string_view);

// 16 lowercase hex digits.
std::string hex(std::uint64_t);

}  // namespace replan

template <typename Tag>
struct std::hash<replan::strong_idx<Tag>> {
  std::size_t operator()(replan::strong_idx<Tag> const i) const noexcept {
    return std::hash<std::uint32_t>{}(i.v_);
  }
};
