#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "replan/types.h"

namespace replan {

// Delay class of a vehicle, derived from the GTFS route_type.
enum class transport_mode : std::uint8_t {
  fully_separated,  // rail, metro
  semi_separated,  // tram
  mixed_traffic,  // bus and everything else
};

constexpr std::size_t kNumModes = 3;

transport_mode mode_from_route_type(int gtfs_route_type);
char const* to_string(transport_mode);

struct connection {
  duration travel_time() const { return arr_ - dep_; }

  friend bool operator==(connection const&, connection const&) = default;

  con_idx_t idx_;
  trip_idx_t trip_;
  stop_idx_t from_;
  stop_idx_t to_;
  timestamp dep_{0};
  timestamp arr_{0};
};

// The total order of every departure-sorted connection array:
// (departure time, trip, position within trip).
inline bool departs_before(connection const& a, connection const& b) {
  if (a.dep_ != b.dep_) {
    return a.dep_ < b.dep_;
  }
  if (a.trip_ != b.trip_) {
    return a.trip_ < b.trip_;
  }
  return a.idx_ < b.idx_;
}

struct footpath {
  friend bool operator==(footpath const&, footpath const&) = default;

  stop_idx_t from_;
  stop_idx_t to_;
  duration duration_{0};
};

struct stop {
  std::string id_;
  std::string name_;
  std::optional<double> lat_;
  std::optional<double> lon_;
};

struct trip {
  std::string id_;
  std::string gtfs_route_id_;
  route_idx_t route_;
  transport_mode mode_{transport_mode::mixed_traffic};
  con_idx_t first_;  // connections occupy [first_, first_ + size_)
  std::uint32_t size_{0};
};

// Anything that can report the (possibly delay-updated) times of a
// connection by index.
class connection_lookup {
public:
  virtual ~connection_lookup() = default;
  virtual connection get(con_idx_t) const = 0;
};

// Immutable schedule. Connections are stored trip-major, so a connection
// index doubles as a stable identifier and trip positions are contiguous.
class timetable final : public connection_lookup {
public:
  std::span<stop const> stops() const { return stops_; }
  std::span<trip const> trips() const { return trips_; }
  std::span<connection const> connections() const { return connections_; }

  // Departure-sorted array C under `departs_before`.
  std::span<connection const> sorted() const { return sorted_; }

  std::span<footpath const> footpaths() const { return footpaths_; }
  std::span<footpath const> footpaths_from(stop_idx_t) const;

  // Walking duration from -> to; nullopt if no footpath exists.
  std::optional<duration> walk(stop_idx_t from, stop_idx_t to) const;

  std::span<connection const> trip_connections(trip_idx_t) const;
  std::uint32_t position(con_idx_t) const;

  connection get(con_idx_t const c) const override {
    return connections_[c.v()];
  }

  std::size_t n_stops() const { return stops_.size(); }
  std::size_t n_trips() const { return trips_.size(); }
  std::size_t n_connections() const { return connections_.size(); }
  std::size_t n_routes() const { return n_routes_; }

  std::optional<stop_idx_t> find_stop(std::string_view id) const;
  std::optional<trip_idx_t> find_trip(std::string_view id) const;

  // Scheduled time of the last arrival over all connections.
  timestamp last_arrival() const { return last_arrival_; }

private:
  friend class timetable_builder;
  friend struct timetable_access;

  void finalize();

  std::vector<stop> stops_;
  std::vector<trip> trips_;
  std::vector<connection> connections_;
  std::vector<connection> sorted_;
  std::vector<footpath> footpaths_;  // sorted by (from, to)
  std::vector<std::uint32_t> footpath_offsets_;  // CSR over from
  std::size_t n_routes_{0};
  timestamp last_arrival_{0};
  std::unordered_map<std::string, stop_idx_t> stop_by_id_;
  std::unordered_map<std::string, trip_idx_t> trip_by_id_;
};

struct stop_time {
  stop_idx_t stop_;
  timestamp arr_;
  timestamp dep_;
};

class timetable_builder {
public:
  stop_idx_t add_stop(std::string id, std::string name = {},
                      std::optional<double> lat = std::nullopt,
                      std::optional<double> lon = std::nullopt);

  // One connection per consecutive pair of stop events.
  trip_idx_t add_trip(std::string id, std::span<stop_time const> events,
                      transport_mode = transport_mode::mixed_traffic,
                      std::string gtfs_route_id = {});

  // Explicit connection list; used to model malformed trips.
  struct raw_connection {
    stop_idx_t from_;
    timestamp dep_;
    stop_idx_t to_;
    timestamp arr_;
  };
  trip_idx_t add_trip_connections(std::string id,
                                  std::span<raw_connection const>,
                                  transport_mode = transport_mode::mixed_traffic,
                                  std::string gtfs_route_id = {});

  // Parallel footpaths between the same pair keep the minimum duration.
  void add_footpath(stop_idx_t from, stop_idx_t to, duration);
  void add_footpaths(std::span<footpath const>);

  std::size_t n_stops() const { return tt_.stops_.size(); }

  // Groups routes, sorts C and indexes footpaths. Does not validate.
  timetable build() &&;

private:
  timetable tt_;
  std::vector<std::vector<timetable_builder::raw_connection>> trip_cons_;
};

// Route assignment: two sequences share a route iff they are identical.
// Route ids follow the lexicographic order of the distinct sequences.
std::vector<route_idx_t> group_routes(
    std::span<std::vector<stop_idx_t> const> stop_sequences);

enum class violation_kind {
  unknown_stop,
  connection_same_stop,
  connection_time_order,
  trip_connection_mismatch,
  trip_chain,
  trip_time_consistency,
  footpath_negative,
  missing_loop,
  footpath_transitive_closure,
  footpath_triangle_inequality,
  sorted_order,
  sorted_coverage,
};

char const* to_string(violation_kind);

struct violation {
  violation_kind kind_;
  std::uint32_t entity_;  // index of the offending stop/trip/connection
  std::string message_;
};

struct validation_report {
  bool ok() const { return violations_.empty(); }
  std::size_t count(violation_kind) const;

  std::vector<violation> violations_;
};

validation_report validate(timetable const&);

}  // namespace replan
