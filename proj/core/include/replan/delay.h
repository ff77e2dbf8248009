#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "replan/error.h"
#include "replan/timetable.h"

namespace replan {

// At time `time_` trip `trip_` is `delay_` seconds behind schedule. The delay
// holds for every connection of the trip scheduled to depart at or after
// `time_` until a later event on the same trip supersedes it.
struct delay_event {
  friend bool operator==(delay_event const&, delay_event const&) = default;

  trip_idx_t trip_;
  timestamp time_{0};
  duration delay_{0};
};

// Events ordered by (time, trip). An event becomes known at its own time.
class delay_feed {
public:
  delay_feed() = default;
  explicit delay_feed(std::vector<delay_event>);

  std::span<delay_event const> realized() const { return events_; }

  // Prefix of events with time <= t.
  std::span<delay_event const> known_at(timestamp t) const;

  bool empty() const { return events_.empty(); }
  std::size_t size() const { return events_.size(); }

private:
  std::vector<delay_event> events_;
};

// Throws error_kind::validation for unknown trips, negative delays, events
// outside the trip's scheduled timeframe or non-increasing event times per
// trip.
void check_feed(timetable const&, delay_feed const&);

// TB_curr: the timetable with a set of delay events applied. Only delayed
// trips are stored; every other connection reports its scheduled times.
class delayed_view final : public connection_lookup {
public:
  explicit delayed_view(timetable const&);

  timetable const& tt() const { return *tt_; }

  // Adds events (in feed order) and recomputes the affected trips. Returns
  // those trips, deduplicated, in first-seen order.
  std::vector<trip_idx_t> add(std::span<delay_event const>);

  connection get(con_idx_t) const override;

  // Updated connections of one trip (trip-major order).
  std::span<connection const> trip_connections(trip_idx_t) const;

  bool is_delayed(trip_idx_t) const;
  std::span<trip_idx_t const> delayed_trips() const { return delayed_; }

private:
  void recompute(trip_idx_t);

  timetable const* tt_;
  std::vector<std::uint32_t> slot_;  // trip -> index into delayed_
  std::vector<trip_idx_t> delayed_;
  std::vector<std::vector<delay_event>> events_;  // per delayed trip
  std::vector<std::vector<connection>> times_;  // per delayed trip
};

// Updated times of one trip under its events (sorted by time). For each
// connection the governing event is the latest one with time <= the
// scheduled departure. Departures never precede the previous arrival, and
// travel times are kept.
void delayed_trip_times(std::span<connection const> scheduled,
                        std::span<delay_event const> trip_events,
                        std::vector<connection>& out);

delayed_view apply_delays(timetable const&, std::span<delay_event const>);
delayed_view apply_delays(timetable const&, delay_feed const&,
                          timestamp now);

// Departure-sorted connection array under the view's times: the base sorted
// array with the delayed trips' connections removed, merged with those
// connections re-sorted.
std::vector<connection> sorted_connections_updated(delayed_view const&);

// Line format "trip_id,tau_delta_seconds,delta_seconds", sorted by time. An
// optional "# timetable <fingerprint>" comment ties a feed to its timetable.
void write_feed(std::filesystem::path const&, timetable const&,
                delay_feed const&);
struct feed_file {
  delay_feed feed_;
  std::optional<std::uint64_t> timetable_fingerprint_;
};
// Hash over the events in feed-file form; independent of file comments.
std::uint64_t fingerprint(delay_feed const&, timetable const&);

feed_file read_feed(std::filesystem::path const&, timetable const&);
feed_file parse_feed(std::string_view content, timetable const&,
                     std::string const& name = "feed");

// --- sampler ---

enum class period : std::uint8_t { off_peak, peak };

struct time_window {
  timestamp from_;
  timestamp to_;  // exclusive
};

struct peak_profile {
  std::vector<time_window> windows_;
};

// Hours whose departure counts exceed `threshold` x the mean hourly count
// (over hours 0 .. last departure hour), contiguous hours merged.
peak_profile peak_profile_from_timetable(timetable const&,
                                         double threshold = 1.25);

period classify_period(timestamp, peak_profile const&);

struct delay_params {
  // Mean delay in seconds per mode (fully, semi, mixed) and period.
  std::array<std::array<double, 2>, kNumModes> mean_s_{{
      {120.0, 120.0},
      {180.0, 420.0},
      {300.0, 600.0},
  }};
  duration min_delay_{30};
  double peak_threshold_{1.25};
  std::optional<peak_profile> peak_windows_;  // overrides the threshold rule
};

// One draw from Exp(1/mean), in seconds. Throws error_kind::config if
// mean <= 0.
template <typename Rng>
double draw_exponential(Rng& rng, double const mean) {
  if (!(mean > 0.0)) {
    throw error{error_kind::config, "mean delay must be positive"};
  }
  return std::exponential_distribution<double>{1.0 / mean}(rng);
}

delay_feed sample_delays(timetable const&, delay_params const&,
                         std::uint64_t seed);

}  // namespace replan
