#pragma once

#include <optional>
#include <vector>

#include "replan/timetable.h"

namespace replan {

// Where and when a (re)plan starts.
//
// A traveller standing at the origin may board anything departing at or
// after `time_`. A traveller who arrived by vehicle (`on_` set, still on
// board) or who has alighted (`alighted_`) pays the loop transfer time of
// `stop_`, counted from `arrived_`, before boarding another trip. Walking to
// another stop starts at `time_`.
struct source {
  static source at_origin(stop_idx_t const s, timestamp const t) {
    return source{.stop_ = s, .time_ = t, .arrived_ = t};
  }
  static source on_board(connection const& c) {
    return source{.stop_ = c.to_, .time_ = c.arr_, .arrived_ = c.arr_,
                  .on_ = c.idx_};
  }
  static source alighted(stop_idx_t const s, timestamp const arrived,
                         timestamp const now) {
    return source{.stop_ = s, .time_ = now, .arrived_ = arrived,
                  .alighted_ = true};
  }

  bool needs_transfer() const { return on_.valid() || alighted_; }

  friend bool operator==(source const&, source const&) = default;

  stop_idx_t stop_;
  timestamp time_{0};
  timestamp arrived_{0};
  con_idx_t on_{con_idx_t::invalid()};
  bool alighted_{false};
};

struct journey {
  bool empty() const { return connections_.empty(); }
  std::size_t transfers() const;
  timestamp departure() const {
    return connections_.empty() ? from_.time_ : connections_.front().dep_;
  }

  source from_;
  stop_idx_t to_;
  std::vector<connection> connections_;  // times as known when planned
  timestamp arrival_{kInfinity};
};

// Earliest time the traveller described by `src` can board at `s`, or
// nullopt if `s` is not walkable from the source stop.
std::optional<timestamp> ready_time(timetable const&, source const&,
                                    stop_idx_t s);

// True iff the journey is executable under the times reported by `times`:
// same-trip neighbours are contiguous, every transfer walks an existing
// footpath and makes the departure, the first boarding respects the source,
// and the destination is reached (directly or by a final footpath).
// Throws replan::error (invalid_argument) when an id does not resolve.
bool journey_is_valid(journey const&, timetable const&,
                      connection_lookup const& times);

// Same check under the scheduled times of `tt`.
bool journey_is_valid(journey const&, timetable const&);

// Arrival at the destination under the given times (last arrival plus the
// final walk), or kInfinity if the destination is not reachable from the
// last stop.
timestamp arrival_under(journey const&, timetable const&,
                        connection_lookup const& times);

}  // namespace replan
