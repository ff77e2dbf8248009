#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "replan/delay.h"
#include "replan/tig.h"
#include "replan/timetable.h"

namespace replan {

struct envelope_update;

// Query-specific subset of connections that can be part of a journey from
// from_ (departing at or after tq_) to to_ arriving by td_. Member times are
// the delay-updated times current when the envelope was built or updated.
class envelope {
public:
  envelope() = default;

  stop_idx_t from() const { return from_; }
  stop_idx_t to() const { return to_; }
  timestamp tq() const { return tq_; }
  timestamp td() const { return td_; }

  std::size_t size() const { return by_idx_.size(); }
  bool empty() const { return by_idx_.empty(); }

  // Members ordered by `departs_before` (the CSA input).
  std::span<connection const> sorted() const { return sorted_; }

  bool contains(con_idx_t) const;

  // Conditions (a)-(c) for a connection under its given times.
  bool qualifies(connection const&) const;

  // Lower-bound durations from `from()` / to `to()`; kUnreachable beyond
  // the budget td - tq.
  duration forward(stop_idx_t s) const { return fwd_[s.v()]; }
  duration backward(stop_idx_t s) const { return bwd_[s.v()]; }

  // Footpaths whose endpoints both lie on member connections or are the
  // query's endpoints.
  std::vector<footpath> footpaths(timetable const&) const;

private:
  friend envelope build_envelope(std::span<connection const>,
                                 time_independent_graph const&,
                                 duration_search&, stop_idx_t, stop_idx_t,
                                 timestamp, timestamp);
  friend envelope_update update_envelope(envelope&, delayed_view const&,
                                                std::span<trip_idx_t const>);

  void resort();

  stop_idx_t from_;
  stop_idx_t to_;
  timestamp tq_{0};
  timestamp td_{0};
  std::vector<duration> fwd_;
  std::vector<duration> bwd_;
  std::vector<connection> by_idx_;  // sorted by connection index
  std::vector<connection> sorted_;
};

// Builds the envelope from a departure-sorted array carrying the current
// times. Throws error_kind::invalid_argument if td < tq.
envelope build_envelope(std::span<connection const> sorted,
                        time_independent_graph const&, duration_search&,
                        stop_idx_t from, stop_idx_t to, timestamp tq,
                        timestamp td);

struct envelope_update {
  bool changed() const { return !records_.empty(); }

  std::size_t retimed_{0};
  std::size_t added_{0};
  std::vector<connection> records_;  // retimed and added connections
};

// Re-evaluates every connection of `trips` under the view's times: members
// are retimed, non-members that now satisfy the conditions are added.
envelope_update update_envelope(envelope&, delayed_view const&,
                                std::span<trip_idx_t const> trips);

// Wire encoding (little-endian). Header: 4-byte magic ("ENV1" for a full
// envelope, "ENVU" for an update), from, to (u32), tq, td (i32), record
// count (u32). Record: connection index (u32), trip (u32), dep, arr (i32).
constexpr std::size_t kEnvelopeHeaderBytes = 24U;
constexpr std::size_t kEnvelopeRecordBytes = 16U;

std::vector<std::uint8_t> encode_envelope(envelope const&);
std::vector<std::uint8_t> encode_update(envelope const&,
                                        envelope_update const&);

struct envelope_message {
  bool update_{false};
  stop_idx_t from_;
  stop_idx_t to_;
  timestamp tq_{0};
  timestamp td_{0};
  std::vector<connection> records_;  // stops resolved through the timetable
};

envelope_message decode_envelope_message(std::span<std::uint8_t const>,
                                         timetable const&);

}  // namespace replan
