#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "replan/journey.h"
#include "replan/timetable.h"

namespace replan {

struct csa_result {
  bool reachable() const { return arrival_ != kInfinity; }

  timestamp arrival_{kInfinity};
  std::optional<journey> journey_;
  std::size_t scanned_{0};  // connections inspected by the scan loop
};

// Connection Scan Algorithm with per-trip boarded flags and journey
// pointers. Holds query-stamped scratch labels, so one instance serves many
// queries without reallocation. Not thread-safe; use one per worker.
class csa_solver {
public:
  explicit csa_solver(timetable const&);

  // `sorted` must be ordered by `departs_before` under the times it carries
  // (the full timetable, a delay-updated copy, or an envelope). Footpaths
  // always come from the timetable.
  //
  // With an invalid `target`, computes one-to-all labels without early
  // termination. Throws error_kind::invalid_argument for bad stop ids.
  csa_result solve(std::span<connection const> sorted, source const&,
                   stop_idx_t target, bool extract = true);

  // Earliest arrival at `s` from the last solve (kInfinity if unreached).
  // Exact for every stop only when the last solve ran without a target.
  timestamp arrival(stop_idx_t s) const;

private:
  struct label {
    timestamp ready_;  // earliest time a vehicle can be boarded here
    timestamp best_;  // earliest arrival (by vehicle or walking)
    timestamp vehicle_;  // earliest arrival by vehicle
    con_idx_t ready_ptr_;  // alighting connection behind ready_
    con_idx_t best_ptr_;  // alighting connection behind best_
    std::uint32_t stamp_;
  };

  struct trip_label {
    con_idx_t enter_;  // invalid: boarded at the source (on board)
    std::uint32_t stamp_;
  };

  label& stop_label(stop_idx_t);
  label const* find_label(stop_idx_t) const;
  trip_label* find_trip(trip_idx_t);
  void set_scan_pos(con_idx_t, std::uint32_t);

  journey extract(std::span<connection const> sorted, source const&,
                  stop_idx_t target) const;

  timetable const& tt_;
  std::uint32_t stamp_{0};
  std::vector<label> stops_;
  std::vector<trip_label> trips_;
  std::vector<std::uint32_t> scan_pos_;  // con idx -> position in `sorted`
  std::vector<std::uint32_t> scan_stamp_;
};

}  // namespace replan
