#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "replan/timetable.h"

namespace replan {

constexpr std::size_t kDefaultMaxFootpathComponent = 512U;
constexpr duration kDefaultLoopDuration = 120;

// Transitive closure of the walking graph: within every weakly connected
// component, each reachable ordered pair gets its shortest-path duration.
// Loops are passed through unchanged (they model transfer buffers, not
// walks). Throws error_kind::validation on negative durations and when a
// component exceeds `max_component` stops.
std::vector<footpath> close_footpaths(
    std::span<footpath const>,
    std::size_t max_component = kDefaultMaxFootpathComponent);

// Gives every stop in [0, n_stops) exactly one loop footpath. Existing loops
// are kept (the shortest one if several are given).
std::vector<footpath> add_loop_footpaths(std::span<footpath const>,
                                         std::size_t n_stops,
                                         duration default_loop_duration);

// Symmetric footpaths between stops with coordinates that lie within
// `radius_m` metres (great-circle), walked at `speed_mps`.
std::vector<footpath> walking_footpaths(std::span<stop const>, double radius_m,
                                        double speed_mps = 1.25);

}  // namespace replan
