#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "replan/timetable.h"

namespace replan::test {

// Calls `fn(connections, arrival)` for every valid journey from `from`
// (standing there at `tq`) to `to` that arrives no later than `td` under
// `times`: each connection is boarded when ready (loop buffer after a
// vehicle, or a footpath), trips are ridden as contiguous segments, and at
// most one footpath is walked between two vehicles. Returns the number of
// journeys, stopping early once `limit` is reached.
std::size_t enumerate_journeys(
    timetable const&, connection_lookup const& times, stop_idx_t from,
    timestamp tq, stop_idx_t to, timestamp td,
    std::function<void(std::span<connection const>, timestamp)> const& fn,
    std::size_t limit = 10'000'000U);

}  // namespace replan::test
