#pragma once

#include "replan/delay.h"
#include "replan/timetable.h"

namespace replan::test {

// The eight-stop toy network. Stops s1..s8 get ids 0..7, trips
// t1..t3 ids 0..2. The only transfer buffer is 5 minutes at s3.
timetable make_toy(duration s3_loop = 300);

inline stop_idx_t toy_stop(int const n) { return stop_idx_t{n - 1}; }
inline trip_idx_t toy_trip(int const n) { return trip_idx_t{n - 1}; }

constexpr timestamp hm(int const h, int const m) { return h * 3600 + m * 60; }

// t2 is 10 minutes late, known at 08:00.
delay_feed example1_feed();

}  // namespace replan::test
