#include "support/random_instance.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "replan/footpaths.h"

namespace replan::test {

timetable random_timetable(std::mt19937_64& rng, instance_params const& p) {
  timetable_builder b;
  for (auto i = 0U; i != p.n_stops_; ++i) {
    b.add_stop("s" + std::to_string(i));
  }

  std::vector<std::uint32_t> all(p.n_stops_);
  std::iota(begin(all), end(all), 0U);
  auto n_connections = std::size_t{0};
  auto trip_no = 0U;
  for (auto r = 0U; r != p.n_routes_; ++r) {
    auto const len = std::min(
        p.n_stops_, uniform(rng, p.min_route_len_, p.max_route_len_));
    std::shuffle(begin(all), end(all), rng);
    std::vector<std::uint32_t> seq(begin(all), begin(all) + static_cast<long>(len));
    std::vector<duration> hops(len - 1U);
    for (auto& h : hops) {
      h = uniform(rng, p.min_hop_, p.max_hop_);
    }
    auto const n_trips = uniform<std::size_t>(rng, 1U, p.max_trips_per_route_);
    for (auto t = 0U; t != n_trips; ++t) {
      if (n_connections + len - 1U > p.max_connections_) {
        break;
      }
      auto time = p.day_start_ + uniform(rng, 0, p.day_span_);
      std::vector<stop_time> events;
      for (auto i = 0U; i != len; ++i) {
        auto const arr = time;
        // Occasional dwell at intermediate stops.
        auto const dwell = i != 0U && i + 1U != len && uniform(rng, 0, 3) == 0
                               ? uniform(rng, 0, 120)
                               : 0;
        auto const dep = arr + dwell;
        events.push_back(stop_time{stop_idx_t{seq[i]}, arr, dep});
        if (i + 1U != len) {
          // Trips of a route share the hop pattern with some jitter, so
          // that overtaking can happen.
          time = dep + std::max<duration>(1, hops[i] + uniform(rng, -30, 30));
        }
      }
      b.add_trip("t" + std::to_string(trip_no++), events,
                 static_cast<transport_mode>(uniform(rng, 0, 2)),
                 "r" + std::to_string(r));
      n_connections += len - 1U;
    }
  }

  std::vector<footpath> walks;
  for (auto i = 0U; i != p.n_stops_; ++i) {
    for (auto j = 0U; j != p.n_stops_; ++j) {
      if (i != j && uniform(rng, 0.0, 1.0) < p.footpath_density_) {
        walks.push_back(footpath{stop_idx_t{i}, stop_idx_t{j},
                                 uniform(rng, 0, p.max_walk_)});
      }
    }
  }
  for (auto i = 0U; i != p.n_stops_; ++i) {
    if (uniform(rng, 0, 2) != 0) {
      walks.push_back(footpath{stop_idx_t{i}, stop_idx_t{i},
                               uniform(rng, 0, p.max_loop_)});
    }
  }
  auto closed = close_footpaths(walks);
  b.add_footpaths(add_loop_footpaths(closed, p.n_stops_, 0));
  return std::move(b).build();
}

delay_feed random_feed(timetable const& tt, std::mt19937_64& rng,
                       feed_params const& p) {
  std::vector<delay_event> events;
  for (auto t = 0U; t != tt.n_trips(); ++t) {
    if (uniform(rng, 0.0, 1.0) >= p.trip_probability_) {
      continue;
    }
    auto const cons = tt.trip_connections(trip_idx_t{t});
    auto const from = cons.front().dep_;
    auto const to = cons.back().arr_;
    auto const n = uniform<std::size_t>(rng, 1U, p.max_events_per_trip_);
    std::set<timestamp> times;
    for (auto i = 0U; i != n; ++i) {
      times.insert(uniform(rng, from, to));
    }
    for (auto const time : times) {
      events.push_back(delay_event{trip_idx_t{t}, time, uniform(rng, 0, p.max_delay_)});
    }
  }
  return delay_feed{std::move(events)};
}

}  // namespace replan::test
