#include <algorithm>
#include <cmath>
#include <random>

#include "replan/delay.h"
#include "replan/error.h"

namespace replan {

peak_profile peak_profile_from_timetable(timetable const& tt,
                                         double const threshold) {
  peak_profile p;
  if (tt.n_connections() == 0U) {
    return p;
  }
  std::vector<std::size_t> per_hour;
  for (auto const& c : tt.connections()) {
    auto const h = static_cast<std::size_t>(std::max(0, c.dep_) / 3600);
    if (h >= per_hour.size()) {
      per_hour.resize(h + 1U, 0U);
    }
    ++per_hour[h];
  }
  auto const mean = static_cast<double>(tt.n_connections()) /
                    static_cast<double>(per_hour.size());
  for (auto h = 0U; h != per_hour.size(); ++h) {
    if (static_cast<double>(per_hour[h]) <= threshold * mean) {
      continue;
    }
    auto const from = static_cast<timestamp>(h * 3600U);
    if (!p.windows_.empty() && p.windows_.back().to_ == from) {
      p.windows_.back().to_ = from + 3600;
    } else {
      p.windows_.push_back(time_window{from, from + 3600});
    }
  }
  return p;
}

period classify_period(timestamp const t, peak_profile const& p) {
  for (auto const& w : p.windows_) {
    if (w.from_ <= t && t < w.to_) {
      return period::peak;
    }
  }
  return period::off_peak;
}

delay_feed sample_delays(timetable const& tt, delay_params const& params,
                         std::uint64_t const seed) {
  for (auto const& per_mode : params.mean_s_) {
    for (auto const m : per_mode) {
      if (!(m > 0.0)) {
        throw error{error_kind::config, "mean delay must be positive"};
      }
    }
  }
  auto const profile = params.peak_windows_.has_value()
                           ? *params.peak_windows_
                           : peak_profile_from_timetable(tt, params.peak_threshold_);

  std::mt19937_64 rng{seed};
  std::vector<delay_event> events;
  for (auto t = 0U; t != tt.n_trips(); ++t) {
    auto const cons = tt.trip_connections(trip_idx_t{t});
    if (cons.empty()) {
      continue;
    }
    auto const& tr = tt.trips()[t];
    auto const first_dep = cons.front().dep_;
    auto const mean =
        params.mean_s_[static_cast<std::size_t>(tr.mode_)]
                      [static_cast<std::size_t>(classify_period(first_dep, profile))];
    auto const x = draw_exponential(rng, mean);
    if (x < params.min_delay_) {
      continue;
    }
    auto const at = std::uniform_int_distribution<timestamp>{
        first_dep, cons.back().arr_}(rng);
    events.push_back(delay_event{.trip_ = trip_idx_t{t},
                                 .time_ = at,
                                 .delay_ = static_cast<duration>(std::lround(x))});
  }
  return delay_feed{std::move(events)};
}

}  // namespace replan
