#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "replan/footpaths.h"
#include "replan/timetable.h"

namespace replan {

struct gtfs_options {
  // Service day: an explicit date (YYYYMMDD) wins over a weekday
  // (0 = Monday ... 6 = Sunday). With neither, the weekday (Mon-Fri) with the
  // most active trips is used.
  std::optional<std::string> date_;
  std::optional<int> weekday_;

  duration default_loop_{kDefaultLoopDuration};

  // Optional walking footpaths generated from stop coordinates (0 = off).
  double walk_radius_m_{0.0};
  double walk_speed_mps_{1.25};

  std::size_t max_footpath_component_{kDefaultMaxFootpathComponent};
};

struct gtfs_summary {
  std::string service_day_;  // e.g. "weekday monday" or "date 20140602"
  std::size_t active_trips_{0};
  std::size_t dropped_trips_{0};  // fewer than two stop events
  std::size_t frequency_trips_{0};  // trips generated from frequencies.txt
  std::size_t interpolated_times_{0};
  std::size_t adjusted_times_{0};  // zero-length hops stretched to 1 s
};

// Parses a GTFS directory into a validated timetable. Throws replan::error:
// parse (missing file/column, bad time with its line number) or validation.
timetable load_gtfs(std::filesystem::path const& dir,
                    gtfs_options const& = {}, gtfs_summary* = nullptr);

}  // namespace replan
