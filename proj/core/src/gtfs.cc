#include "replan/gtfs.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "replan/csv.h"
#include "replan/error.h"
#include "replan/footpaths.h"

namespace fs = std::filesystem;

namespace replan {

namespace {

csv_table read_required(fs::path const& dir, char const* name) {
  auto const p = dir / name;
  if (!fs::exists(p)) {
    throw error{error_kind::parse,
                "missing required file " + std::string{name} + " in " +
                    dir.string()};
  }
  return csv_table::read(p);
}

std::optional<csv_table> read_optional(fs::path const& dir, char const* name) {
  auto const p = dir / name;
  if (!fs::exists(p)) {
    return std::nullopt;
  }
  return csv_table::read(p);
}

template <typename T>
T to_number(csv_table const& t, std::size_t const row, std::size_t const col,
            std::string_view const col_name) {
  auto const s = t.at(row, col);
  T v{};
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw error{error_kind::parse,
                t.name() + " line " + std::to_string(t.line(row)) +
                    ": bad value \"" + std::string{s} + "\" in column " +
                    std::string{col_name}};
  }
  return v;
}

std::optional<timestamp> time_cell(csv_table const& t, std::size_t const row,
                                   std::size_t const col) {
  auto const s = t.at(row, col);
  if (s.empty()) {
    return std::nullopt;
  }
  try {
    return parse_time(s);
  } catch (error const&) {
    throw error{error_kind::parse, t.name() + " line " +
                                       std::to_string(t.line(row)) +
                                       ": unparseable time \"" +
                                       std::string{s} + "\""};
  }
}

// 0 = Monday ... 6 = Sunday.
int weekday_of(int const yyyymmdd) {
  using namespace std::chrono;
  auto const ymd = year_month_day{year{yyyymmdd / 10000},
                                  month{static_cast<unsigned>(yyyymmdd / 100 % 100)},
                                  day{static_cast<unsigned>(yyyymmdd % 100)}};
  if (!ymd.ok()) {
    throw error{error_kind::config, "invalid date " + std::to_string(yyyymmdd)};
  }
  return static_cast<int>(weekday{sys_days{ymd}}.iso_encoding()) - 1;
}

constexpr std::array<char const*, 7> kDayColumns = {
    "monday", "tuesday", "wednesday", "thursday",
    "friday", "saturday", "sunday"};

struct service_calendar {
  struct regular {
    std::array<bool, 7> days_{};
    int start_{0};
    int end_{99999999};
  };

  std::map<std::string, regular, std::less<>> regular_;
  std::map<std::string, std::vector<std::pair<int, int>>, std::less<>>
      exceptions_;  // service -> (date, type)
  bool has_calendar_{false};
  bool has_dates_{false};
};

service_calendar read_calendar(fs::path const& dir) {
  service_calendar cal;
  if (auto const t = read_optional(dir, "calendar.txt"); t.has_value()) {
    cal.has_calendar_ = true;
    auto const sid = t->required_column("service_id");
    std::array<std::size_t, 7> days{};
    for (auto d = 0U; d != 7U; ++d) {
      days[d] = t->required_column(kDayColumns[d]);
    }
    auto const start = t->required_column("start_date");
    auto const end = t->required_column("end_date");
    for (auto r = 0U; r != t->size(); ++r) {
      service_calendar::regular reg;
      for (auto d = 0U; d != 7U; ++d) {
        reg.days_[d] = t->at(r, days[d]) == "1";
      }
      reg.start_ = to_number<int>(*t, r, start, "start_date");
      reg.end_ = to_number<int>(*t, r, end, "end_date");
      cal.regular_[std::string{t->at(r, sid)}] = reg;
    }
  }
  if (auto const t = read_optional(dir, "calendar_dates.txt"); t.has_value()) {
    cal.has_dates_ = true;
    auto const sid = t->required_column("service_id");
    auto const date = t->required_column("date");
    auto const type = t->required_column("exception_type");
    for (auto r = 0U; r != t->size(); ++r) {
      cal.exceptions_[std::string{t->at(r, sid)}].emplace_back(
          to_number<int>(*t, r, date, "date"),
          to_number<int>(*t, r, type, "exception_type"));
    }
  }
  return cal;
}

std::unordered_set<std::string> services_on_date(service_calendar const& cal,
                                                 int const date) {
  auto const wd = weekday_of(date);
  std::unordered_set<std::string> active;
  for (auto const& [sid, reg] : cal.regular_) {
    if (reg.days_[wd] && reg.start_ <= date && date <= reg.end_) {
      active.insert(sid);
    }
  }
  for (auto const& [sid, exceptions] : cal.exceptions_) {
    for (auto const& [d, type] : exceptions) {
      if (d != date) {
        continue;
      }
      if (type == 1) {
        active.insert(sid);
      } else if (type == 2) {
        active.erase(sid);
      }
    }
  }
  return active;
}

std::unordered_set<std::string> services_on_weekday(service_calendar const& cal,
                                                    int const wd) {
  std::unordered_set<std::string> active;
  for (auto const& [sid, reg] : cal.regular_) {
    if (reg.days_[wd]) {
      active.insert(sid);
    }
  }
  return active;
}

struct raw_event {
  int seq_;
  stop_idx_t stop_;
  std::optional<timestamp> arr_;
  std::optional<timestamp> dep_;
  std::size_t line_;
};

struct normalized {
  std::vector<stop_time> events_;
  std::size_t interpolated_{0};
  std::size_t adjusted_{0};
};

normalized normalize(std::vector<raw_event> events,
                     std::string_view const trip_id) {
  std::stable_sort(begin(events), end(events),
                   [](raw_event const& a, raw_event const& b) {
                     return a.seq_ < b.seq_;
                   });

  normalized out;
  for (auto& e : events) {
    if (!e.arr_.has_value() && e.dep_.has_value()) {
      e.arr_ = e.dep_;
    } else if (!e.dep_.has_value() && e.arr_.has_value()) {
      e.dep_ = e.arr_;
    }
  }
  if (events.empty()) {
    return out;
  }
  if (!events.front().dep_.has_value() || !events.back().arr_.has_value()) {
    auto const& bad = events.front().dep_.has_value() ? events.back()
                                                       : events.front();
    throw error{error_kind::parse,
                "stop_times.txt line " + std::to_string(bad.line_) +
                    ": first and last stop of trip " + std::string{trip_id} +
                    " need times"};
  }

  // Linear interpolation by stop index between timed events.
  for (auto i = 1U; i + 1U < events.size(); ++i) {
    if (events[i].arr_.has_value()) {
      continue;
    }
    auto const prev = i - 1U;
    auto next = i + 1U;
    while (!events[next].arr_.has_value()) {
      ++next;
    }
    auto const t0 = *events[prev].dep_;
    auto const t1 = *events[next].arr_;
    for (auto k = i; k != next; ++k) {
      auto const frac = static_cast<double>(k - prev) /
                        static_cast<double>(next - prev);
      auto const t = static_cast<timestamp>(t0 + frac * (t1 - t0));
      events[k].arr_ = t;
      events[k].dep_ = t;
      ++out.interpolated_;
    }
    i = next;
  }

  // A vehicle repeating a stop is one stop event.
  std::vector<stop_time> merged;
  for (auto const& e : events) {
    if (!merged.empty() && merged.back().stop_ == e.stop_) {
      merged.back().dep_ = *e.dep_;
      continue;
    }
    merged.push_back(stop_time{e.stop_, *e.arr_, *e.dep_});
  }

  // Zero-length hops (minute-resolution feeds) become 1 s so that every
  // connection departs strictly before it arrives.
  auto const orig = merged;
  for (auto i = 1U; i < merged.size(); ++i) {
    if (orig[i].arr_ >= orig[i - 1U].dep_ &&
        merged[i].arr_ <= merged[i - 1U].dep_) {
      merged[i].arr_ = merged[i - 1U].dep_ + 1;
      ++out.adjusted_;
    }
    if (merged[i].dep_ < merged[i].arr_ && orig[i].dep_ >= orig[i].arr_) {
      merged[i].dep_ = merged[i].arr_;
    }
  }
  out.events_ = std::move(merged);
  return out;
}

}  // namespace

timetable load_gtfs(fs::path const& dir, gtfs_options const& opts,
                    gtfs_summary* summary) {
  if (!fs::is_directory(dir)) {
    throw error{error_kind::parse, "GTFS directory not found: " + dir.string()};
  }
  auto const stops = read_required(dir, "stops.txt");
  auto const routes = read_required(dir, "routes.txt");
  auto const trips = read_required(dir, "trips.txt");
  auto const stop_times = read_required(dir, "stop_times.txt");

  gtfs_summary sum;
  timetable_builder b;

  // Stops: platforms/stops only; stations and entrances are skipped unless
  // referenced by stop_times.
  std::unordered_map<std::string, stop_idx_t> stop_idx;
  std::vector<stop> stop_list;
  std::unordered_map<std::string, std::size_t> skipped_stop_rows;
  {
    auto const id = stops.required_column("stop_id");
    auto const name = stops.column("stop_name");
    auto const lat = stops.column("stop_lat");
    auto const lon = stops.column("stop_lon");
    auto const type = stops.column("location_type");
    for (auto r = 0U; r != stops.size(); ++r) {
      auto const sid = std::string{stops.at(r, id)};
      auto const lt = stops.get(r, type);
      if (!lt.empty() && lt != "0") {
        skipped_stop_rows.emplace(sid, r);
        continue;
      }
      if (stop_idx.contains(sid)) {
        throw error{error_kind::parse, "stops.txt line " +
                                           std::to_string(stops.line(r)) +
                                           ": duplicate stop_id " + sid};
      }
      auto la = std::optional<double>{};
      auto lo = std::optional<double>{};
      if (lat.has_value() && lon.has_value() && !stops.at(r, *lat).empty() &&
          !stops.at(r, *lon).empty()) {
        la = to_number<double>(stops, r, *lat, "stop_lat");
        lo = to_number<double>(stops, r, *lon, "stop_lon");
      }
      auto const nm = std::string{stops.get(r, name)};
      stop_idx.emplace(sid, b.add_stop(sid, nm, la, lo));
      stop_list.push_back(stop{sid, nm, la, lo});
    }
  }

  std::unordered_map<std::string, int> route_type;
  {
    auto const id = routes.required_column("route_id");
    auto const type = routes.required_column("route_type");
    for (auto r = 0U; r != routes.size(); ++r) {
      route_type[std::string{routes.at(r, id)}] =
          to_number<int>(routes, r, type, "route_type");
    }
  }

  // Service day.
  auto const cal = read_calendar(dir);
  auto const trip_id_col = trips.required_column("trip_id");
  auto const trip_route_col = trips.required_column("route_id");
  auto const trip_service_col = trips.required_column("service_id");
  auto trips_per_service = std::unordered_map<std::string, std::size_t>{};
  for (auto r = 0U; r != trips.size(); ++r) {
    ++trips_per_service[std::string{trips.at(r, trip_service_col)}];
  }
  auto const count_trips = [&](std::unordered_set<std::string> const& s) {
    auto n = std::size_t{0};
    for (auto const& sid : s) {
      auto const it = trips_per_service.find(sid);
      n += it == end(trips_per_service) ? 0U : it->second;
    }
    return n;
  };

  std::optional<std::unordered_set<std::string>> active;
  if (opts.date_.has_value()) {
    auto const& ds = *opts.date_;
    if (ds.size() != 8U ||
        !std::all_of(begin(ds), end(ds), [](char const c) { return c >= '0' && c <= '9'; })) {
      throw error{error_kind::config, "date must be YYYYMMDD, got \"" + ds + "\""};
    }
    auto const d = std::stoi(ds);
    active = services_on_date(cal, d);
    sum.service_day_ = "date " + *opts.date_;
  } else if (opts.weekday_.has_value()) {
    if (*opts.weekday_ < 0 || *opts.weekday_ > 6) {
      throw error{error_kind::config, "weekday must be in [0, 6]"};
    }
    active = services_on_weekday(cal, *opts.weekday_);
    sum.service_day_ = std::string{"weekday "} + kDayColumns[*opts.weekday_];
  } else if (cal.has_calendar_) {
    auto best = std::size_t{0};
    auto best_day = 0;
    for (auto wd = 0; wd != 5; ++wd) {
      auto const n = count_trips(services_on_weekday(cal, wd));
      if (n > best) {
        best = n;
        best_day = wd;
      }
    }
    active = services_on_weekday(cal, best_day);
    sum.service_day_ = std::string{"weekday "} + kDayColumns[best_day];
  } else if (cal.has_dates_) {
    std::map<int, std::unordered_set<std::string>> added;
    for (auto const& [sid, exceptions] : cal.exceptions_) {
      for (auto const& [d, type] : exceptions) {
        if (type == 1 && weekday_of(d) < 5) {
          added[d].insert(sid);
        }
      }
    }
    auto best = std::size_t{0};
    for (auto const& [d, services] : added) {
      auto const n = count_trips(services);
      if (n > best) {
        best = n;
        active = services;
        sum.service_day_ = "date " + std::to_string(d);
      }
    }
    if (!active.has_value()) {
      active = std::unordered_set<std::string>{};
      sum.service_day_ = "no weekday service";
    }
  } else {
    sum.service_day_ = "all trips (no calendar)";
  }

  struct trip_meta {
    std::string id_;
    std::string route_;
    transport_mode mode_;
  };
  std::vector<trip_meta> active_trips;
  std::unordered_map<std::string, std::size_t> trip_pos;
  for (auto r = 0U; r != trips.size(); ++r) {
    if (active.has_value() &&
        !active->contains(std::string{trips.at(r, trip_service_col)})) {
      continue;
    }
    auto const rid = std::string{trips.at(r, trip_route_col)};
    auto const rt = route_type.find(rid);
    if (rt == end(route_type)) {
      throw error{error_kind::parse, "trips.txt line " +
                                         std::to_string(trips.line(r)) +
                                         ": unknown route_id " + rid};
    }
    auto const tid = std::string{trips.at(r, trip_id_col)};
    if (trip_pos.contains(tid)) {
      throw error{error_kind::parse, "trips.txt line " +
                                         std::to_string(trips.line(r)) +
                                         ": duplicate trip_id " + tid};
    }
    trip_pos.emplace(tid, active_trips.size());
    active_trips.push_back(
        trip_meta{tid, rid, mode_from_route_type(rt->second)});
  }
  sum.active_trips_ = active_trips.size();

  std::vector<std::vector<raw_event>> events(active_trips.size());
  {
    auto const tid = stop_times.required_column("trip_id");
    auto const arr = stop_times.required_column("arrival_time");
    auto const dep = stop_times.required_column("departure_time");
    auto const sid = stop_times.required_column("stop_id");
    auto const seq = stop_times.required_column("stop_sequence");
    for (auto r = 0U; r != stop_times.size(); ++r) {
      auto const it = trip_pos.find(std::string{stop_times.at(r, tid)});
      if (it == end(trip_pos)) {
        continue;
      }
      auto const stop_id = std::string{stop_times.at(r, sid)};
      auto s = stop_idx.find(stop_id);
      if (s == end(stop_idx)) {
        auto const skipped = skipped_stop_rows.find(stop_id);
        if (skipped == end(skipped_stop_rows)) {
          throw error{error_kind::parse,
                      "stop_times.txt line " +
                          std::to_string(stop_times.line(r)) +
                          ": unknown stop_id " + stop_id};
        }
        s = stop_idx.emplace(stop_id, b.add_stop(stop_id)).first;
        stop_list.push_back(stop{stop_id, {}, std::nullopt, std::nullopt});
      }
      events[it->second].push_back(
          raw_event{.seq_ = to_number<int>(stop_times, r, seq, "stop_sequence"),
                    .stop_ = s->second,
                    .arr_ = time_cell(stop_times, r, arr),
                    .dep_ = time_cell(stop_times, r, dep),
                    .line_ = stop_times.line(r)});
    }
  }

  // frequencies.txt: trip template -> explicit trips.
  std::unordered_map<std::string, std::vector<std::array<timestamp, 3>>> freqs;
  if (auto const f = read_optional(dir, "frequencies.txt"); f.has_value()) {
    auto const tid = f->required_column("trip_id");
    auto const start = f->required_column("start_time");
    auto const end = f->required_column("end_time");
    auto const headway = f->required_column("headway_secs");
    for (auto r = 0U; r != f->size(); ++r) {
      auto const s = time_cell(*f, r, start);
      auto const e = time_cell(*f, r, end);
      auto const h = to_number<int>(*f, r, headway, "headway_secs");
      if (!s.has_value() || !e.has_value() || h <= 0) {
        throw error{error_kind::parse, "frequencies.txt line " +
                                           std::to_string(f->line(r)) +
                                           ": bad frequency row"};
      }
      freqs[std::string{f->at(r, tid)}].push_back({*s, *e, h});
    }
  }

  for (auto t = 0U; t != active_trips.size(); ++t) {
    auto const& meta = active_trips[t];
    auto norm = normalize(std::move(events[t]), meta.id_);
    sum.interpolated_times_ += norm.interpolated_;
    sum.adjusted_times_ += norm.adjusted_;
    if (norm.events_.size() < 2U) {
      ++sum.dropped_trips_;
      continue;
    }
    auto const fit = freqs.find(meta.id_);
    if (fit == end(freqs)) {
      b.add_trip(meta.id_, norm.events_, meta.mode_, meta.route_);
      continue;
    }
    auto const base = norm.events_.front().dep_;
    for (auto const& [start, end, headway] : fit->second) {
      for (auto s = start; s < end; s += headway) {
        auto shifted = norm.events_;
        for (auto& e : shifted) {
          e.arr_ += s - base;
          e.dep_ += s - base;
        }
        b.add_trip(meta.id_ + "@" + format_time(s), shifted, meta.mode_,
                   meta.route_);
        ++sum.frequency_trips_;
      }
    }
  }

  // Footpaths: transfers.txt plus optional coordinate-based walks, closed
  // transitively; loops from transfers.txt are raised to the default.
  std::vector<footpath> fps;
  if (auto const tr = read_optional(dir, "transfers.txt"); tr.has_value()) {
    auto const from = tr->required_column("from_stop_id");
    auto const to = tr->required_column("to_stop_id");
    auto const type = tr->column("transfer_type");
    auto const mtt = tr->column("min_transfer_time");
    for (auto r = 0U; r != tr->size(); ++r) {
      auto const f = stop_idx.find(std::string{tr->at(r, from)});
      auto const t = stop_idx.find(std::string{tr->at(r, to)});
      if (f == end(stop_idx) || t == end(stop_idx) ||
          tr->get(r, type) == "3") {
        continue;
      }
      auto const time = tr->get(r, mtt);
      if (time.empty()) {
        if (f->second == t->second) {
          fps.push_back(footpath{f->second, t->second, opts.default_loop_});
        }
        continue;
      }
      auto d = to_number<int>(*tr, r, *mtt, "min_transfer_time");
      if (f->second == t->second) {
        d = std::max(d, opts.default_loop_);
      }
      fps.push_back(footpath{f->second, t->second, d});
    }
  }
  if (opts.walk_radius_m_ > 0.0) {
    auto const walks =
        walking_footpaths(stop_list, opts.walk_radius_m_, opts.walk_speed_mps_);
    fps.insert(end(fps), begin(walks), end(walks));
  }
  auto const closed = close_footpaths(fps, opts.max_footpath_component_);
  auto const with_loops =
      add_loop_footpaths(closed, b.n_stops(), opts.default_loop_);
  b.add_footpaths(with_loops);

  auto tt = std::move(b).build();
  auto const report = validate(tt);
  if (!report.ok()) {
    auto msg = std::string{"GTFS feed in "} + dir.string() + " fails " +
               std::to_string(report.violations_.size()) + " check(s):";
    for (auto i = 0U; i != std::min<std::size_t>(5U, report.violations_.size());
         ++i) {
      msg += "\n  " + report.violations_[i].message_;
    }
    throw error{error_kind::validation, msg};
  }

  if (summary != nullptr) {
    *summary = sum;
  }
  return tt;
}

}  // namespace replan
