#include "replan/timetable.h"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <set>
#include <utility>

#include "replan/error.h"

namespace replan {

transport_mode mode_from_route_type(int const t) {
  switch (t) {
    case 0: return transport_mode::semi_separated;  // tram
    case 1:  // subway
    case 2:  // rail
    case 12: return transport_mode::fully_separated;  // monorail
    default: break;
  }
  if ((t >= 100 && t < 200) || (t >= 400 && t < 500)) {
    return transport_mode::fully_separated;
  }
  if (t >= 900 && t < 1000) {
    return transport_mode::semi_separated;
  }
  return transport_mode::mixed_traffic;
}

char const* to_string(transport_mode const m) {
  switch (m) {
    case transport_mode::fully_separated: return "fully_separated";
    case transport_mode::semi_separated: return "semi_separated";
    case transport_mode::mixed_traffic: return "mixed_traffic";
  }
  return "?";
}

std::span<footpath const> timetable::footpaths_from(stop_idx_t const s) const {
  if (s.v() + 1 >= footpath_offsets_.size()) {
    return {};
  }
  return std::span{footpaths_}.subspan(
      footpath_offsets_[s.v()],
      footpath_offsets_[s.v() + 1] - footpath_offsets_[s.v()]);
}

std::optional<duration> timetable::walk(stop_idx_t const from,
                                        stop_idx_t const to) const {
  auto const fps = footpaths_from(from);
  auto const it = std::lower_bound(
      begin(fps), end(fps), to,
      [](footpath const& f, stop_idx_t const s) { return f.to_ < s; });
  if (it == end(fps) || it->to_ != to) {
    return std::nullopt;
  }
  return it->duration_;
}

std::span<connection const> timetable::trip_connections(
    trip_idx_t const t) const {
  auto const& tr = trips_[t.v()];
  return std::span{connections_}.subspan(tr.first_.v(), tr.size_);
}

std::uint32_t timetable::position(con_idx_t const c) const {
  return c.v() - trips_[connections_[c.v()].trip_.v()].first_.v();
}

std::optional<stop_idx_t> timetable::find_stop(std::string_view const id) const {
  auto const it = stop_by_id_.find(std::string{id});
  return it == end(stop_by_id_) ? std::nullopt : std::optional{it->second};
}

std::optional<trip_idx_t> timetable::find_trip(std::string_view const id) const {
  auto const it = trip_by_id_.find(std::string{id});
  return it == end(trip_by_id_) ? std::nullopt : std::optional{it->second};
}

void timetable::finalize() {
  sorted_ = connections_;
  std::sort(begin(sorted_), end(sorted_), departs_before);

  std::sort(begin(footpaths_), end(footpaths_),
            [](footpath const& a, footpath const& b) {
              return std::tie(a.from_, a.to_, a.duration_) <
                     std::tie(b.from_, b.to_, b.duration_);
            });
  footpaths_.erase(std::unique(begin(footpaths_), end(footpaths_),
                               [](footpath const& a, footpath const& b) {
                                 return a.from_ == b.from_ && a.to_ == b.to_;
                               }),
                   end(footpaths_));

  footpath_offsets_.assign(stops_.size() + 1U, 0U);
  for (auto const& f : footpaths_) {
    if (f.from_.v() < stops_.size()) {
      ++footpath_offsets_[f.from_.v() + 1U];
    }
  }
  std::partial_sum(begin(footpath_offsets_), end(footpath_offsets_),
                   begin(footpath_offsets_));

  last_arrival_ = 0;
  for (auto const& c : connections_) {
    last_arrival_ = std::max(last_arrival_, c.arr_);
  }

  stop_by_id_.clear();
  for (auto i = 0U; i != stops_.size(); ++i) {
    stop_by_id_.emplace(stops_[i].id_, stop_idx_t{i});
  }
  trip_by_id_.clear();
  for (auto i = 0U; i != trips_.size(); ++i) {
    trip_by_id_.emplace(trips_[i].id_, trip_idx_t{i});
  }
}

stop_idx_t timetable_builder::add_stop(std::string id, std::string name,
                                       std::optional<double> const lat,
                                       std::optional<double> const lon) {
  auto const idx = stop_idx_t{tt_.stops_.size()};
  tt_.stops_.push_back(stop{std::move(id), std::move(name), lat, lon});
  return idx;
}

trip_idx_t timetable_builder::add_trip(std::string id,
                                       std::span<stop_time const> const events,
                                       transport_mode const mode,
                                       std::string gtfs_route_id) {
  std::vector<raw_connection> cons;
  for (auto i = 1U; i < events.size(); ++i) {
    cons.push_back({events[i - 1].stop_, events[i - 1].dep_, events[i].stop_,
                    events[i].arr_});
  }
  return add_trip_connections(std::move(id), cons, mode,
                              std::move(gtfs_route_id));
}

trip_idx_t timetable_builder::add_trip_connections(
    std::string id, std::span<raw_connection const> const cons,
    transport_mode const mode, std::string gtfs_route_id) {
  auto const idx = trip_idx_t{tt_.trips_.size()};
  tt_.trips_.push_back(trip{.id_ = std::move(id),
                            .gtfs_route_id_ = std::move(gtfs_route_id),
                            .route_ = route_idx_t::invalid(),
                            .mode_ = mode,
                            .first_ = con_idx_t::invalid(),
                            .size_ = 0U});
  trip_cons_.emplace_back(begin(cons), end(cons));
  return idx;
}

void timetable_builder::add_footpath(stop_idx_t const from,
                                     stop_idx_t const to, duration const d) {
  tt_.footpaths_.push_back(footpath{from, to, d});
}

void timetable_builder::add_footpaths(std::span<footpath const> const fps) {
  tt_.footpaths_.insert(end(tt_.footpaths_), begin(fps), end(fps));
}

timetable timetable_builder::build() && {
  auto& tt = tt_;

  tt.connections_.clear();
  std::vector<std::vector<stop_idx_t>> sequences;
  sequences.reserve(tt.trips_.size());
  for (auto t = 0U; t != tt.trips_.size(); ++t) {
    auto& tr = tt.trips_[t];
    auto const& cons = trip_cons_[t];
    tr.first_ = con_idx_t{tt.connections_.size()};
    tr.size_ = static_cast<std::uint32_t>(cons.size());
    auto& seq = sequences.emplace_back();
    for (auto const& rc : cons) {
      if (seq.empty()) {
        seq.push_back(rc.from_);
      }
      seq.push_back(rc.to_);
      tt.connections_.push_back(connection{
          .idx_ = con_idx_t{tt.connections_.size()},
          .trip_ = trip_idx_t{t},
          .from_ = rc.from_,
          .to_ = rc.to_,
          .dep_ = rc.dep_,
          .arr_ = rc.arr_,
      });
    }
  }

  auto const routes = group_routes(sequences);
  tt.n_routes_ = 0U;
  for (auto t = 0U; t != tt.trips_.size(); ++t) {
    tt.trips_[t].route_ = routes[t];
    tt.n_routes_ = std::max<std::size_t>(tt.n_routes_, routes[t].v() + 1U);
  }

  tt.finalize();
  return std::move(tt);
}

std::vector<route_idx_t> group_routes(
    std::span<std::vector<stop_idx_t> const> const stop_sequences) {
  std::vector<std::uint32_t> order(stop_sequences.size());
  std::iota(begin(order), end(order), 0U);
  std::stable_sort(begin(order), end(order), [&](auto const a, auto const b) {
    return stop_sequences[a] < stop_sequences[b];
  });

  std::vector<route_idx_t> routes(stop_sequences.size());
  auto next = 0U;
  for (auto i = 0U; i != order.size(); ++i) {
    if (i != 0U &&
        stop_sequences[order[i]] != stop_sequences[order[i - 1U]]) {
      ++next;
    }
    routes[order[i]] = route_idx_t{next};
  }
  return routes;
}

char const* to_string(violation_kind const k) {
  switch (k) {
    case violation_kind::unknown_stop: return "unknown-stop";
    case violation_kind::connection_same_stop: return "connection-same-stop";
    case violation_kind::connection_time_order: return "connection-time-order";
    case violation_kind::trip_connection_mismatch:
      return "trip-connection-mismatch";
    case violation_kind::trip_chain: return "trip-chain";
    case violation_kind::trip_time_consistency: return "time-consistent";
    case violation_kind::footpath_negative: return "footpath-negative";
    case violation_kind::missing_loop: return "missing-loop";
    case violation_kind::footpath_transitive_closure:
      return "transitive-closure";
    case violation_kind::footpath_triangle_inequality:
      return "triangle-inequality";
    case violation_kind::sorted_order: return "sorted-order";
    case violation_kind::sorted_coverage: return "sorted-coverage";
  }
  return "?";
}

std::size_t validation_report::count(violation_kind const k) const {
  return static_cast<std::size_t>(
      std::count_if(begin(violations_), end(violations_),
                    [&](violation const& v) { return v.kind_ == k; }));
}

validation_report validate(timetable const& tt) {
  validation_report r;
  auto const add = [&](violation_kind const k, std::uint32_t const entity,
                       std::string msg) {
    r.violations_.push_back(violation{k, entity, std::move(msg)});
  };
  auto const n_stops = tt.n_stops();

  for (auto const& c : tt.connections()) {
    auto const i = c.idx_.v();
    if (c.from_.v() >= n_stops || c.to_.v() >= n_stops) {
      add(violation_kind::unknown_stop, i,
          "connection " + std::to_string(i) + " references an unknown stop");
      continue;
    }
    if (c.from_ == c.to_) {
      add(violation_kind::connection_same_stop, i,
          "connection " + std::to_string(i) + " departs and arrives at " +
              tt.stops()[c.from_.v()].id_);
    }
    if (c.dep_ >= c.arr_) {
      add(violation_kind::connection_time_order, i,
          "connection " + std::to_string(i) + " arrives at " +
              format_time(c.arr_) + ", not after departure " +
              format_time(c.dep_));
    }
  }

  for (auto t = 0U; t != tt.n_trips(); ++t) {
    auto const& tr = tt.trips()[t];
    auto const cons = tt.trip_connections(trip_idx_t{t});
    for (auto i = 0U; i != cons.size(); ++i) {
      if (cons[i].trip_ != trip_idx_t{t}) {
        add(violation_kind::trip_connection_mismatch, t,
            "trip " + tr.id_ + " owns a connection of another trip");
      }
      if (i == 0U) {
        continue;
      }
      if (cons[i].from_ != cons[i - 1U].to_) {
        add(violation_kind::trip_chain, t,
            "trip " + tr.id_ + " is not chained at position " +
                std::to_string(i));
      }
      if (cons[i].dep_ < cons[i - 1U].arr_) {
        add(violation_kind::trip_time_consistency, t,
            "trip " + tr.id_ + " departs position " + std::to_string(i) +
                " at " + format_time(cons[i].dep_) + " before arriving at " +
                format_time(cons[i - 1U].arr_));
      }
    }
  }

  for (auto s = 0U; s != n_stops; ++s) {
    auto const from = stop_idx_t{s};
    auto has_loop = false;
    for (auto const& f : tt.footpaths_from(from)) {
      if (f.duration_ < 0) {
        add(violation_kind::footpath_negative, s,
            "footpath " + tt.stops()[s].id_ + " -> " +
                std::to_string(f.to_.v()) + " has negative duration");
      }
      if (f.to_.v() >= n_stops) {
        add(violation_kind::unknown_stop, s,
            "footpath from " + tt.stops()[s].id_ + " to unknown stop");
        continue;
      }
      has_loop = has_loop || f.to_ == from;
    }
    if (!has_loop) {
      add(violation_kind::missing_loop, s,
          "stop " + tt.stops()[s].id_ + " has no loop footpath");
    }
  }

  // a -> b -> c must be matched by a -> c with d(a,c) <= d(a,b) + d(b,c).
  // Loops are transfer buffers, not walks; they are excluded.
  std::set<std::pair<std::uint32_t, std::uint32_t>> reported;
  for (auto const& ab : tt.footpaths()) {
    if (ab.from_ == ab.to_ || ab.to_.v() >= n_stops) {
      continue;
    }
    for (auto const& bc : tt.footpaths_from(ab.to_)) {
      if (bc.to_ == bc.from_ || bc.to_ == ab.from_ || bc.to_.v() >= n_stops) {
        continue;
      }
      auto const key = std::pair{ab.from_.v(), bc.to_.v()};
      if (reported.contains(key)) {
        continue;
      }
      auto const ac = tt.walk(ab.from_, bc.to_);
      if (!ac.has_value()) {
        reported.insert(key);
        add(violation_kind::footpath_transitive_closure, ab.from_.v(),
            "footpaths " + tt.stops()[ab.from_.v()].id_ + " -> " +
                tt.stops()[ab.to_.v()].id_ + " -> " +
                tt.stops()[bc.to_.v()].id_ + " without direct footpath");
      } else if (*ac > ab.duration_ + bc.duration_) {
        reported.insert(key);
        add(violation_kind::footpath_triangle_inequality, ab.from_.v(),
            "footpath " + tt.stops()[ab.from_.v()].id_ + " -> " +
                tt.stops()[bc.to_.v()].id_ + " longer than the detour via " +
                tt.stops()[ab.to_.v()].id_);
      }
    }
  }

  auto const sorted = tt.sorted();
  for (auto i = 1U; i < sorted.size(); ++i) {
    if (departs_before(sorted[i], sorted[i - 1U])) {
      add(violation_kind::sorted_order, i,
          "sorted connection array out of order at " + std::to_string(i));
    }
  }
  auto covered = std::vector<std::uint32_t>(tt.n_connections(), 0U);
  auto coverage_ok = sorted.size() == tt.n_connections();
  for (auto const& c : sorted) {
    if (c.idx_.v() >= covered.size() || c != tt.connections()[c.idx_.v()]) {
      coverage_ok = false;
      break;
    }
    ++covered[c.idx_.v()];
  }
  coverage_ok = coverage_ok && std::all_of(begin(covered), end(covered),
                                           [](auto const n) { return n == 1U; });
  if (!coverage_ok) {
    add(violation_kind::sorted_coverage, 0U,
        "sorted connection array is not a permutation of all trip "
        "connections");
  }

  return r;
}

}  // namespace replan
