#include "replan/csa.h"

#include <algorithm>
#include <stdexcept>

#include "replan/error.h"

namespace replan {

csa_solver::csa_solver(timetable const& tt)
    : tt_{tt},
      stops_(tt.n_stops(), label{}),
      trips_(tt.n_trips(), trip_label{}),
      scan_pos_(tt.n_connections(), 0U),
      scan_stamp_(tt.n_connections(), 0U) {}

csa_solver::label& csa_solver::stop_label(stop_idx_t const s) {
  auto& l = stops_[s.v()];
  if (l.stamp_ != stamp_) {
    l = label{.ready_ = kInfinity,
              .best_ = kInfinity,
              .vehicle_ = kInfinity,
              .ready_ptr_ = con_idx_t::invalid(),
              .best_ptr_ = con_idx_t::invalid(),
              .stamp_ = stamp_};
  }
  return l;
}

csa_solver::label const* csa_solver::find_label(stop_idx_t const s) const {
  auto const& l = stops_[s.v()];
  return l.stamp_ == stamp_ ? &l : nullptr;
}

csa_solver::trip_label* csa_solver::find_trip(trip_idx_t const t) {
  auto& l = trips_[t.v()];
  return l.stamp_ == stamp_ ? &l : nullptr;
}

void csa_solver::set_scan_pos(con_idx_t const c, std::uint32_t const pos) {
  scan_pos_[c.v()] = pos;
  scan_stamp_[c.v()] = stamp_;
}

timestamp csa_solver::arrival(stop_idx_t const s) const {
  if (!s.valid() || s.v() >= stops_.size()) {
    throw error{error_kind::invalid_argument, "stop id out of range"};
  }
  auto const* l = find_label(s);
  return l == nullptr ? kInfinity : l->best_;
}

csa_result csa_solver::solve(std::span<connection const> const sorted,
                             source const& src, stop_idx_t const target,
                             bool const extract_journey) {
  if (!src.stop_.valid() || src.stop_.v() >= tt_.n_stops() ||
      (target.valid() && target.v() >= tt_.n_stops())) {
    throw error{error_kind::invalid_argument, "stop id out of range"};
  }
  if (src.on_.valid() && src.on_.v() >= tt_.n_connections()) {
    throw error{error_kind::invalid_argument, "connection id out of range"};
  }

  if (++stamp_ == 0U) {
    for (auto& l : stops_) {
      l.stamp_ = 0U;
    }
    for (auto& l : trips_) {
      l.stamp_ = 0U;
    }
    std::fill(begin(scan_stamp_), end(scan_stamp_), 0U);
    stamp_ = 1U;
  }

  csa_result result;

  auto& origin = stop_label(src.stop_);
  origin.best_ = src.time_;
  origin.ready_ = src.time_;
  if (src.needs_transfer()) {
    auto const loop = tt_.walk(src.stop_, src.stop_).value_or(0);
    origin.ready_ = std::max(src.time_, src.arrived_ + loop);
  }
  for (auto const& f : tt_.footpaths_from(src.stop_)) {
    if (f.to_ != src.stop_) {
      auto& l = stop_label(f.to_);
      l.ready_ = std::min(l.ready_, src.time_ + f.duration_);
      l.best_ = std::min(l.best_, src.time_ + f.duration_);
    }
  }
  if (src.on_.valid()) {
    trips_[tt_.connections()[src.on_.v()].trip_.v()] =
        trip_label{.enter_ = con_idx_t::invalid(), .stamp_ = stamp_};
  }

  auto const target_arrival = [&]() {
    auto const* l = target.valid() ? find_label(target) : nullptr;
    return l == nullptr ? kInfinity : l->best_;
  };

  auto const first = std::lower_bound(
      begin(sorted), end(sorted), src.time_,
      [](connection const& c, timestamp const t) { return c.dep_ < t; });
  auto bound = target_arrival();
  for (auto it = first; it != end(sorted); ++it) {
    auto const& c = *it;
    if (target.valid() && c.dep_ >= bound) {
      break;
    }
    ++result.scanned_;

    if (find_trip(c.trip_) == nullptr) {
      auto const* l = find_label(c.from_);
      if (l == nullptr || l->ready_ > c.dep_) {
        continue;
      }
      trips_[c.trip_.v()] = trip_label{.enter_ = c.idx_, .stamp_ = stamp_};
    }
    set_scan_pos(c.idx_, static_cast<std::uint32_t>(it - begin(sorted)));

    auto& to = stop_label(c.to_);
    if (c.arr_ >= to.vehicle_) {
      continue;
    }
    to.vehicle_ = c.arr_;
    if (c.arr_ < to.best_) {
      to.best_ = c.arr_;
      to.best_ptr_ = c.idx_;
    }
    for (auto const& f : tt_.footpaths_from(c.to_)) {
      auto const t = c.arr_ + f.duration_;
      auto& l = f.to_ == c.to_ ? to : stop_label(f.to_);
      if (t < l.ready_) {
        l.ready_ = t;
        l.ready_ptr_ = c.idx_;
      }
      if (f.to_ != c.to_ && t < l.best_) {
        l.best_ = t;
        l.best_ptr_ = c.idx_;
      }
    }
    bound = target_arrival();
  }

  if (!target.valid()) {
    return result;
  }
  result.arrival_ = target_arrival();
  if (result.reachable() && extract_journey) {
    result.journey_ = extract(sorted, src, target);
  }
  return result;
}

journey csa_solver::extract(std::span<connection const> const sorted,
                            source const& src, stop_idx_t const target) const {
  journey j{.from_ = src, .to_ = target, .connections_ = {},
            .arrival_ = find_label(target)->best_};
  if (target == src.stop_) {
    j.arrival_ = src.time_;
    return j;
  }

  auto const scanned = [&](std::uint32_t const idx) -> connection const& {
    if (scan_stamp_[idx] != stamp_) {
      throw std::logic_error{"csa: journey uses an unscanned connection"};
    }
    return sorted[scan_pos_[idx]];
  };

  auto ptr = find_label(target)->best_ptr_;
  while (ptr.valid()) {
    auto const& exit = tt_.connections()[ptr.v()];
    auto const& tl = trips_[exit.trip_.v()];
    if (tl.stamp_ != stamp_) {
      throw std::logic_error{"csa: journey pointer to an unboarded trip"};
    }
    auto const first = tl.enter_.valid() ? tl.enter_.v() : src.on_.v() + 1U;
    for (auto idx = exit.idx_.v() + 1U; idx-- != first;) {
      j.connections_.push_back(scanned(idx));
    }
    if (!tl.enter_.valid()) {
      break;
    }
    auto const* l = find_label(tt_.connections()[tl.enter_.v()].from_);
    ptr = l == nullptr ? con_idx_t::invalid() : l->ready_ptr_;
  }
  std::reverse(begin(j.connections_), end(j.connections_));
  return j;
}

}  // namespace replan
