#include "replan/journey.h"

#include <algorithm>

#include "replan/error.h"

namespace replan {

std::size_t journey::transfers() const {
  auto n = 0U;
  for (auto i = 1U; i < connections_.size(); ++i) {
    n += connections_[i].trip_ != connections_[i - 1U].trip_ ? 1U : 0U;
  }
  return n;
}

std::optional<timestamp> ready_time(timetable const& tt, source const& src,
                                    stop_idx_t const s) {
  if (s == src.stop_) {
    if (!src.needs_transfer()) {
      return src.time_;
    }
    auto const loop = tt.walk(s, s).value_or(0);
    return std::max(src.time_, src.arrived_ + loop);
  }
  auto const w = tt.walk(src.stop_, s);
  if (!w.has_value()) {
    return std::nullopt;
  }
  return src.time_ + *w;
}

namespace {

void check_ids(journey const& j, timetable const& tt) {
  auto const in_range = [&](stop_idx_t const s) {
    return s.valid() && s.v() < tt.n_stops();
  };
  if (!in_range(j.from_.stop_) || !in_range(j.to_)) {
    throw error{error_kind::invalid_argument, "journey stop id out of range"};
  }
  if (j.from_.on_.valid() && j.from_.on_.v() >= tt.n_connections()) {
    throw error{error_kind::invalid_argument,
                "journey source connection out of range"};
  }
  for (auto const& c : j.connections_) {
    if (!c.idx_.valid() || c.idx_.v() >= tt.n_connections()) {
      throw error{error_kind::invalid_argument,
                  "journey connection id out of range"};
    }
    auto const& base = tt.connections()[c.idx_.v()];
    if (base.trip_ != c.trip_ || base.from_ != c.from_ || base.to_ != c.to_) {
      throw error{error_kind::invalid_argument,
                  "journey connection " + std::to_string(c.idx_.v()) +
                      " does not match the timetable"};
    }
  }
}

}  // namespace

bool journey_is_valid(journey const& j, timetable const& tt,
                      connection_lookup const& times) {
  if (!j.to_.valid() && j.connections_.empty()) {
    return true;
  }
  check_ids(j, tt);

  if (j.connections_.empty()) {
    return j.from_.stop_ == j.to_ ||
           tt.walk(j.from_.stop_, j.to_).has_value();
  }

  auto prev = std::optional<connection>{};
  if (j.from_.on_.valid()) {
    prev = times.get(j.from_.on_);
  }
  for (auto i = 0U; i != j.connections_.size(); ++i) {
    auto const c = times.get(j.connections_[i].idx_);
    if (prev.has_value() && prev->trip_ == c.trip_ &&
        (i != 0U || !j.from_.alighted_)) {
      if (tt.position(c.idx_) != tt.position(prev->idx_) + 1U) {
        return false;
      }
    } else if (i == 0U) {
      auto const ready = ready_time(tt, j.from_, c.from_);
      if (!ready.has_value() || *ready > c.dep_) {
        return false;
      }
    } else {
      auto const w = tt.walk(prev->to_, c.from_);
      if (!w.has_value() || prev->arr_ + *w > c.dep_) {
        return false;
      }
    }
    prev = c;
  }

  return prev->to_ == j.to_ || tt.walk(prev->to_, j.to_).has_value();
}

bool journey_is_valid(journey const& j, timetable const& tt) {
  return journey_is_valid(j, tt, static_cast<connection_lookup const&>(tt));
}

timestamp arrival_under(journey const& j, timetable const& tt,
                        connection_lookup const& times) {
  if (j.connections_.empty()) {
    if (j.from_.stop_ == j.to_) {
      return j.from_.time_;
    }
    auto const w = tt.walk(j.from_.stop_, j.to_);
    return w.has_value() ? j.from_.time_ + *w : kInfinity;
  }
  auto const last = times.get(j.connections_.back().idx_);
  if (last.to_ == j.to_) {
    return last.arr_;
  }
  auto const w = tt.walk(last.to_, j.to_);
  return w.has_value() ? last.arr_ + *w : kInfinity;
}

}  // namespace replan
