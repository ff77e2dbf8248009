#include "oracle/enumerate.h"

#include <vector>

namespace replan::test {

namespace {

struct enumerator {
  void board_from(stop_idx_t const s, timestamp const t) {
    for (auto const& c : cs_) {
      if (c.from_ == s && c.dep_ >= t && c.dep_ <= td_) {
        ride(c);
      }
    }
  }

  void ride(connection const& c) {
    if (c.arr_ > td_ || count_ >= limit_) {
      return;
    }
    path_.push_back(c);
    if (c.to_ == to_) {
      emit(c.arr_);
    }
    for (auto const& f : tt_.footpaths()) {
      if (f.from_ != c.to_) {
        continue;
      }
      auto const t = c.arr_ + f.duration_;
      if (f.to_ != c.to_ && f.to_ == to_ && t <= td_) {
        emit(t);
      }
      board_from(f.to_, t);
    }
    auto const next = c.idx_.v() + 1U;
    if (next < cs_.size() && cs_[next].trip_ == c.trip_) {
      ride(cs_[next]);
    }
    path_.pop_back();
  }

  void emit(timestamp const arrival) {
    if (count_ < limit_) {
      ++count_;
      fn_(path_, arrival);
    }
  }

  timetable const& tt_;
  std::vector<connection> cs_;
  stop_idx_t to_;
  timestamp td_;
  std::function<void(std::span<connection const>, timestamp)> const& fn_;
  std::size_t limit_;
  std::size_t count_{0};
  std::vector<connection> path_;
};

}  // namespace

std::size_t enumerate_journeys(
    timetable const& tt, connection_lookup const& times, stop_idx_t const from,
    timestamp const tq, stop_idx_t const to, timestamp const td,
    std::function<void(std::span<connection const>, timestamp)> const& fn,
    std::size_t const limit) {
  enumerator e{.tt_ = tt, .cs_ = {}, .to_ = to, .td_ = td, .fn_ = fn,
               .limit_ = limit};
  for (auto i = 0U; i != tt.n_connections(); ++i) {
    e.cs_.push_back(times.get(con_idx_t{i}));
  }
  if (from == to && tq <= td) {
    e.emit(tq);
  }
  e.board_from(from, tq);
  for (auto const& f : tt.footpaths()) {
    if (f.from_ == from && f.to_ != from) {
      auto const t = tq + f.duration_;
      if (f.to_ == to && t <= td) {
        e.emit(t);
      }
      e.board_from(f.to_, t);
    }
  }
  return e.count_;
}

}  // namespace replan::test
