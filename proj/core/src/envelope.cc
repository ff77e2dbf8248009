#include "replan/envelope.h"

#include <algorithm>

#include "replan/error.h"

#include "binary.h"

namespace replan {

namespace {

bool by_index(connection const& a, connection const& b) {
  return a.idx_ < b.idx_;
}

}  // namespace

bool envelope::contains(con_idx_t const c) const {
  auto const it = std::lower_bound(
      begin(by_idx_), end(by_idx_), c,
      [](connection const& x, con_idx_t const i) { return x.idx_ < i; });
  return it != end(by_idx_) && it->idx_ == c;
}

bool envelope::qualifies(connection const& c) const {
  auto const f = fwd_[c.from_.v()];
  auto const b = bwd_[c.to_.v()];
  if (f == kUnreachable || b == kUnreachable) {
    return false;
  }
  auto const budget = static_cast<std::int64_t>(td_) - tq_;
  return static_cast<std::int64_t>(f) + c.travel_time() + b <= budget &&  // (a)
         static_cast<std::int64_t>(c.arr_) + b <= td_ &&  // (b)
         tq_ <= c.dep_;  // (c)
}

std::vector<footpath> envelope::footpaths(timetable const& tt) const {
  std::vector<bool> in(tt.n_stops(), false);
  in[from_.v()] = true;
  in[to_.v()] = true;
  for (auto const& c : by_idx_) {
    in[c.from_.v()] = true;
    in[c.to_.v()] = true;
  }
  std::vector<footpath> out;
  for (auto const& f : tt.footpaths()) {
    if (in[f.from_.v()] && in[f.to_.v()]) {
      out.push_back(f);
    }
  }
  return out;
}

void envelope::resort() {
  sorted_ = by_idx_;
  std::sort(begin(sorted_), end(sorted_), departs_before);
}

envelope build_envelope(std::span<connection const> const sorted,
                        time_independent_graph const& g,
                        duration_search& search, stop_idx_t const from,
                        stop_idx_t const to, timestamp const tq,
                        timestamp const td) {
  if (td < tq) {
    throw error{error_kind::invalid_argument,
                "envelope bound " + format_time(td) + " precedes query time " +
                    format_time(tq)};
  }
  envelope env;
  env.from_ = from;
  env.to_ = to;
  env.tq_ = tq;
  env.td_ = td;

  auto const budget = td - tq;
  search.run(g, from, search_direction::forward, budget);
  env.fwd_ = search.durations();
  search.run(g, to, search_direction::backward, budget);
  env.bwd_ = search.durations();

  auto const first = std::lower_bound(
      begin(sorted), end(sorted), tq,
      [](connection const& c, timestamp const t) { return c.dep_ < t; });
  auto const last = std::upper_bound(
      first, end(sorted), td,
      [](timestamp const t, connection const& c) { return t < c.dep_; });
  for (auto it = first; it != last; ++it) {
    if (env.qualifies(*it)) {
      env.sorted_.push_back(*it);
    }
  }
  env.by_idx_ = env.sorted_;
  std::sort(begin(env.by_idx_), end(env.by_idx_), by_index);
  return env;
}

envelope_update update_envelope(envelope& env, delayed_view const& view,
                                std::span<trip_idx_t const> const trips) {
  envelope_update u;
  std::vector<connection> added;
  for (auto const t : trips) {
    for (auto const& c : view.trip_connections(t)) {
      auto const it = std::lower_bound(begin(env.by_idx_), end(env.by_idx_), c,
                                       by_index);
      if (it != end(env.by_idx_) && it->idx_ == c.idx_) {
        if (it->dep_ != c.dep_ || it->arr_ != c.arr_) {
          *it = c;
          ++u.retimed_;
          u.records_.push_back(c);
        }
      } else if (env.qualifies(c)) {
        added.push_back(c);
        ++u.added_;
        u.records_.push_back(c);
      }
    }
  }
  if (!added.empty()) {
    env.by_idx_.insert(end(env.by_idx_), begin(added), end(added));
    std::sort(begin(env.by_idx_), end(env.by_idx_), by_index);
  }
  if (u.changed()) {
    env.resort();
  }
  return u;
}

namespace {

std::vector<std::uint8_t> encode(char const (&magic)[5], envelope const& env,
                                 std::span<connection const> const records) {
  detail::writer w;
  for (auto i = 0U; i != 4U; ++i) {
    w.put(magic[i]);
  }
  w.put(env.from().v());
  w.put(env.to().v());
  w.put(env.tq());
  w.put(env.td());
  w.put(static_cast<std::uint32_t>(records.size()));
  for (auto const& c : records) {
    w.put(c.idx_.v());
    w.put(c.trip_.v());
    w.put(c.dep_);
    w.put(c.arr_);
  }
  return std::move(w.buf());
}

}  // namespace

std::vector<std::uint8_t> encode_envelope(envelope const& env) {
  return encode("ENV1", env, env.sorted());
}

std::vector<std::uint8_t> encode_update(envelope const& env,
                                        envelope_update const& u) {
  return encode("ENVU", env, u.records_);
}

envelope_message decode_envelope_message(
    std::span<std::uint8_t const> const bytes, timetable const& tt) {
  detail::reader r{bytes, "envelope message"};
  char magic[4];
  for (auto& ch : magic) {
    ch = r.get<char>();
  }
  auto const m = std::string_view{magic, 4U};
  if (m != "ENV1" && m != "ENVU") {
    throw error{error_kind::parse, "envelope message: bad magic"};
  }
  envelope_message msg;
  msg.update_ = m == "ENVU";
  msg.from_ = stop_idx_t{r.get<std::uint32_t>()};
  msg.to_ = stop_idx_t{r.get<std::uint32_t>()};
  msg.tq_ = r.get<timestamp>();
  msg.td_ = r.get<timestamp>();
  auto const n = r.get<std::uint32_t>();
  for (auto i = 0U; i != n; ++i) {
    auto const idx = r.get<std::uint32_t>();
    auto const trip = r.get<std::uint32_t>();
    auto const dep = r.get<timestamp>();
    auto const arr = r.get<timestamp>();
    if (idx >= tt.n_connections() ||
        tt.connections()[idx].trip_.v() != trip) {
      throw error{error_kind::invalid_argument,
                  "envelope message: connection does not match timetable"};
    }
    auto c = tt.connections()[idx];
    c.dep_ = dep;
    c.arr_ = arr;
    msg.records_.push_back(c);
  }
  if (!r.done()) {
    throw error{error_kind::parse, "envelope message: trailing bytes"};
  }
  return msg;
}

}  // namespace replan
