#include "replan/delay.h"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "replan/error.h"
#include "replan/timetable_io.h"

namespace replan {

namespace {

constexpr auto kNoSlot = std::numeric_limits<std::uint32_t>::max();

bool event_before(delay_event const& a, delay_event const& b) {
  return std::tie(a.time_, a.trip_) < std::tie(b.time_, b.trip_);
}

}  // namespace

delay_feed::delay_feed(std::vector<delay_event> events)
    : events_{std::move(events)} {
  std::stable_sort(begin(events_), end(events_), event_before);
}

std::span<delay_event const> delay_feed::known_at(timestamp const t) const {
  auto const it = std::upper_bound(
      begin(events_), end(events_), t,
      [](timestamp const x, delay_event const& e) { return x < e.time_; });
  return std::span{events_}.first(
      static_cast<std::size_t>(it - begin(events_)));
}

void check_feed(timetable const& tt, delay_feed const& feed) {
  std::vector<timestamp> last(tt.n_trips(), std::numeric_limits<timestamp>::min());
  for (auto const& e : feed.realized()) {
    if (!e.trip_.valid() || e.trip_.v() >= tt.n_trips()) {
      throw error{error_kind::validation,
                  "delay event references unknown trip " +
                      std::to_string(e.trip_.v())};
    }
    auto const& id = tt.trips()[e.trip_.v()].id_;
    if (e.delay_ < 0) {
      throw error{error_kind::validation,
                  "delay event on trip " + id + " has negative delay"};
    }
    auto const cons = tt.trip_connections(e.trip_);
    if (cons.empty() || e.time_ < cons.front().dep_ ||
        e.time_ > cons.back().arr_) {
      throw error{error_kind::validation,
                  "delay event on trip " + id + " at " + format_time(e.time_) +
                      " lies outside the trip's timeframe"};
    }
    if (e.time_ <= last[e.trip_.v()]) {
      throw error{error_kind::validation,
                  "delay events on trip " + id +
                      " must have strictly increasing times"};
    }
    last[e.trip_.v()] = e.time_;
  }
}

void delayed_trip_times(std::span<connection const> const scheduled,
                        std::span<delay_event const> const trip_events,
                        std::vector<connection>& out) {
  out.assign(begin(scheduled), end(scheduled));
  auto next = std::size_t{0};
  auto delay = duration{0};
  for (auto i = 0U; i != out.size(); ++i) {
    auto const& c = scheduled[i];
    while (next != trip_events.size() && trip_events[next].time_ <= c.dep_) {
      delay = trip_events[next].delay_;
      ++next;
    }
    auto dep = c.dep_ + delay;
    if (i != 0U) {
      dep = std::max(dep, out[i - 1U].arr_);
    }
    out[i].dep_ = dep;
    out[i].arr_ = dep + c.travel_time();
  }
}

delayed_view::delayed_view(timetable const& tt)
    : tt_{&tt}, slot_(tt.n_trips(), kNoSlot) {}

std::vector<trip_idx_t> delayed_view::add(
    std::span<delay_event const> const events) {
  std::vector<trip_idx_t> touched;
  for (auto const& e : events) {
    if (!e.trip_.valid() || e.trip_.v() >= tt_->n_trips()) {
      throw error{error_kind::invalid_argument,
                  "delay event references unknown trip " +
                      std::to_string(e.trip_.v())};
    }
    auto& slot = slot_[e.trip_.v()];
    if (slot == kNoSlot) {
      slot = static_cast<std::uint32_t>(delayed_.size());
      delayed_.push_back(e.trip_);
      events_.emplace_back();
      times_.emplace_back();
    }
    auto& evs = events_[slot];
    if (std::find(begin(touched), end(touched), e.trip_) == end(touched)) {
      touched.push_back(e.trip_);
    }
    evs.insert(std::upper_bound(begin(evs), end(evs), e, event_before), e);
  }
  for (auto const t : touched) {
    recompute(t);
  }
  return touched;
}

void delayed_view::recompute(trip_idx_t const t) {
  auto const slot = slot_[t.v()];
  delayed_trip_times(tt_->trip_connections(t), events_[slot], times_[slot]);
}

connection delayed_view::get(con_idx_t const c) const {
  auto const& base = tt_->connections()[c.v()];
  auto const slot = slot_[base.trip_.v()];
  if (slot == kNoSlot) {
    return base;
  }
  return times_[slot][c.v() - tt_->trips()[base.trip_.v()].first_.v()];
}

std::span<connection const> delayed_view::trip_connections(
    trip_idx_t const t) const {
  auto const slot = slot_[t.v()];
  return slot == kNoSlot ? tt_->trip_connections(t)
                         : std::span<connection const>{times_[slot]};
}

bool delayed_view::is_delayed(trip_idx_t const t) const {
  return slot_[t.v()] != kNoSlot;
}

delayed_view apply_delays(timetable const& tt,
                          std::span<delay_event const> const events) {
  delayed_view v{tt};
  v.add(events);
  return v;
}

delayed_view apply_delays(timetable const& tt, delay_feed const& feed,
                          timestamp const now) {
  return apply_delays(tt, feed.known_at(now));
}

std::vector<connection> sorted_connections_updated(delayed_view const& v) {
  auto const& tt = v.tt();
  if (v.delayed_trips().empty()) {
    return {begin(tt.sorted()), end(tt.sorted())};
  }
  std::vector<connection> moved;
  for (auto const t : v.delayed_trips()) {
    auto const cons = v.trip_connections(t);
    moved.insert(end(moved), begin(cons), end(cons));
  }
  std::sort(begin(moved), end(moved), departs_before);

  std::vector<connection> out;
  out.reserve(tt.n_connections());
  auto m = begin(moved);
  for (auto const& c : tt.sorted()) {
    if (v.is_delayed(c.trip_)) {
      continue;
    }
    while (m != end(moved) && departs_before(*m, c)) {
      out.push_back(*m++);
    }
    out.push_back(c);
  }
  out.insert(end(out), m, end(moved));
  return out;
}

void write_feed(std::filesystem::path const& p, timetable const& tt,
                delay_feed const& feed) {
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out{p, std::ios::trunc};
  if (!out) {
    throw error{error_kind::config, "cannot write " + p.string()};
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "# timetable %016" PRIx64 "\n",
                fingerprint(tt));
  out << buf << "trip_id,tau_delta_seconds,delta_seconds\n";
  for (auto const& e : feed.realized()) {
    out << tt.trips()[e.trip_.v()].id_ << ',' << e.time_ << ',' << e.delay_
        << '\n';
  }
}

feed_file parse_feed(std::string_view const content, timetable const& tt,
                     std::string const& name) {
  feed_file f;
  std::vector<delay_event> events;
  auto line_no = std::size_t{0};
  auto pos = std::size_t{0};
  auto const parse_int = [&](std::string_view const s) {
    auto v = std::int32_t{};
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw error{error_kind::parse, name + " line " + std::to_string(line_no) +
                                         ": bad number \"" + std::string{s} +
                                         "\""};
    }
    return v;
  };
  while (pos < content.size()) {
    auto const end = content.find('\n', pos);
    auto line = content.substr(
        pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? content.size() : end + 1U;
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.empty()) {
      continue;
    }
    if (line.starts_with('#')) {
      constexpr auto kTag = std::string_view{"# timetable "};
      if (line.starts_with(kTag)) {
        auto h = std::uint64_t{};
        auto const hex = line.substr(kTag.size());
        auto const [ptr, ec] =
            std::from_chars(hex.data(), hex.data() + hex.size(), h, 16);
        if (ec != std::errc{} || ptr != hex.data() + hex.size()) {
          throw error{error_kind::parse,
                      name + " line " + std::to_string(line_no) +
                          ": bad timetable fingerprint"};
        }
        f.timetable_fingerprint_ = h;
      }
      continue;
    }
    if (line.starts_with("trip_id,")) {
      continue;
    }
    auto const c2 = line.rfind(',');
    auto const c1 = c2 == std::string_view::npos || c2 == 0U
                        ? std::string_view::npos
                        : line.rfind(',', c2 - 1U);
    if (c1 == std::string_view::npos) {
      throw error{error_kind::parse, name + " line " + std::to_string(line_no) +
                                         ": expected trip_id,time,delay"};
    }
    auto const trip_id = line.substr(0, c1);
    auto const trip = tt.find_trip(trip_id);
    if (!trip.has_value()) {
      throw error{error_kind::validation,
                  name + " line " + std::to_string(line_no) +
                      ": unknown trip_id " + std::string{trip_id}};
    }
    events.push_back(
        delay_event{.trip_ = *trip,
                    .time_ = parse_int(line.substr(c1 + 1U, c2 - c1 - 1U)),
                    .delay_ = parse_int(line.substr(c2 + 1U))});
  }
  f.feed_ = delay_feed{std::move(events)};
  check_feed(tt, f.feed_);
  return f;
}

feed_file read_feed(std::filesystem::path const& p, timetable const& tt) {
  std::ifstream in{p, std::ios::binary};
  if (!in) {
    throw error{error_kind::parse, "cannot open " + p.string()};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_feed(ss.str(), tt, p.filename().string());
}

std::uint64_t fingerprint(delay_feed const& feed, timetable const& tt) {
  std::string text;
  for (auto const& e : feed.realized()) {
    text += tt.trips()[e.trip_.v()].id_;
    text += ',' + std::to_string(e.time_) + ',' + std::to_string(e.delay_) + '\n';
  }
  return fnv1a_text(text);
}

}  // namespace replan
