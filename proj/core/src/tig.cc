#include "replan/tig.h"

#include <algorithm>
#include <functional>
#include <map>

#include "replan/error.h"

#include "binary.h"

namespace replan {

namespace {

constexpr char kMagic[4] = {'R', 'P', 'T', 'G'};
constexpr std::uint32_t kVersion = 1U;

std::vector<std::uint32_t> offsets(std::span<tig_edge const> const edges,
                                   std::size_t const n,
                                   stop_idx_t tig_edge::*key) {
  std::vector<std::uint32_t> off(n + 1U, 0U);
  for (auto const& e : edges) {
    ++off[(e.*key).v() + 1U];
  }
  for (auto i = 1U; i < off.size(); ++i) {
    off[i] += off[i - 1U];
  }
  return off;
}

}  // namespace

time_independent_graph time_independent_graph::from_edges(
    std::size_t const n_stops, std::vector<tig_edge> edges) {
  time_independent_graph g;
  std::sort(begin(edges), end(edges), [](tig_edge const& a, tig_edge const& b) {
    return std::tie(a.from_, a.to_) < std::tie(b.from_, b.to_);
  });
  g.out_ = std::move(edges);
  g.out_offsets_ = offsets(g.out_, n_stops, &tig_edge::from_);
  g.in_ = g.out_;
  std::sort(begin(g.in_), end(g.in_), [](tig_edge const& a, tig_edge const& b) {
    return std::tie(a.to_, a.from_) < std::tie(b.to_, b.from_);
  });
  g.in_offsets_ = offsets(g.in_, n_stops, &tig_edge::to_);
  return g;
}

time_independent_graph time_independent_graph::build(timetable const& tt) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, duration> w;
  auto const relax = [&](stop_idx_t const a, stop_idx_t const b,
                         duration const d) {
    if (a == b) {
      return;
    }
    auto const [it, inserted] = w.emplace(std::pair{a.v(), b.v()}, d);
    if (!inserted) {
      it->second = std::min(it->second, d);
    }
  };
  for (auto const& c : tt.connections()) {
    relax(c.from_, c.to_, c.travel_time());
  }
  for (auto const& f : tt.footpaths()) {
    relax(f.from_, f.to_, f.duration_);
  }
  std::vector<tig_edge> edges;
  edges.reserve(w.size());
  for (auto const& [k, d] : w) {
    edges.push_back(tig_edge{stop_idx_t{k.first}, stop_idx_t{k.second}, d});
  }
  return from_edges(tt.n_stops(), std::move(edges));
}

std::span<tig_edge const> time_independent_graph::out(stop_idx_t const s) const {
  return std::span{out_}.subspan(out_offsets_[s.v()],
                                 out_offsets_[s.v() + 1U] - out_offsets_[s.v()]);
}

std::span<tig_edge const> time_independent_graph::in(stop_idx_t const s) const {
  return std::span{in_}.subspan(in_offsets_[s.v()],
                                in_offsets_[s.v() + 1U] - in_offsets_[s.v()]);
}

std::optional<duration> time_independent_graph::weight(
    stop_idx_t const from, stop_idx_t const to) const {
  auto const o = out(from);
  auto const it = std::lower_bound(
      begin(o), end(o), to,
      [](tig_edge const& e, stop_idx_t const s) { return e.to_ < s; });
  if (it == end(o) || it->to_ != to) {
    return std::nullopt;
  }
  return it->weight_;
}

std::vector<std::uint8_t> time_independent_graph::serialize(
    std::uint64_t const timetable_fingerprint) const {
  detail::writer w;
  for (auto const ch : kMagic) {
    w.put(ch);
  }
  w.put(kVersion);
  w.put(timetable_fingerprint);
  w.put(static_cast<std::uint32_t>(n_stops()));
  w.put(static_cast<std::uint32_t>(out_.size()));
  for (auto const& e : out_) {
    w.put(e.from_.v());
    w.put(e.to_.v());
    w.put(e.weight_);
  }
  return std::move(w.buf());
}

time_independent_graph time_independent_graph::deserialize(
    std::span<std::uint8_t const> const bytes,
    std::uint64_t const expected_fingerprint) {
  detail::reader r{bytes, "TIG cache"};
  for (auto const ch : kMagic) {
    if (r.get<char>() != ch) {
      throw error{error_kind::parse, "TIG cache: bad magic"};
    }
  }
  if (r.get<std::uint32_t>() != kVersion) {
    throw error{error_kind::fingerprint,
                "TIG cache: unsupported version; re-run precompute"};
  }
  if (r.get<std::uint64_t>() != expected_fingerprint) {
    throw error{error_kind::fingerprint,
                "TIG cache was built from a different timetable; re-run "
                "precompute"};
  }
  auto const n_stops = r.get<std::uint32_t>();
  auto const n_edges = r.get<std::uint32_t>();
  std::vector<tig_edge> edges;
  edges.reserve(n_edges);
  for (auto i = 0U; i != n_edges; ++i) {
    auto const from = r.get<std::uint32_t>();
    auto const to = r.get<std::uint32_t>();
    auto const weight = r.get<duration>();
    if (from >= n_stops || to >= n_stops) {
      throw error{error_kind::parse, "TIG cache: stop id out of range"};
    }
    edges.push_back(tig_edge{stop_idx_t{from}, stop_idx_t{to}, weight});
  }
  if (!r.done()) {
    throw error{error_kind::parse, "TIG cache: trailing bytes"};
  }
  return from_edges(n_stops, std::move(edges));
}

void write_tig(std::filesystem::path const& p, time_independent_graph const& g,
               std::uint64_t const timetable_fingerprint) {
  detail::write_file(p, g.serialize(timetable_fingerprint));
}

time_independent_graph read_tig(std::filesystem::path const& p,
                                std::uint64_t const expected_fingerprint) {
  return time_independent_graph::deserialize(detail::read_file(p),
                                             expected_fingerprint);
}

duration_search::duration_search(std::size_t const n_stops)
    : dist_(n_stops, kUnreachable), stamp_(n_stops, 0U) {}

void duration_search::run(time_independent_graph const& g, stop_idx_t const root,
                          search_direction const dir, duration const bound) {
  if (!root.valid() || root.v() >= dist_.size()) {
    throw error{error_kind::invalid_argument, "stop id out of range"};
  }
  if (++current_ == 0U) {
    std::fill(begin(stamp_), end(stamp_), 0U);
    current_ = 1U;
  }
  settled_ = 0U;

  auto const get = [&](std::uint32_t const s) {
    return stamp_[s] == current_ ? dist_[s] : kUnreachable;
  };
  auto const cmp = std::greater<>{};
  heap_.clear();
  dist_[root.v()] = 0;
  stamp_[root.v()] = current_;
  heap_.emplace_back(0, root.v());
  while (!heap_.empty()) {
    std::pop_heap(begin(heap_), end(heap_), cmp);
    auto const [d, u] = heap_.back();
    heap_.pop_back();
    if (d != get(u)) {
      continue;
    }
    ++settled_;
    auto const edges = dir == search_direction::forward ? g.out(stop_idx_t{u})
                                                        : g.in(stop_idx_t{u});
    for (auto const& e : edges) {
      auto const v = (dir == search_direction::forward ? e.to_ : e.from_).v();
      auto const nd = static_cast<std::int64_t>(d) + e.weight_;
      if (nd > bound || nd >= get(v)) {
        continue;
      }
      dist_[v] = static_cast<duration>(nd);
      stamp_[v] = current_;
      heap_.emplace_back(dist_[v], v);
      std::push_heap(begin(heap_), end(heap_), cmp);
    }
  }
}

duration duration_search::operator[](stop_idx_t const s) const {
  return stamp_[s.v()] == current_ ? dist_[s.v()] : kUnreachable;
}

std::vector<duration> duration_search::durations() const {
  std::vector<duration> out(dist_.size());
  for (auto i = 0U; i != out.size(); ++i) {
    out[i] = (*this)[stop_idx_t{i}];
  }
  return out;
}

}  // namespace replan
