#include <gtest/gtest.h>

#include "replan/error.h"
#include "replan/tig.h"
#include "replan/timetable_io.h"

#include "support/random_instance.h"
#include "support/toy.h"

using namespace replan;
using namespace replan::test;

namespace {

// All-pairs lower bounds straight from the timetable (Floyd-Warshall).
std::vector<std::vector<duration>> floyd(timetable const& tt) {
  auto const n = tt.n_stops();
  auto constexpr inf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::vector<std::int64_t>> d(n, std::vector<std::int64_t>(n, inf));
  for (auto i = 0U; i != n; ++i) {
    d[i][i] = 0;
  }
  for (auto const& c : tt.connections()) {
    d[c.from_.v()][c.to_.v()] = std::min<std::int64_t>(d[c.from_.v()][c.to_.v()], c.travel_time());
  }
  for (auto const& f : tt.footpaths()) {
    if (f.from_ != f.to_) {
      d[f.from_.v()][f.to_.v()] = std::min<std::int64_t>(d[f.from_.v()][f.to_.v()], f.duration_);
    }
  }
  for (auto k = 0U; k != n; ++k) {
    for (auto i = 0U; i != n; ++i) {
      for (auto j = 0U; j != n; ++j) {
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
      }
    }
  }
  std::vector<std::vector<duration>> out(n, std::vector<duration>(n, kUnreachable));
  for (auto i = 0U; i != n; ++i) {
    for (auto j = 0U; j != n; ++j) {
      if (d[i][j] < inf) {
        out[i][j] = static_cast<duration>(d[i][j]);
      }
    }
  }
  return out;
}

}  // namespace

TEST(tig, toy_edges) {
  auto const g = time_independent_graph::build(make_toy());
  EXPECT_EQ(g.n_edges(), 9U);
  EXPECT_EQ(g.weight(toy_stop(8), toy_stop(5)), 900);
  EXPECT_EQ(g.weight(toy_stop(5), toy_stop(4)), 300);
  EXPECT_FALSE(g.weight(toy_stop(3), toy_stop(3)).has_value());
  EXPECT_FALSE(g.weight(toy_stop(6), toy_stop(4)).has_value());
  EXPECT_EQ(g.out(toy_stop(3)).size(), 2U);
  EXPECT_EQ(g.in(toy_stop(6)).size(), 2U);
}

TEST(tig, footpath_beside_connection_takes_minimum) {
  timetable_builder b;
  auto const a = b.add_stop("a");
  auto const z = b.add_stop("z");
  auto const ev = std::array{stop_time{a, 0, 0}, stop_time{z, 240, 240}};
  b.add_trip("t", ev);
  b.add_footpath(a, z, 200);
  b.add_footpath(a, a, 0);
  b.add_footpath(z, z, 0);
  auto const g = time_independent_graph::build(std::move(b).build());
  EXPECT_EQ(g.weight(a, z), 200);
}

TEST(tig, footpath_only_network) {
  timetable_builder b;
  auto const a = b.add_stop("a");
  auto const z = b.add_stop("z");
  b.add_footpath(a, z, 60);
  b.add_footpath(z, a, 60);
  auto const g = time_independent_graph::build(std::move(b).build());
  EXPECT_EQ(g.n_edges(), 2U);
}

TEST(tig, toy_durations) {
  auto const tt = make_toy();
  auto const g = time_independent_graph::build(tt);
  duration_search s{tt.n_stops()};
  s.run(g, toy_stop(1), search_direction::forward);
  EXPECT_EQ(s[toy_stop(1)], 0);
  EXPECT_EQ(s[toy_stop(3)], 600);
  EXPECT_EQ(s[toy_stop(5)], 1200);
  EXPECT_EQ(s[toy_stop(6)], 1200);
  EXPECT_EQ(s[toy_stop(2)], kUnreachable);
  EXPECT_EQ(s[toy_stop(8)], kUnreachable);
  s.run(g, toy_stop(6), search_direction::backward);
  EXPECT_EQ(s[toy_stop(4)], 300);
  EXPECT_EQ(s[toy_stop(5)], 600);
  EXPECT_EQ(s[toy_stop(3)], 600);
  EXPECT_EQ(s[toy_stop(7)], 600);
  EXPECT_EQ(s[toy_stop(8)], 1500);
  s.run(g, toy_stop(6), search_direction::forward);
  EXPECT_EQ(s[toy_stop(6)], 0);
  EXPECT_EQ(s[toy_stop(1)], kUnreachable);
}

TEST(tig, bound_cuts_search) {
  auto const tt = make_toy();
  auto const g = time_independent_graph::build(tt);
  duration_search s{tt.n_stops()};
  s.run(g, toy_stop(1), search_direction::forward, 900);
  EXPECT_EQ(s[toy_stop(3)], 600);
  EXPECT_EQ(s[toy_stop(4)], 900);  // the bound is inclusive
  s.run(g, toy_stop(1), search_direction::forward, 899);
  EXPECT_EQ(s[toy_stop(3)], 600);
  EXPECT_EQ(s[toy_stop(4)], kUnreachable);
}

TEST(tig, random_durations_match_floyd) {
  std::mt19937_64 rng{21};
  for (auto k = 0U; k != 10U; ++k) {
    instance_params p;
    p.n_stops_ = 25U;
    auto const tt = random_timetable(rng, p);
    auto const g = time_independent_graph::build(tt);
    auto const d = floyd(tt);
    duration_search s{tt.n_stops()};
    for (auto r = 0U; r != tt.n_stops(); ++r) {
      s.run(g, stop_idx_t{r}, search_direction::forward);
      for (auto x = 0U; x != tt.n_stops(); ++x) {
        EXPECT_EQ(s[stop_idx_t{x}], d[r][x]);
      }
      s.run(g, stop_idx_t{r}, search_direction::backward);
      for (auto x = 0U; x != tt.n_stops(); ++x) {
        EXPECT_EQ(s[stop_idx_t{x}], d[x][r]);
      }
    }
  }
}

TEST(tig, serialization_is_tied_to_timetable) {
  auto const tt = make_toy();
  auto const g = time_independent_graph::build(tt);
  auto const fp = fingerprint(tt);
  auto const bytes = g.serialize(fp);
  auto const back = time_independent_graph::deserialize(bytes, fp);
  EXPECT_TRUE(std::equal(begin(g.edges()), end(g.edges()), begin(back.edges()),
                         end(back.edges())));
  EXPECT_EQ(back.serialize(fp), bytes);
  try {
    time_independent_graph::deserialize(bytes, fp + 1U);
    FAIL();
  } catch (error const& e) {
    EXPECT_EQ(e.kind(), error_kind::fingerprint);
  }
}
