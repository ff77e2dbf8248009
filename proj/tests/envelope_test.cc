#include <gtest/gtest.h>

#include "replan/csa.h"
#include "replan/envelope.h"
#include "replan/error.h"

#include "support/random_instance.h"
#include "support/toy.h"

using namespace replan;
using namespace replan::test;

namespace {

struct toy_env {
  timetable tt_ = make_toy();
  time_independent_graph g_ = time_independent_graph::build(tt_);
  duration_search search_{tt_.n_stops()};

  envelope build(timestamp const tq, timestamp const td) {
    return build_envelope(tt_.sorted(), g_, search_, toy_stop(1), toy_stop(6), tq, td);
  }
};

// Conditions (a)-(c) evaluated with plain Dijkstra-free arithmetic: lower
// bounds from a Bellman-Ford relaxation over connections and footpaths.
std::vector<std::int64_t> bellman(timetable const& tt, stop_idx_t const root,
                                  bool const forward) {
  auto constexpr inf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> d(tt.n_stops(), inf);
  d[root.v()] = 0;
  for (auto round = 0U; round != tt.n_stops(); ++round) {
    auto const relax = [&](stop_idx_t a, stop_idx_t b, std::int64_t const w) {
      if (!forward) {
        std::swap(a, b);
      }
      if (d[a.v()] + w < d[b.v()]) {
        d[b.v()] = d[a.v()] + w;
      }
    };
    for (auto const& c : tt.connections()) {
      relax(c.from_, c.to_, c.travel_time());
    }
    for (auto const& f : tt.footpaths()) {
      relax(f.from_, f.to_, f.duration_);
    }
  }
  return d;
}

}  // namespace

TEST(envelope, toy_example3) {
  toy_env t;
  auto const env = t.build(hm(8, 0), hm(8, 40));
  EXPECT_EQ(env.size(), 8U);
  for (auto const& c : t.tt_.connections()) {
    auto const excluded = (c.trip_ == toy_trip(2) && c.from_ == toy_stop(2)) ||
                          (c.trip_ == toy_trip(3) && c.from_ == toy_stop(8));
    EXPECT_EQ(env.contains(c.idx_), !excluded);
  }
  for (auto i = 1U; i < env.sorted().size(); ++i) {
    EXPECT_FALSE(departs_before(env.sorted()[i], env.sorted()[i - 1U]));
  }
}

TEST(envelope, zero_budget_and_bad_bound) {
  toy_env t;
  EXPECT_TRUE(t.build(hm(8, 0), hm(8, 0)).empty());
  try {
    t.build(hm(8, 0), hm(7, 59));
    FAIL();
  } catch (error const& e) {
    EXPECT_EQ(e.kind(), error_kind::invalid_argument);
  }
}

TEST(envelope, footpaths_restricted_to_members) {
  toy_env t;
  auto const env = t.build(hm(8, 0), hm(8, 40));
  auto const fps = env.footpaths(t.tt_);
  // Loops at the six stops touched by members (s2 and s8 are not).
  EXPECT_EQ(fps.size(), 6U);
}

TEST(envelope, brute_force_filter_monotone_and_contains_optimum) {
  std::mt19937_64 rng{31};
  for (auto k = 0U; k != 30U; ++k) {
    instance_params p;
    p.n_stops_ = 15U;
    p.n_routes_ = 8U;
    p.footpath_density_ = 0.08;
    auto const tt = random_timetable(rng, p);
    auto const g = time_independent_graph::build(tt);
    duration_search search{tt.n_stops()};
    csa_solver csa{tt};
    auto const from = stop_idx_t{uniform(rng, 0, 14)};
    auto const to = stop_idx_t{uniform(rng, 0, 14)};
    auto const tq = p.day_start_ + uniform(rng, 0, p.day_span_);
    auto const r = csa.solve(tt.sorted(), source::at_origin(from, tq), to);
    if (!r.reachable()) {
      continue;
    }
    auto const td = r.arrival_;
    auto const env = build_envelope(tt.sorted(), g, search, from, to, tq, td);
    auto const fwd = bellman(tt, from, true);
    auto const bwd = bellman(tt, to, false);
    for (auto const& c : tt.connections()) {
      auto const a = fwd[c.from_.v()] + c.travel_time() + bwd[c.to_.v()] <= td - tq;
      auto const b = c.arr_ + bwd[c.to_.v()] <= td;
      auto const cc = tq <= c.dep_;
      EXPECT_EQ(env.contains(c.idx_), a && b && cc);
    }
    for (auto const& c : r.journey_->connections_) {
      EXPECT_TRUE(env.contains(c.idx_));
    }
    auto const wider = build_envelope(tt.sorted(), g, search, from, to, tq, td + 600);
    for (auto const& c : env.sorted()) {
      EXPECT_TRUE(wider.contains(c.idx_));
    }
    // CSA restricted to the envelope finds the same arrival.
    csa_solver local{tt};
    EXPECT_EQ(local.solve(env.sorted(), source::at_origin(from, tq), to).arrival_, td);
  }
}

TEST(envelope, update_retimes_and_adds) {
  toy_env t;
  auto env = t.build(hm(8, 0), hm(8, 40));
  auto const before = env.size();
  delayed_view view{t.tt_};
  // t2 now leaves s2 after 08:00, so s2 -> s3 is still excluded (s2 is
  // unreachable from s1); s3 -> s4 and s4 -> s6 are retimed.
  auto const touched = view.add(example1_feed().realized());
  auto const u = update_envelope(env, view, touched);
  EXPECT_EQ(u.retimed_, 2U);
  EXPECT_EQ(u.added_, 0U);
  EXPECT_EQ(env.size(), before);
  for (auto const& c : env.sorted()) {
    EXPECT_EQ(c, view.get(c.idx_));
  }

  // A trip delayed so far that it leaves the budget stays a member.
  delayed_view late{t.tt_};
  auto const tr = late.add(std::vector{delay_event{toy_trip(3), hm(8, 0), 3600}});
  auto env2 = t.build(hm(8, 0), hm(8, 40));
  auto const u2 = update_envelope(env2, late, tr);
  EXPECT_EQ(env2.size(), before);
  EXPECT_EQ(u2.retimed_, 2U);
}

TEST(envelope, update_adds_connections_delayed_into_window) {
  // b -> c leaves at 07:58 (before tq) unless delayed.
  timetable_builder bld;
  auto const a = bld.add_stop("a");
  auto const b = bld.add_stop("b");
  auto const c = bld.add_stop("c");
  auto const t1 = std::array{stop_time{a, hm(8, 0), hm(8, 0)},
                             stop_time{b, hm(8, 10), hm(8, 10)}};
  auto const t2 = std::array{stop_time{b, hm(7, 58), hm(7, 58)},
                             stop_time{c, hm(8, 8), hm(8, 8)}};
  auto const t3 = std::array{stop_time{b, hm(8, 30), hm(8, 30)},
                             stop_time{c, hm(8, 40), hm(8, 40)}};
  bld.add_trip("t1", t1);
  auto const late = bld.add_trip("t2", t2);
  bld.add_trip("t3", t3);
  for (auto const s : {a, b, c}) {
    bld.add_footpath(s, s, 0);
  }
  auto const tt = std::move(bld).build();
  auto const g = time_independent_graph::build(tt);
  duration_search search{tt.n_stops()};
  auto env = build_envelope(tt.sorted(), g, search, a, c, hm(8, 0), hm(8, 40));
  EXPECT_EQ(env.size(), 2U);
  delayed_view view{tt};
  auto const touched = view.add(std::vector{delay_event{late, hm(7, 58), 900}});
  auto const u = update_envelope(env, view, touched);
  EXPECT_EQ(u.added_, 1U);
  EXPECT_EQ(env.size(), 3U);
  csa_solver csa{tt};
  EXPECT_EQ(csa.solve(env.sorted(), source::at_origin(a, hm(8, 0)), c).arrival_,
            hm(8, 23));
}

TEST(envelope, wire_encoding) {
  toy_env t;
  auto env = t.build(hm(8, 0), hm(8, 40));
  auto const bytes = encode_envelope(env);
  EXPECT_EQ(bytes.size(), kEnvelopeHeaderBytes + 8U * kEnvelopeRecordBytes);
  EXPECT_EQ(bytes.size(), 24U + 128U);
  auto const msg = decode_envelope_message(bytes, t.tt_);
  EXPECT_FALSE(msg.update_);
  EXPECT_EQ(msg.from_, toy_stop(1));
  EXPECT_EQ(msg.td_, hm(8, 40));
  ASSERT_EQ(msg.records_.size(), 8U);
  for (auto const& c : msg.records_) {
    EXPECT_EQ(c, t.tt_.connections()[c.idx_.v()]);
  }

  delayed_view view{t.tt_};
  auto const u = update_envelope(env, view, view.add(example1_feed().realized()));
  auto const ub = encode_update(env, u);
  EXPECT_EQ(ub.size(), 24U + 2U * 16U);
  auto const um = decode_envelope_message(ub, t.tt_);
  EXPECT_TRUE(um.update_);
  EXPECT_EQ(um.records_.size(), 2U);

  auto truncated = bytes;
  truncated.resize(30U);
  EXPECT_THROW(decode_envelope_message(truncated, t.tt_), error);
}
