#include <gtest/gtest.h>

#include "replan/replanner.h"

#include "support/toy.h"

using namespace replan;
using namespace replan::test;

namespace {

struct fixture {
  timetable tt_ = make_toy();
  time_independent_graph g_ = time_independent_graph::build(tt_);
  replan_context ctx_{tt_, g_};

  connection con(int const trip, int const pos) const {
    return tt_.trip_connections(toy_trip(trip))[static_cast<std::size_t>(pos)];
  }
};

// t3 is 5 minutes late from 08:05 on: the s5 transfer from t1 becomes
// feasible and the arrival improves from 08:40 to 08:30.
delay_feed scenario2_feed() {
  return delay_feed{{delay_event{toy_trip(3), hm(8, 5), 300}}};
}

}  // namespace

TEST(replanner, pull_example1) {
  fixture f;
  auto const view = apply_delays(f.tt_, example1_feed(), hm(8, 0));
  auto const r = pull_replan(f.ctx_, view, source::at_origin(toy_stop(1), hm(8, 0)),
                             toy_stop(6), true);
  EXPECT_EQ(r.csa_.arrival_, hm(8, 25));
  ASSERT_TRUE(r.envelope_.has_value());
  EXPECT_EQ(r.envelope_->td(), hm(8, 25));
  for (auto const& c : r.csa_.journey_->connections_) {
    EXPECT_TRUE(r.envelope_->contains(c.idx_));
  }
}

TEST(replanner, first_push_call_is_server_call) {
  fixture f;
  auto const feed = example1_feed();
  push_replanner p{f.ctx_, feed, toy_stop(6)};
  auto const s = p.step(source::at_origin(toy_stop(1), hm(8, 0)));
  EXPECT_EQ(s.scenario_, scenario::server_call);
  ASSERT_TRUE(s.journey_.has_value());
  EXPECT_EQ(s.journey_->arrival_, hm(8, 25));
  auto const a = next_action(std::nullopt, *s.journey_, f.tt_);
  EXPECT_EQ(a.kind_, action_kind::board);
  ASSERT_TRUE(a.connection_.has_value());
  EXPECT_EQ(a.connection_->idx_, f.con(1, 0).idx_);
  EXPECT_EQ(p.stats().server_calls_, 1U);
  EXPECT_EQ(p.stats().pushed_bytes_, 24U + 16U * p.current_envelope().size());
}

TEST(replanner, envelope_delay_triggers_local_replan) {
  fixture f;
  auto const feed = scenario2_feed();
  push_replanner p{f.ctx_, feed, toy_stop(6)};
  auto const first = p.step(source::at_origin(toy_stop(1), hm(8, 0)));
  ASSERT_TRUE(first.journey_.has_value());
  EXPECT_EQ(first.journey_->arrival_, hm(8, 40));
  EXPECT_EQ(p.current_envelope().size(), 8U);

  auto const second = p.step(source::on_board(f.con(1, 0)));  // at s3, 08:10
  EXPECT_EQ(second.scenario_, scenario::envelope_replan);
  EXPECT_FALSE(second.journey_delayed_);
  EXPECT_TRUE(second.envelope_delayed_);
  ASSERT_TRUE(second.journey_.has_value());
  EXPECT_EQ(second.journey_->arrival_, hm(8, 30));
  EXPECT_EQ(p.stats().server_calls_, 1U);
  EXPECT_EQ(p.stats().local_replans_, 1U);
  // Initial envelope plus one update with t3's two member connections.
  EXPECT_EQ(p.stats().pushed_bytes_, (24U + 8U * 16U) + (24U + 2U * 16U));
  EXPECT_EQ(p.stats().pushed_messages_, 2U);
}

TEST(replanner, journey_delay_only_mode_ignores_envelope) {
  fixture f;
  auto const feed = scenario2_feed();
  push_replanner p{f.ctx_, feed, toy_stop(6), false};
  p.step(source::at_origin(toy_stop(1), hm(8, 0)));
  auto const second = p.step(source::on_board(f.con(1, 0)));
  EXPECT_EQ(second.scenario_, scenario::none);
  EXPECT_TRUE(second.envelope_delayed_);
  EXPECT_EQ(second.journey_->arrival_, hm(8, 40));
}

TEST(replanner, delayed_journey_triggers_server_call) {
  fixture f;
  // t1 is 5 minutes late from 08:05 on: the planned arrival slips.
  auto const feed = delay_feed{{delay_event{toy_trip(1), hm(8, 5), 300}}};
  push_replanner p{f.ctx_, feed, toy_stop(6)};
  p.step(source::at_origin(toy_stop(1), hm(8, 0)));
  auto c = f.con(1, 0);
  auto const second = p.step(source::on_board(c));
  EXPECT_EQ(second.scenario_, scenario::server_call);
  EXPECT_TRUE(second.journey_delayed_);
  EXPECT_EQ(second.journey_->arrival_, hm(8, 45));
  EXPECT_EQ(p.stats().server_calls_, 2U);
}

TEST(replanner, nothing_new_keeps_journey) {
  fixture f;
  delay_feed const none;
  push_replanner p{f.ctx_, none, toy_stop(6)};
  auto const first = p.step(source::at_origin(toy_stop(1), hm(8, 0)));
  auto const second = p.step(source::on_board(f.con(1, 0)));
  EXPECT_EQ(second.scenario_, scenario::none);
  ASSERT_TRUE(second.journey_.has_value());
  EXPECT_EQ(second.journey_->connections_.size(), 3U);
  EXPECT_EQ(second.journey_->connections_.front().idx_, f.con(1, 1).idx_);
  EXPECT_EQ(p.stats().pushed_messages_, 1U);
}

TEST(replanner, journey_is_delayed_cases) {
  fixture f;
  journey j{.from_ = source::on_board(f.con(1, 0)),
            .to_ = toy_stop(6),
            .connections_ = {f.con(1, 1), f.con(1, 2), f.con(1, 3)},
            .arrival_ = hm(8, 40)};
  EXPECT_FALSE(journey_is_delayed(j, hm(8, 40), f.tt_, f.tt_));
  EXPECT_TRUE(journey_is_delayed(j, hm(8, 39), f.tt_, f.tt_));
  auto const view = apply_delays(
      f.tt_, std::vector{delay_event{toy_trip(1), hm(8, 0), 60}});
  EXPECT_TRUE(journey_is_delayed(j, hm(8, 40), f.tt_, view));

  // A transfer broken by a delay of the feeder.
  auto const v2 = apply_delays(f.tt_, example1_feed().realized());
  journey k{.from_ = source::at_origin(toy_stop(1), hm(8, 0)),
            .to_ = toy_stop(6),
            .connections_ = {v2.get(f.con(1, 0).idx_), v2.get(f.con(2, 1).idx_),
                             v2.get(f.con(2, 2).idx_)},
            .arrival_ = hm(8, 25)};
  EXPECT_FALSE(journey_is_delayed(k, hm(8, 25), f.tt_, v2));
  auto const v3 = apply_delays(
      f.tt_, std::vector{delay_event{toy_trip(1), hm(8, 0), 120},
                         delay_event{toy_trip(2), hm(8, 0), 600}});
  EXPECT_TRUE(journey_is_delayed(k, hm(8, 25), f.tt_, v3));
}

TEST(replanner, next_action_kinds) {
  fixture f;
  journey j{.from_ = source::on_board(f.con(1, 0)),
            .to_ = toy_stop(6),
            .connections_ = {f.con(1, 1)},
            .arrival_ = hm(8, 20)};
  EXPECT_EQ(next_action(f.con(1, 0), j, f.tt_).kind_, action_kind::stay);
  EXPECT_EQ(next_action(f.con(1, 0), j, f.tt_, true).kind_, action_kind::transfer);

  auto const v = apply_delays(f.tt_, example1_feed().realized());
  journey t{.from_ = source::on_board(f.con(1, 0)),
            .to_ = toy_stop(6),
            .connections_ = {v.get(f.con(2, 1).idx_)},
            .arrival_ = hm(8, 20)};
  auto const a = next_action(f.con(1, 0), t, f.tt_);
  EXPECT_EQ(a.kind_, action_kind::transfer);
  EXPECT_EQ(a.connection_->trip_, toy_trip(2));

  journey done{.from_ = source::at_origin(toy_stop(6), hm(8, 40)), .to_ = toy_stop(6)};
  EXPECT_EQ(next_action(f.con(1, 3), done, f.tt_).kind_, action_kind::arrived);
  EXPECT_STREQ(to_string(action_kind::board), "BOARD");
}

TEST(replanner, walk_to_destination) {
  timetable_builder b;
  auto const a = b.add_stop("a");
  auto const z = b.add_stop("z");
  b.add_footpath(a, z, 120);
  b.add_footpath(a, a, 0);
  b.add_footpath(z, z, 0);
  auto const tt = std::move(b).build();
  journey j{.from_ = source::at_origin(a, 0), .to_ = z, .arrival_ = 120};
  auto const act = next_action(std::nullopt, j, tt);
  EXPECT_EQ(act.kind_, action_kind::walk_to_destination);
  ASSERT_TRUE(act.walk_.has_value());
  EXPECT_EQ(act.walk_->duration_, 120);
}
