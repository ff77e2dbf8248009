#include <gtest/gtest.h>

#include "replan/delay.h"
#include "replan/error.h"

#include "support/random_instance.h"
#include "support/toy.h"

using namespace replan;
using namespace replan::test;

namespace {

// n single-hop trips of one mode departing at `dep`.
void add_trips(timetable_builder& b, stop_idx_t const a, stop_idx_t const z,
               transport_mode const mode, timestamp const dep, int const n,
               std::string const& prefix) {
  for (auto i = 0; i != n; ++i) {
    auto const ev = std::array{stop_time{a, dep, dep}, stop_time{z, dep + 300, dep + 300}};
    b.add_trip(prefix + std::to_string(i), ev, mode);
  }
}

double mean_delay(delay_feed const& f, timetable const& tt, std::string const& prefix) {
  auto sum = 0.0;
  auto n = 0U;
  for (auto const& e : f.realized()) {
    if (tt.trips()[e.trip_.v()].id_.starts_with(prefix)) {
      sum += e.delay_;
      ++n;
    }
  }
  return sum / n;
}

}  // namespace

TEST(sampler, deterministic_per_seed) {
  std::mt19937_64 rng{1};
  auto const tt = random_timetable(rng);
  auto const a = sample_delays(tt, {}, 5);
  auto const b = sample_delays(tt, {}, 5);
  auto const c = sample_delays(tt, {}, 6);
  EXPECT_TRUE(std::equal(begin(a.realized()), end(a.realized()),
                         begin(b.realized()), end(b.realized())));
  EXPECT_FALSE(std::equal(begin(a.realized()), end(a.realized()),
                          begin(c.realized()), end(c.realized())));
  EXPECT_NO_THROW(check_feed(tt, a));
  for (auto const& e : a.realized()) {
    EXPECT_GE(e.delay_, 30);
  }
}

TEST(sampler, means_follow_mode_and_period) {
  timetable_builder b;
  auto const a = b.add_stop("a");
  auto const z = b.add_stop("z");
  add_trips(b, a, z, transport_mode::fully_separated, hm(3, 0), 4000, "fo");
  add_trips(b, a, z, transport_mode::mixed_traffic, hm(3, 0), 4000, "mo");
  add_trips(b, a, z, transport_mode::mixed_traffic, hm(8, 0), 4000, "mp");
  auto const tt = std::move(b).build();
  delay_params p;
  p.peak_windows_ = peak_profile{{time_window{hm(7, 0), hm(9, 0)}}};
  auto const f = sample_delays(tt, p, 1);
  // Retained delays are 30 s + Exp(mean) by memorylessness.
  EXPECT_NEAR(mean_delay(f, tt, "fo"), 120.0 + 30.0, 0.06 * 150.0);
  EXPECT_NEAR(mean_delay(f, tt, "mo"), 300.0 + 30.0, 0.06 * 330.0);
  EXPECT_NEAR(mean_delay(f, tt, "mp"), 600.0 + 30.0, 0.06 * 630.0);
}

TEST(sampler, peak_profile_from_counts) {
  timetable_builder b;
  auto const a = b.add_stop("a");
  auto const z = b.add_stop("z");
  for (auto h = 0; h != 10; ++h) {
    add_trips(b, a, z, transport_mode::mixed_traffic, h * 3600 + 60,
              h == 7 || h == 8 ? 30 : 10, "h" + std::to_string(h) + "_");
  }
  auto const tt = std::move(b).build();
  auto const p = peak_profile_from_timetable(tt, 1.25);
  ASSERT_EQ(p.windows_.size(), 1U);
  EXPECT_EQ(p.windows_[0].from_, hm(7, 0));
  EXPECT_EQ(p.windows_[0].to_, hm(9, 0));
  EXPECT_EQ(classify_period(hm(8, 59), p), period::peak);
  EXPECT_EQ(classify_period(hm(9, 0), p), period::off_peak);
}

TEST(sampler, rejects_non_positive_mean) {
  auto const tt = make_toy();
  delay_params p;
  p.mean_s_[0][1] = 0.0;
  try {
    sample_delays(tt, p, 1);
    FAIL();
  } catch (error const& e) {
    EXPECT_EQ(e.kind(), error_kind::config);
  }
  std::mt19937_64 rng{1};
  EXPECT_THROW(draw_exponential(rng, -1.0), error);
}

TEST(sampler, event_times_lie_in_trip_timeframe) {
  std::mt19937_64 rng{4};
  auto const tt = random_timetable(rng);
  auto const f = sample_delays(tt, {}, 77);
  for (auto const& e : f.realized()) {
    auto const cs = tt.trip_connections(e.trip_);
    EXPECT_GE(e.time_, cs.front().dep_);
    EXPECT_LE(e.time_, cs.back().arr_);
  }
}
