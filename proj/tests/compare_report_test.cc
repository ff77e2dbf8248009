#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "replan/compare.h"
#include "replan/error.h"
#include "replan/report.h"

#include "support/toy.h"

using namespace replan;
using namespace replan::test;
using json = nlohmann::json;

namespace {

result_row row(std::uint32_t const id, strategy const s, timestamp const dep,
               std::optional<timestamp> const arr) {
  result_row r;
  r.query_id_ = id;
  r.from_ = "s1";
  r.to_ = "s6";
  r.departure_ = dep;
  r.strategy_ = s;
  r.arrival_ = arr;
  r.decisions_ = 4;
  r.journey_delayed_ = 1;
  r.envelope_delayed_ = 1;
  r.neither_delayed_ = 2;
  r.server_ns_ = 2'000'000;
  r.edge_ns_ = 500'000;
  if (s == strategy::dr_push) {
    r.envelope_builds_ = 1;
    r.envelope_size_initial_ = 8;
    r.envelope_size_max_ = 8;
    r.envelope_size_mean_ = 8.0;
    r.pushed_bytes_ = 24 + 16 * 8;
    r.pushed_messages_ = 1;
  }
  return r;
}

}  // namespace

TEST(compare, example1_saving) {
  auto const rows = std::vector{row(0, strategy::sp, hm(8, 0), hm(8, 40)),
                                row(0, strategy::dr_push, hm(8, 0), hm(8, 25))};
  auto const cmp = compare(rows, strategy::dr_push, {});
  ASSERT_EQ(cmp.size(), 1U);
  EXPECT_EQ(cmp[0].other_, strategy::sp);
  EXPECT_EQ(cmp[0].all_.n_, 1U);
  EXPECT_EQ(cmp[0].all_.affected_, 1U);
  EXPECT_DOUBLE_EQ(cmp[0].all_.affected_pct_, 100.0);
  EXPECT_DOUBLE_EQ(cmp[0].all_.mean_diff_s_, 900.0);
  EXPECT_DOUBLE_EQ(cmp[0].all_.quantiles_s_.at(50), 900.0);
  EXPECT_EQ(cmp[0].all_.reference_later_, 0U);
}

TEST(compare, identical_arrivals) {
  auto const rows = std::vector{row(0, strategy::sp, hm(8, 0), hm(8, 40)),
                                row(0, strategy::dr_push, hm(8, 0), hm(8, 40)),
                                row(1, strategy::sp, hm(9, 0), std::nullopt),
                                row(1, strategy::dr_push, hm(9, 0), std::nullopt)};
  auto const cmp = compare(rows, strategy::dr_push, {});
  ASSERT_EQ(cmp.size(), 1U);
  EXPECT_EQ(cmp[0].all_.affected_, 0U);
  EXPECT_DOUBLE_EQ(cmp[0].all_.affected_pct_, 0.0);
  EXPECT_TRUE(cmp[0].all_.quantiles_s_.empty());
  EXPECT_EQ(cmp[0].by_departure_.size(), 2U);
}

TEST(compare, stranded_penalty_is_symmetric) {
  auto const rows = std::vector{row(0, strategy::sp, hm(8, 0), std::nullopt),
                                row(0, strategy::dr_push, hm(8, 0), hm(8, 25)),
                                row(1, strategy::sp, hm(8, 0), hm(8, 30)),
                                row(1, strategy::dr_push, hm(8, 0), std::nullopt)};
  auto const cmp = compare(rows, strategy::dr_push, {}, 5400);
  ASSERT_EQ(cmp.size(), 1U);
  EXPECT_EQ(cmp[0].all_.affected_, 2U);
  EXPECT_EQ(cmp[0].all_.reference_later_, 1U);
  EXPECT_DOUBLE_EQ(cmp[0].all_.mean_diff_s_, 0.0);
  EXPECT_DOUBLE_EQ(cmp[0].all_.quantiles_s_.at(10), -5400.0);
  EXPECT_DOUBLE_EQ(cmp[0].all_.quantiles_s_.at(90), 5400.0);

  auto const sum = summarize(rows, hm(23, 0), 5400);
  EXPECT_EQ(sum.at(strategy::sp).stranded_, 1U);
  // SP: 30 min arrived, stranded counts as 08:25 + 90 min.
  EXPECT_DOUBLE_EQ(sum.at(strategy::sp).mean_effective_travel_time_s_,
                   (1800.0 + 1500.0 + 5400.0) / 2.0);
  // DR_PUSH stranded on the reference itself: end of day + penalty.
  EXPECT_DOUBLE_EQ(sum.at(strategy::dr_push).mean_effective_travel_time_s_,
                   (1500.0 + (hm(23, 0) + 5400.0 - hm(8, 0))) / 2.0);
  EXPECT_DOUBLE_EQ(sum.at(strategy::dr_push).mean_travel_time_s_, 1500.0);
}

TEST(compare, by_period) {
  peak_profile const peaks{{time_window{hm(7, 0), hm(9, 0)}}};
  auto const rows = std::vector{row(0, strategy::sp, hm(8, 0), hm(8, 40)),
                                row(0, strategy::dr_push, hm(8, 0), hm(8, 25)),
                                row(1, strategy::sp, hm(10, 0), hm(10, 40)),
                                row(1, strategy::dr_push, hm(10, 0), hm(10, 40))};
  auto const cmp = compare(rows, strategy::dr_push, peaks);
  ASSERT_EQ(cmp.size(), 1U);
  EXPECT_EQ(cmp[0].by_period_.at(period::peak).affected_, 1U);
  EXPECT_EQ(cmp[0].by_period_.at(period::off_peak).affected_, 0U);
}

TEST(compare, reference_choice) {
  EXPECT_EQ(reference_strategy(std::vector{row(0, strategy::sp, 0, 1),
                                           row(0, strategy::dr_pull, 0, 1)}),
            strategy::dr_pull);
  EXPECT_EQ(reference_strategy(std::vector{row(0, strategy::jdr, 0, 1)}),
            strategy::jdr);
  EXPECT_FALSE(reference_strategy(std::vector<result_row>{}).has_value());
}

TEST(report, results_csv_roundtrip) {
  auto rows = std::vector{row(0, strategy::sp, hm(8, 0), hm(8, 40)),
                          row(0, strategy::dr_push, hm(8, 0), std::nullopt)};
  rows[1].envelope_size_mean_ = 8.25;
  std::ostringstream out;
  write_results_csv(out, rows);
  auto const parsed = parse_results_csv(out.str(), "results.csv");
  ASSERT_EQ(parsed.size(), 2U);
  EXPECT_EQ(parsed[0].arrival_, hm(8, 40));
  EXPECT_FALSE(parsed[1].arrival_.has_value());
  EXPECT_EQ(parsed[1].strategy_, strategy::dr_push);
  EXPECT_EQ(parsed[1].pushed_bytes_, rows[1].pushed_bytes_);
  EXPECT_DOUBLE_EQ(parsed[1].envelope_size_mean_, 8.25);
  EXPECT_EQ(parsed[0].server_ns_, 0);  // timings live in their own file

  std::ostringstream t;
  write_timings_csv(t, rows);
  auto with_timings = parsed;
  merge_timings_csv(t.str(), "timings.csv", with_timings);
  EXPECT_EQ(with_timings[0].server_ns_, 2'000'000);
  EXPECT_EQ(with_timings[1].edge_ns_, 500'000);

  EXPECT_THROW(parse_results_csv("query_id\n1\n", "bad.csv"), error);
}

TEST(report, summary_lists_strategies_run) {
  auto const rows = std::vector{row(0, strategy::sp, hm(8, 0), hm(8, 40)),
                                row(0, strategy::dr_push, hm(8, 0), hm(8, 25))};
  auto const j = json::parse(summary_json(rows, hm(23, 0), {}, 5400));
  ASSERT_TRUE(j.contains("strategies"));
  EXPECT_EQ(j["strategies"].size(), 2U);
  EXPECT_TRUE(j["strategies"].contains("SP"));
  EXPECT_TRUE(j["strategies"].contains("DR_PUSH"));
  EXPECT_FALSE(j["strategies"].contains("DR_PULL"));
  EXPECT_EQ(summary_json(rows, hm(23, 0), {}, 5400),
            summary_json(rows, hm(23, 0), {}, 5400));
}

TEST(report, runtime_table_has_speedup) {
  auto rows = std::vector{row(0, strategy::dr_pull, hm(8, 0), hm(8, 25)),
                          row(0, strategy::dr_push, hm(8, 0), hm(8, 25))};
  rows[0].server_ns_ = 10'000'000;
  rows[0].edge_ns_ = 0;
  std::ostringstream out;
  write_runtime_by_departure_csv(out, rows);
  auto const text = out.str();
  auto const header = text.substr(0, text.find('\n'));
  EXPECT_NE(header.find("speedup"), std::string::npos) << header;
  auto const j = json::parse(timing_summary_json(rows));
  ASSERT_TRUE(j.contains("pull_over_push_speedup"));
  EXPECT_NEAR(j["pull_over_push_speedup"].get<double>(), 4.0, 1e-9);
}

TEST(report, write_and_read_run) {
  auto const dir = std::filesystem::temp_directory_path() / "replan_report_test";
  std::filesystem::remove_all(dir);
  auto const rows = std::vector{row(0, strategy::sp, hm(8, 0), hm(8, 40)),
                                row(0, strategy::dr_push, hm(8, 0), hm(8, 25))};
  write_report(dir, rows, hm(23, 0), {}, 5400);
  for (auto const* f : {"results.csv", "timings.csv", "summary.json",
                        "timing_summary.json", "runtime_by_departure.csv",
                        "savings_by_departure.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  run_manifest m;
  m.config_hash_ = "00000000000000ff";
  m.strategies_ = {strategy::sp, strategy::dr_push};
  m.n_queries_ = 1;
  m.end_of_day_ = hm(23, 0);
  std::ofstream{dir / "manifest.json"} << to_json(m);
  auto const loaded = read_run(dir);
  ASSERT_EQ(loaded.rows_.size(), 2U);
  EXPECT_EQ(loaded.rows_[1].server_ns_, 2'000'000);
  EXPECT_EQ(loaded.manifest_.config_hash_, m.config_hash_);
  EXPECT_EQ(loaded.manifest_.strategies_, m.strategies_);
  std::filesystem::remove_all(dir);
}
