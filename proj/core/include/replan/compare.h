#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "replan/delay.h"
#include "replan/simulation.h"

namespace replan {

constexpr duration kDefaultStrandedPenalty = 90 * 60;

// One (query, strategy) outcome in flat form: what results.csv stores.
struct result_row {
  std::uint32_t query_id_{0};
  std::string from_;
  std::string to_;
  timestamp departure_{0};
  strategy strategy_{strategy::sp};
  std::optional<timestamp> arrival_;

  std::size_t steps_{0};
  std::size_t boardings_{0};
  std::size_t misses_{0};
  std::size_t repairs_{0};
  std::size_t repair_failures_{0};
  std::size_t decisions_{0};
  std::size_t journey_delayed_{0};
  std::size_t envelope_delayed_{0};
  std::size_t neither_delayed_{0};
  std::size_t plans_{0};
  std::size_t server_calls_{0};
  std::size_t local_replans_{0};
  std::size_t envelope_builds_{0};
  std::size_t envelope_size_initial_{0};
  std::size_t envelope_size_max_{0};
  double envelope_size_mean_{0.0};
  std::size_t pushed_bytes_{0};
  std::size_t pushed_messages_{0};
  std::size_t scanned_server_{0};
  std::size_t scanned_edge_{0};

  // Wall clock (timings.csv only).
  std::int64_t server_ns_{0};
  std::int64_t edge_ns_{0};
};

result_row to_row(sim_result const&, query const&, timetable const&);

struct diff_stats {
  std::size_t n_{0};
  std::size_t affected_{0};  // arrivals differ
  std::size_t reference_later_{0};  // reference strategy arrives later
  double affected_pct_{0.0};
  double mean_diff_s_{0.0};  // over all queries
  double mean_diff_affected_s_{0.0};
  std::map<int, double> quantiles_s_;  // percent -> diff, affected only
};

// Arrival differences "other - reference" (positive: the reference saves
// time). A stranded side arrives `penalty` after the other side.
struct pair_comparison {
  strategy reference_{strategy::dr_push};
  strategy other_{strategy::sp};
  diff_stats all_;
  std::map<timestamp, diff_stats> by_departure_;
  std::map<period, diff_stats> by_period_;
};

std::vector<pair_comparison> compare(std::span<result_row const>,
                                     strategy reference, peak_profile const&,
                                     duration penalty = kDefaultStrandedPenalty);

// Strategy used as reference: DR_PUSH if present, else DR_PULL, else the
// first strategy found.
std::optional<strategy> reference_strategy(std::span<result_row const>);

struct strategy_summary {
  std::size_t n_{0};
  std::size_t stranded_{0};
  double mean_travel_time_s_{0.0};  // arriving queries only
  double mean_effective_travel_time_s_{0.0};  // stranded penalized
  double mean_decisions_{0.0};
  double mean_server_calls_{0.0};
  double mean_local_replans_{0.0};
  double mean_pushed_bytes_{0.0};
  double mean_scanned_{0.0};
  double median_envelope_size_{0.0};  // initial envelope, push strategies
  double mean_journey_delayed_pct_{0.0};  // of decisions, queries with any
  double mean_envelope_delayed_pct_{0.0};
  double mean_neither_delayed_pct_{0.0};
  double mean_misses_{0.0};
  double mean_repairs_{0.0};
  std::size_t repair_failures_{0};
};

// Effective travel time of a row: stranded rows count as the reference's
// arrival (or the end of the service day) plus the penalty.
std::map<strategy, strategy_summary> summarize(
    std::span<result_row const>, timestamp end_of_day,
    duration penalty = kDefaultStrandedPenalty);

}  // namespace replan
