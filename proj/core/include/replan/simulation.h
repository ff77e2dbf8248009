#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "replan/delay.h"
#include "replan/replanner.h"
#include "replan/tig.h"

namespace replan {

enum class strategy : std::uint8_t { sp, sr, jdr, dr_pull, dr_push };

constexpr std::size_t kNumStrategies = 5U;

char const* to_string(strategy);

// Accepts "SP", "SR", "JDR", "DR_PULL", "DR_PUSH" (case-insensitive).
strategy parse_strategy(std::string_view);

struct query {
  std::uint32_t id_{0};
  stop_idx_t from_;
  stop_idx_t to_;
  timestamp time_{0};
};

// Everything shared (read-only) by the workers of one experiment.
struct sim_env {
  sim_env(timetable const&, time_independent_graph const&, delay_feed const&);

  timetable const& tt_;
  time_independent_graph const& tig_;
  delay_feed const& feed_;
  delayed_view realized_;
  std::vector<connection> realized_sorted_;
  timestamp end_of_day_;  // last realized arrival
  std::vector<std::vector<trip_idx_t>> trips_by_route_;
};

struct sim_result {
  bool stranded() const { return !arrival_.has_value(); }

  std::uint32_t query_id_{0};
  strategy strategy_{strategy::sp};
  std::optional<timestamp> arrival_;

  std::size_t steps_{0};  // connections ridden + final walk
  std::size_t boardings_{0};
  std::size_t misses_{0};
  std::size_t repairs_{0};  // same-route repairs (SP/SR)
  std::size_t repair_failures_{0};  // repair fell back to a snapshot replan

  std::size_t decisions_{0};  // planner consultations after the origin
  std::size_t journey_delayed_{0};
  std::size_t envelope_delayed_{0};
  std::size_t neither_delayed_{0};

  std::size_t plans_{0};  // journeys computed (any kind)
  replan_stats stats_;
  std::vector<con_idx_t> executed_;
};

// Runs one query end to end. Planners see the delays known at the current
// time; boarding, riding and arrival use the realized times.
sim_result simulate(strategy, query const&, sim_env const&, replan_context&);

// n_pairs distinct random (origin, destination) pairs, each crossed with
// every departure time, keeping only pairs that can reach the destination
// under the realized delays for all departure times. Query ids are
// pair-major. Throws error_kind::infeasible after `max_attempts` draws.
std::vector<query> generate_queries(sim_env const&, std::size_t n_pairs,
                                    std::span<timestamp const> departure_times,
                                    std::uint64_t seed,
                                    std::size_t max_attempts = 0U);

}  // namespace replan
