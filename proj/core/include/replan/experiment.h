#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "replan/compare.h"
#include "replan/delay.h"
#include "replan/gtfs.h"
#include "replan/simulation.h"
#include "replan/tig.h"

namespace replan {

struct experiment_config {
  // Dataset: a timetable cache, or a GTFS directory ingested on the fly.
  std::optional<std::filesystem::path> timetable_;
  std::optional<std::filesystem::path> gtfs_;
  gtfs_options gtfs_options_;
  std::optional<std::filesystem::path> tig_;  // built if absent

  // Delays: a feed file, or the sampler with its parameters.
  std::optional<std::filesystem::path> feed_;
  delay_params delays_;
  std::uint64_t delay_seed_{0};

  std::size_t n_pairs_{1};
  std::vector<timestamp> departure_times_;
  std::uint64_t query_seed_{0};
  std::size_t max_attempts_{0};  // 0: 1000 x n_pairs

  // Explicit queries (stop ids) replace random generation when present.
  struct fixed_query {
    std::string from_;
    std::string to_;
    timestamp time_;
  };
  std::vector<fixed_query> queries_;

  std::vector<strategy> strategies_;
  duration penalty_{kDefaultStrandedPenalty};
  std::size_t threads_{1};

  std::string canonical_json_;  // normalized input, used for the config hash
};

// Parses the JSON experiment description; relative paths are resolved
// against `base_dir`. Throws error_kind::config.
experiment_config parse_config(std::string const& json,
                               std::filesystem::path const& base_dir);
experiment_config load_config(std::filesystem::path const&);

// Sampler parameters: a JSON object with the keys of the config's "delays"
// section except "feed" and "seed".
delay_params parse_delay_params(std::string const& json);

std::string config_hash(experiment_config const&);

// Timetable, TIG, realized feed and peak windows resolved from a config.
// A TIG or feed file must match the timetable fingerprint.
struct experiment_inputs {
  timetable tt_;
  time_independent_graph tig_;
  delay_feed feed_;
  peak_profile peaks_;
};
std::unique_ptr<experiment_inputs> load_inputs(experiment_config const&);

struct experiment_result {
  std::vector<query> queries_;
  std::vector<result_row> rows_;  // sorted by (query id, strategy)
  std::vector<std::vector<con_idx_t>> executed_;  // parallel to rows_
  timestamp end_of_day_{0};
  peak_profile peaks_;
};

// Runs every strategy on every query, fanned out over `threads` workers.
// Output is independent of the thread count.
experiment_result run_experiment(sim_env const&, std::span<query const>,
                                 std::span<strategy const>, std::size_t threads,
                                 peak_profile const&);

// Fixed queries from the config, or generated ones.
std::vector<query> resolve_queries(experiment_config const&, sim_env const&);

}  // namespace replan
