#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "replan/compare.h"

namespace replan {

constexpr char const* kArtifactVersion = "0.1.0";

// Describes one simulate run. Everything except the wall-clock stamps is a
// function of the inputs.
struct run_manifest {
  std::string config_hash_;  // FNV-1a of the normalized config, hex
  std::string dataset_fingerprint_;  // timetable fingerprint, hex
  std::string feed_fingerprint_;  // FNV-1a of the realized feed, hex
  std::uint64_t delay_seed_{0};
  std::uint64_t query_seed_{0};
  std::string version_{kArtifactVersion};
  std::string started_;  // ISO-8601 UTC
  std::string finished_;
  timestamp end_of_day_{0};
  duration penalty_{kDefaultStrandedPenalty};
  peak_profile peaks_;
  std::vector<strategy> strategies_;
  std::size_t n_queries_{0};
};

std::string to_json(run_manifest const&);
run_manifest parse_manifest(std::string const& json);

// results.csv: one row per (query, strategy), no wall-clock columns.
void write_results_csv(std::ostream&, std::span<result_row const>);
std::vector<result_row> parse_results_csv(std::string_view content,
                                          std::string const& name);

// timings.csv: query_id,strategy,server_ns,edge_ns.
void write_timings_csv(std::ostream&, std::span<result_row const>);
// Fills server_ns_/edge_ns_ of matching rows.
void merge_timings_csv(std::string_view content, std::string const& name,
                       std::span<result_row>);

// Aggregates keyed by strategy, strategy pair, departure time and period.
// Deterministic for fixed rows.
std::string summary_json(std::span<result_row const>, timestamp end_of_day,
                         peak_profile const&, duration penalty);

// Mean server/edge time per strategy and the pull/push ratio.
std::string timing_summary_json(std::span<result_row const>);

// departure,strategy,queries,mean_server_ms,mean_edge_ms,mean_total_ms and
// the DR_PULL / DR_PUSH ratio per departure when both ran.
void write_runtime_by_departure_csv(std::ostream&, std::span<result_row const>);

// reference,other,departure,queries,affected,affected_pct,reference_later,
// mean_diff_s,mean_diff_affected_s,p10_s..p90_s.
void write_savings_by_departure_csv(std::ostream&, std::span<result_row const>,
                                    peak_profile const&, duration penalty);

// Writes the full report set into `dir` (created if missing):
// results.csv, timings.csv, summary.json, timing_summary.json,
// runtime_by_departure.csv, savings_by_departure.csv.
void write_report(std::filesystem::path const& dir,
                  std::span<result_row const>, timestamp end_of_day,
                  peak_profile const&, duration penalty);

struct loaded_results {
  std::vector<result_row> rows_;
  run_manifest manifest_;
};

// Reads results.csv, timings.csv (optional) and manifest.json from a run
// directory.
loaded_results read_run(std::filesystem::path const& dir);

}  // namespace replan
