#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "replan/timetable.h"

namespace replan {

struct tig_edge {
  friend bool operator==(tig_edge const&, tig_edge const&) = default;

  stop_idx_t from_;
  stop_idx_t to_;
  duration weight_{0};
};

// Time-independent graph: one edge per ordered pair of distinct stops linked
// by a connection or a footpath, weighted with the minimum duration among
// them.
class time_independent_graph {
public:
  static time_independent_graph build(timetable const&);

  std::size_t n_stops() const { return out_offsets_.empty() ? 0U : out_offsets_.size() - 1U; }
  std::size_t n_edges() const { return out_.size(); }

  // Edges sorted by (from, to).
  std::span<tig_edge const> edges() const { return out_; }
  std::span<tig_edge const> out(stop_idx_t) const;
  std::span<tig_edge const> in(stop_idx_t) const;  // sorted by (to, from)

  std::optional<duration> weight(stop_idx_t from, stop_idx_t to) const;

  // Binary cache tied to the timetable fingerprint.
  std::vector<std::uint8_t> serialize(std::uint64_t timetable_fingerprint) const;
  static time_independent_graph deserialize(std::span<std::uint8_t const>,
                                            std::uint64_t expected_fingerprint);

private:
  static time_independent_graph from_edges(std::size_t n_stops,
                                           std::vector<tig_edge>);

  std::vector<tig_edge> out_;
  std::vector<std::uint32_t> out_offsets_;
  std::vector<tig_edge> in_;
  std::vector<std::uint32_t> in_offsets_;
};

void write_tig(std::filesystem::path const&, time_independent_graph const&,
               std::uint64_t timetable_fingerprint);
time_independent_graph read_tig(std::filesystem::path const&,
                                std::uint64_t expected_fingerprint);

enum class search_direction : std::uint8_t { forward, backward };

// Dijkstra with query-stamped scratch. Forward: durations from the root;
// backward: durations to the root. Stops beyond `bound` are reported as
// kUnreachable. One instance per worker.
class duration_search {
public:
  explicit duration_search(std::size_t n_stops);

  void run(time_independent_graph const&, stop_idx_t root, search_direction,
           duration bound = kUnreachable);

  duration operator[](stop_idx_t) const;

  // Dense copy of the last result.
  std::vector<duration> durations() const;

  std::size_t settled() const { return settled_; }

private:
  std::vector<duration> dist_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t current_{0};
  std::size_t settled_{0};
  std::vector<std::pair<duration, std::uint32_t>> heap_;
};

}  // namespace replan
