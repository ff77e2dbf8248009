#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "replan/csa.h"
#include "replan/delay.h"
#include "replan/envelope.h"
#include "replan/journey.h"
#include "replan/tig.h"

namespace replan {

enum class action_kind : std::uint8_t {
  board,  // first boarding (possibly after walking from the origin)
  stay,  // continue on the current trip
  transfer,  // walk (or loop) and board another trip, one committed step
  walk_to_destination,
  arrived,
};

char const* to_string(action_kind);

struct action {
  action_kind kind_{action_kind::arrived};
  std::optional<connection> connection_{};
  std::optional<footpath> walk_{};
};

// `prev` is the connection the traveller arrived on (none at the origin);
// `alighted` marks a traveller who has left that vehicle. Throws
// std::logic_error when no case applies.
action next_action(std::optional<connection> const& prev, journey const&,
                   timetable const&, bool alighted = false);

// Per-worker scratch shared by the planners.
class replan_context {
public:
  replan_context(timetable const& tt, time_independent_graph const& g)
      : tt_{tt}, g_{g}, csa_{tt}, search_{tt.n_stops()} {}

  timetable const& tt_;
  time_independent_graph const& g_;
  csa_solver csa_;
  duration_search search_;
};

struct pull_result {
  csa_result csa_;
  std::optional<envelope> envelope_;
};

// Server-side full replan on the delay-updated timetable: sort, CSA and,
// optionally, the envelope bounded by the found arrival.
pull_result pull_replan(replan_context&, delayed_view const& view,
                        source const&, stop_idx_t target, bool with_envelope);

// True iff a transfer of the residual journey (including the one from the
// traveller's current position to its head) is broken under `current`, or
// the arrival at the destination is later than `planned_arrival`.
bool journey_is_delayed(journey const&, timestamp planned_arrival,
                        timetable const&, connection_lookup const& current);

enum class scenario : std::uint8_t {
  server_call,  // first call or journey delayed
  envelope_replan,  // envelope changed, journey intact
  none,  // nothing relevant changed
};

char const* to_string(scenario);

struct replan_stats {
  std::size_t server_calls_{0};
  std::size_t local_replans_{0};
  std::size_t envelope_builds_{0};
  std::size_t scanned_server_{0};
  std::size_t scanned_edge_{0};
  std::size_t pushed_bytes_{0};
  std::size_t pushed_messages_{0};
  std::int64_t server_ns_{0};
  std::int64_t edge_ns_{0};
  std::vector<std::size_t> envelope_sizes_;  // after each build or update
};

struct push_step {
  scenario scenario_{scenario::none};
  bool journey_delayed_{false};
  bool envelope_delayed_{false};
  std::optional<journey> journey_;  // none: destination unreachable
};

// Push loop: keeps the current journey and its envelope, applies newly
// known delays to the envelope and replans on the envelope or via the
// server as needed. With `envelope_replanning` off, envelope changes never
// trigger a replan (journey-delayed replanning only).
class push_replanner {
public:
  push_replanner(replan_context&, delay_feed const&, stop_idx_t target,
                 bool envelope_replanning = true);

  // Called at every decision point. If the traveller just rode the head of
  // the current journey (src.on_), it is removed first.
  push_step step(source const& src);

  envelope const& current_envelope() const { return env_; }
  replan_stats const& stats() const { return stats_; }

private:
  void server_call(source const&, push_step&);

  replan_context& ctx_;
  delay_feed const& feed_;
  stop_idx_t target_;
  bool envelope_replanning_;
  delayed_view known_;
  std::size_t n_known_{0};
  std::optional<journey> journey_;
  timestamp planned_arrival_{kInfinity};
  envelope env_;
  bool first_{true};
  replan_stats stats_;
};

}  // namespace replan
