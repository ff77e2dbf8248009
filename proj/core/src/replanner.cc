#include "replan/replanner.h"

#include <chrono>
#include <stdexcept>

#include "replan/error.h"

namespace replan {

namespace {

struct scoped_timer {
  explicit scoped_timer(std::int64_t& acc)
      : acc_{acc}, start_{std::chrono::steady_clock::now()} {}
  ~scoped_timer() {
    acc_ += std::chrono::duration_cast<std::chrono::nanoseconds>(
                std::chrono::steady_clock::now() - start_)
                .count();
  }
  scoped_timer(scoped_timer const&) = delete;
  scoped_timer& operator=(scoped_timer const&) = delete;

  std::int64_t& acc_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

char const* to_string(action_kind const k) {
  switch (k) {
    case action_kind::board: return "BOARD";
    case action_kind::stay: return "STAY";
    case action_kind::transfer: return "TRANSFER";
    case action_kind::walk_to_destination: return "WALK_TO_DESTINATION";
    case action_kind::arrived: return "ARRIVED";
  }
  return "?";
}

char const* to_string(scenario const s) {
  switch (s) {
    case scenario::server_call: return "journey_delayed";
    case scenario::envelope_replan: return "envelope_delayed";
    case scenario::none: return "neither";
  }
  return "?";
}

action next_action(std::optional<connection> const& prev, journey const& j,
                   timetable const& tt, bool const alighted) {
  if (j.connections_.empty()) {
    if (j.from_.stop_ == j.to_) {
      return action{.kind_ = action_kind::arrived};
    }
    if (auto const w = tt.walk(j.from_.stop_, j.to_); w.has_value()) {
      return action{.kind_ = action_kind::walk_to_destination,
                    .walk_ = footpath{j.from_.stop_, j.to_, *w}};
    }
    throw std::logic_error{"next_action: empty journey away from the "
                           "destination without a footpath"};
  }

  auto const& head = j.connections_.front();
  auto const walk_to_head = [&](stop_idx_t const at) -> std::optional<footpath> {
    auto const w = tt.walk(at, head.from_);
    if (!w.has_value()) {
      return std::nullopt;
    }
    return footpath{at, head.from_, *w};
  };

  if (!prev.has_value()) {
    auto const w = walk_to_head(j.from_.stop_);
    if (head.from_ != j.from_.stop_ && !w.has_value()) {
      throw std::logic_error{"next_action: first boarding is not walkable"};
    }
    return action{.kind_ = action_kind::board,
                  .connection_ = head,
                  .walk_ = head.from_ == j.from_.stop_ ? std::nullopt : w};
  }
  if (!alighted && prev->trip_ == head.trip_ &&
      tt.position(head.idx_) == tt.position(prev->idx_) + 1U) {
    return action{.kind_ = action_kind::stay, .connection_ = head};
  }
  auto const w = walk_to_head(alighted ? j.from_.stop_ : prev->to_);
  if (!w.has_value()) {
    throw std::logic_error{"next_action: transfer without footpath"};
  }
  return action{.kind_ = action_kind::transfer, .connection_ = head, .walk_ = w};
}

pull_result pull_replan(replan_context& ctx, delayed_view const& view,
                        source const& src, stop_idx_t const target,
                        bool const with_envelope) {
  if (!src.stop_.valid() || src.stop_.v() >= ctx.tt_.n_stops() ||
      !target.valid() || target.v() >= ctx.tt_.n_stops()) {
    throw error{error_kind::invalid_argument, "pull_replan: stop id out of range"};
  }
  auto const sorted = sorted_connections_updated(view);
  pull_result r;
  r.csa_ = ctx.csa_.solve(sorted, src, target);
  if (with_envelope && r.csa_.reachable()) {
    r.envelope_ = build_envelope(sorted, ctx.g_, ctx.search_, src.stop_, target,
                                 src.time_, r.csa_.arrival_);
  }
  return r;
}

bool journey_is_delayed(journey const& j, timestamp const planned_arrival,
                        timetable const& tt, connection_lookup const& current) {
  if (!j.connections_.empty()) {
    auto const head = current.get(j.connections_.front().idx_);
    auto const& src = j.from_;
    auto const riding = src.on_.valid() && !src.alighted_ &&
                        tt.connections()[src.on_.v()].trip_ == head.trip_ &&
                        tt.position(head.idx_) == tt.position(src.on_) + 1U;
    if (!riding) {
      auto const ready = ready_time(tt, src, head.from_);
      if (!ready.has_value() || *ready > head.dep_) {
        return true;
      }
    }
    for (auto i = 1U; i < j.connections_.size(); ++i) {
      auto const& a = j.connections_[i - 1U];
      auto const& b = j.connections_[i];
      if (a.trip_ == b.trip_) {
        continue;
      }
      auto const w = tt.walk(a.to_, b.from_);
      if (!w.has_value() ||
          current.get(a.idx_).arr_ + *w > current.get(b.idx_).dep_) {
        return true;
      }
    }
  }
  return arrival_under(j, tt, current) > planned_arrival;
}

push_replanner::push_replanner(replan_context& ctx, delay_feed const& feed,
                               stop_idx_t const target,
                               bool const envelope_replanning)
    : ctx_{ctx},
      feed_{feed},
      target_{target},
      envelope_replanning_{envelope_replanning},
      known_{ctx.tt_} {}

void push_replanner::server_call(source const& src, push_step& out) {
  scoped_timer t{stats_.server_ns_};
  ++stats_.server_calls_;
  auto r = pull_replan(ctx_, known_, src, target_, true);
  stats_.scanned_server_ += r.csa_.scanned_;
  out.scenario_ = scenario::server_call;
  if (!r.csa_.reachable()) {
    journey_.reset();
    return;
  }
  journey_ = std::move(r.csa_.journey_);
  planned_arrival_ = r.csa_.arrival_;
  env_ = std::move(*r.envelope_);
  ++stats_.envelope_builds_;
  stats_.pushed_bytes_ +=
      kEnvelopeHeaderBytes + kEnvelopeRecordBytes * env_.size();
  ++stats_.pushed_messages_;
  stats_.envelope_sizes_.push_back(env_.size());
}

push_step push_replanner::step(source const& src) {
  push_step out;

  {
    scoped_timer t{stats_.edge_ns_};
    auto const known = feed_.known_at(src.time_);
    if (known.size() > n_known_) {
      auto const trips = known_.add(known.subspan(n_known_));
      n_known_ = known.size();
      if (!first_) {
        auto const u = update_envelope(env_, known_, trips);
        if (u.changed()) {
          out.envelope_delayed_ = true;
          stats_.pushed_bytes_ +=
              kEnvelopeHeaderBytes + kEnvelopeRecordBytes * u.records_.size();
          ++stats_.pushed_messages_;
          stats_.envelope_sizes_.push_back(env_.size());
        }
      }
    }

    if (journey_.has_value()) {
      auto& conns = journey_->connections_;
      if (src.on_.valid() && !conns.empty() && conns.front().idx_ == src.on_) {
        conns.erase(begin(conns));
      }
      journey_->from_ = src;
      out.journey_delayed_ =
          journey_is_delayed(*journey_, planned_arrival_, ctx_.tt_, known_);
    }
  }

  if (first_ || !journey_.has_value() || out.journey_delayed_) {
    first_ = false;
    server_call(src, out);
  } else if (out.envelope_delayed_ && envelope_replanning_) {
    auto reachable = false;
    {
      scoped_timer t{stats_.edge_ns_};
      auto r = ctx_.csa_.solve(env_.sorted(), src, target_);
      stats_.scanned_edge_ += r.scanned_;
      ++stats_.local_replans_;
      out.scenario_ = scenario::envelope_replan;
      if (r.reachable()) {
        reachable = true;
        journey_ = std::move(r.journey_);
        planned_arrival_ = r.arrival_;
      }
    }
    if (!reachable) {
      server_call(src, out);
    }
  } else {
    out.scenario_ = scenario::none;
  }
  out.journey_ = journey_;
  return out;
}

}  // namespace replan
