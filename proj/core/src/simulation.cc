#include "replan/simulation.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <stdexcept>

#include "replan/error.h"

namespace replan {

char const* to_string(strategy const s) {
  switch (s) {
    case strategy::sp: return "SP";
    case strategy::sr: return "SR";
    case strategy::jdr: return "JDR";
    case strategy::dr_pull: return "DR_PULL";
    case strategy::dr_push: return "DR_PUSH";
  }
  return "?";
}

strategy parse_strategy(std::string_view const name) {
  auto upper = std::string{name};
  for (auto& ch : upper) {
    ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  for (auto i = 0U; i != kNumStrategies; ++i) {
    auto const s = static_cast<strategy>(i);
    if (upper == to_string(s)) {
      return s;
    }
  }
  throw error{error_kind::config, "unknown strategy \"" + std::string{name} +
                                      "\" (expected SP, SR, JDR, DR_PULL or "
                                      "DR_PUSH)"};
}

sim_env::sim_env(timetable const& tt, time_independent_graph const& g,
                 delay_feed const& feed)
    : tt_{tt},
      tig_{g},
      feed_{feed},
      realized_{apply_delays(tt, feed.realized())},
      realized_sorted_{sorted_connections_updated(realized_)},
      end_of_day_{0},
      trips_by_route_(tt.n_routes()) {
  for (auto const& c : realized_sorted_) {
    end_of_day_ = std::max(end_of_day_, c.arr_);
  }
  for (auto t = 0U; t != tt.n_trips(); ++t) {
    trips_by_route_[tt.trips()[t].route_.v()].push_back(trip_idx_t{t});
  }
}

namespace {

std::int64_t elapsed_ns(std::chrono::steady_clock::time_point const start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now() - start)
      .count();
}

class planner {
public:
  virtual ~planner() = default;

  // Residual journey from `src`; none if the destination is unreachable.
  // `missed`: the head of the previous plan could not be boarded.
  virtual std::optional<journey> plan(source const& src, bool origin,
                                      bool missed, sim_result&) = 0;
};

// SP and SR: one plan at the origin, then same-route repairs.
class static_planner final : public planner {
public:
  static_planner(sim_env const& env, replan_context& ctx, stop_idx_t target,
                 bool snapshot)
      : env_{env}, ctx_{ctx}, target_{target}, snapshot_{snapshot} {}

  std::optional<journey> plan(source const& src, bool const origin,
                              bool const missed, sim_result& res) override {
    if (origin) {
      auto const start = std::chrono::steady_clock::now();
      if (snapshot_) {
        replan(src, res);
      } else {
        auto r = ctx_.csa_.solve(env_.tt_.sorted(), src, target_);
        ++res.plans_;
        res.stats_.scanned_server_ += r.scanned_;
        plan_ = std::move(r.journey_);
      }
      res.stats_.server_ns_ += elapsed_ns(start);
      return plan_;
    }
    if (!plan_.has_value()) {
      return std::nullopt;
    }
    auto& conns = plan_->connections_;
    if (!missed && src.on_.valid() && !conns.empty() &&
        conns.front().idx_ == src.on_) {
      conns.erase(begin(conns));
    }
    plan_->from_ = src;
    if (missed && !conns.empty()) {
      repair(src, res);
    }
    return plan_;
  }

private:
  void replan(source const& src, sim_result& res) {
    auto const view = apply_delays(env_.tt_, env_.feed_, src.time_);
    auto const sorted = sorted_connections_updated(view);
    auto r = ctx_.csa_.solve(sorted, src, target_);
    ++res.plans_;
    ++res.stats_.server_calls_;
    res.stats_.scanned_server_ += r.scanned_;
    plan_ = std::move(r.journey_);
  }

  void repair(source const& src, sim_result& res) {
    auto const& tt = env_.tt_;
    auto& conns = plan_->connections_;
    auto const head = conns.front();
    auto const pos = tt.position(head.idx_);
    auto k = std::size_t{0};
    while (k != conns.size() && conns[k].trip_ == head.trip_) {
      ++k;
    }

    auto const ready = ready_time(tt, src, head.from_);
    auto best = std::optional<trip_idx_t>{};
    auto best_dep = kInfinity;
    if (ready.has_value()) {
      auto const route = tt.trips()[head.trip_.v()].route_;
      for (auto const t : env_.trips_by_route_[route.v()]) {
        auto const c = env_.realized_.get(
            con_idx_t{tt.trips()[t.v()].first_.v() + pos});
        if (c.dep_ >= *ready && c.dep_ < best_dep) {
          best = t;
          best_dep = c.dep_;
        }
      }
    }

    if (best.has_value()) {
      ++res.repairs_;
      auto const replacement =
          tt.trip_connections(*best).subspan(pos, k);
      std::copy(begin(replacement), end(replacement), begin(conns));
      return;
    }

    ++res.repair_failures_;
    auto const start = std::chrono::steady_clock::now();
    replan(src, res);
    res.stats_.server_ns_ += elapsed_ns(start);
  }

  sim_env const& env_;
  replan_context& ctx_;
  stop_idx_t target_;
  bool snapshot_;
  std::optional<journey> plan_;
};

class pull_planner final : public planner {
public:
  pull_planner(sim_env const& env, replan_context& ctx, stop_idx_t target)
      : env_{env}, ctx_{ctx}, target_{target} {}

  std::optional<journey> plan(source const& src, bool, bool,
                              sim_result& res) override {
    auto const start = std::chrono::steady_clock::now();
    auto const view = apply_delays(env_.tt_, env_.feed_, src.time_);
    auto r = pull_replan(ctx_, view, src, target_, false);
    res.stats_.server_ns_ += elapsed_ns(start);
    ++res.plans_;
    ++res.stats_.server_calls_;
    res.stats_.scanned_server_ += r.csa_.scanned_;
    return std::move(r.csa_.journey_);
  }

private:
  sim_env const& env_;
  replan_context& ctx_;
  stop_idx_t target_;
};

class push_planner final : public planner {
public:
  push_planner(sim_env const& env, replan_context& ctx, stop_idx_t target,
               bool envelope_replanning)
      : replanner_{ctx, env.feed_, target, envelope_replanning} {}

  std::optional<journey> plan(source const& src, bool const origin, bool,
                              sim_result& res) override {
    auto step = replanner_.step(src);
    if (step.scenario_ != scenario::none) {
      ++res.plans_;
    }
    if (!origin) {
      if (step.scenario_ == scenario::server_call) {
        ++res.journey_delayed_;
      } else if (step.envelope_delayed_) {
        ++res.envelope_delayed_;
      } else {
        ++res.neither_delayed_;
      }
    }
    res.stats_ = replanner_.stats();
    return std::move(step.journey_);
  }

private:
  push_replanner replanner_;
};

std::unique_ptr<planner> make_planner(strategy const s, sim_env const& env,
                                      replan_context& ctx,
                                      stop_idx_t const target) {
  switch (s) {
    case strategy::sp:
      return std::make_unique<static_planner>(env, ctx, target, false);
    case strategy::sr:
      return std::make_unique<static_planner>(env, ctx, target, true);
    case strategy::jdr:
      return std::make_unique<push_planner>(env, ctx, target, false);
    case strategy::dr_pull:
      return std::make_unique<pull_planner>(env, ctx, target);
    case strategy::dr_push:
      return std::make_unique<push_planner>(env, ctx, target, true);
  }
  throw std::logic_error{"unknown strategy"};
}

}  // namespace

sim_result simulate(strategy const s, query const& q, sim_env const& env,
                    replan_context& ctx) {
  auto const& tt = env.tt_;
  if (!q.from_.valid() || q.from_.v() >= tt.n_stops() || !q.to_.valid() ||
      q.to_.v() >= tt.n_stops()) {
    throw error{error_kind::invalid_argument, "query stop id out of range"};
  }

  sim_result res;
  res.query_id_ = q.id_;
  res.strategy_ = s;

  auto p = make_planner(s, env, ctx, q.to_);
  auto src = source::at_origin(q.from_, q.time_);
  auto origin = true;
  auto missed = false;
  auto const max_iterations = 4U * tt.n_connections() + 64U;
  for (auto it = 0U;; ++it) {
    if (it > max_iterations) {
      throw std::logic_error{"simulate: no progress for query " +
                             std::to_string(q.id_)};
    }
    if (src.stop_ == q.to_) {
      res.arrival_ = src.time_;
      break;
    }
    if (src.time_ > env.end_of_day_) {
      break;
    }
    if (!origin) {
      ++res.decisions_;
    }
    auto const j = p->plan(src, origin, missed, res);
    origin = false;
    missed = false;
    if (!j.has_value()) {
      break;
    }
    if (j->connections_.empty()) {
      if (auto const w = tt.walk(src.stop_, q.to_); w.has_value()) {
        res.arrival_ = src.time_ + *w;
        ++res.steps_;
      }
      break;
    }

    auto const r = env.realized_.get(j->connections_.front().idx_);
    auto const riding = src.on_.valid() && !src.alighted_ &&
                        tt.connections()[src.on_.v()].trip_ == r.trip_ &&
                        tt.position(r.idx_) == tt.position(src.on_) + 1U;
    if (!riding) {
      auto const ready = ready_time(tt, src, r.from_);
      if (!ready.has_value() || *ready > r.dep_) {
        ++res.misses_;
        missed = true;
        auto const now = std::max(src.time_, r.dep_);
        src = src.needs_transfer()
                  ? source::alighted(src.stop_, src.arrived_, now)
                  : source::at_origin(src.stop_, now);
        continue;
      }
      ++res.boardings_;
    }
    src = source::on_board(r);
    res.executed_.push_back(r.idx_);
    ++res.steps_;
  }
  return res;
}

std::vector<query> generate_queries(sim_env const& env, std::size_t const n_pairs,
                                    std::span<timestamp const> const times,
                                    std::uint64_t const seed,
                                    std::size_t max_attempts) {
  auto const& tt = env.tt_;
  if (n_pairs == 0U || times.empty()) {
    throw error{error_kind::config,
                "query generation needs at least one pair and one time"};
  }
  if (tt.n_stops() < 2U) {
    throw error{error_kind::infeasible, "timetable has fewer than two stops"};
  }
  if (max_attempts == 0U) {
    max_attempts = 1000U * n_pairs;
  }

  csa_solver csa{tt};
  std::mt19937_64 rng{seed};
  std::uniform_int_distribution<std::uint32_t> pick{
      0U, static_cast<std::uint32_t>(tt.n_stops() - 1U)};
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  std::vector<std::size_t> failures(times.size(), 0U);
  std::vector<query> out;
  auto attempts = std::size_t{0};
  while (seen.size() < n_pairs) {
    if (attempts++ == max_attempts) {
      auto const worst = static_cast<std::size_t>(
          std::max_element(begin(failures), end(failures)) - begin(failures));
      throw error{error_kind::infeasible,
                  "could not find " + std::to_string(n_pairs) +
                      " feasible stop pairs in " + std::to_string(max_attempts) +
                      " attempts; departure time " + format_time(times[worst]) +
                      " rejected " + std::to_string(failures[worst]) +
                      " candidates"};
    }
    auto const a = pick(rng);
    auto const b = pick(rng);
    if (a == b || seen.contains({a, b})) {
      continue;
    }
    auto ok = true;
    for (auto i = 0U; i != times.size(); ++i) {
      auto const r = csa.solve(env.realized_sorted_,
                               source::at_origin(stop_idx_t{a}, times[i]),
                               stop_idx_t{b}, false);
      if (!r.reachable()) {
        ++failures[i];
        ok = false;
        break;
      }
    }
    if (!ok) {
      continue;
    }
    seen.emplace(a, b);
    for (auto const t : times) {
      out.push_back(query{.id_ = static_cast<std::uint32_t>(out.size()),
                          .from_ = stop_idx_t{a},
                          .to_ = stop_idx_t{b},
                          .time_ = t});
    }
  }
  return out;
}

}  // namespace replan
