#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "replan/csa.h"
#include "replan/delay.h"
#include "replan/envelope.h"
#include "replan/gtfs.h"
#include "replan/simulation.h"
#include "replan/tig.h"

using namespace replan;

namespace {

// Cairns network, sampled delays and a fixed query set, loaded once.
struct network {
  network()
      : tt_{load()},
        g_{time_independent_graph::build(tt_)},
        feed_{sample_delays(tt_, {}, 2024)},
        env_{tt_, g_, feed_} {
    auto const times = std::vector<timestamp>{8 * 3600, 12 * 3600, 17 * 3600};
    queries_ = generate_queries(env_, 20U, times, 7U);
    now_view_ = std::make_unique<delayed_view>(apply_delays(tt_, feed_, 12 * 3600));
  }

  static timetable load() {
    gtfs_options opts;
    opts.walk_radius_m_ = 200.0;
    return load_gtfs(std::string{REPLAN_DATA_DIR} + "/cairns", opts);
  }

  timetable tt_;
  time_independent_graph g_;
  delay_feed feed_;
  sim_env env_;
  std::vector<query> queries_;
  std::unique_ptr<delayed_view> now_view_;
};

network const& net() {
  static network const n;
  return n;
}

query const& pick(benchmark::State const&, std::size_t& i) {
  auto const& qs = net().queries_;
  return qs[i++ % qs.size()];
}

void bm_csa_full(benchmark::State& state) {
  auto const& n = net();
  csa_solver csa{n.tt_};
  std::size_t i = 0U;
  for (auto _ : state) {
    auto const& q = pick(state, i);
    auto const r = csa.solve(n.env_.realized_sorted_,
                             source::at_origin(q.from_, q.time_), q.to_);
    benchmark::DoNotOptimize(r.arrival_);
  }
}
BENCHMARK(bm_csa_full);

void bm_csa_envelope(benchmark::State& state) {
  auto const& n = net();
  csa_solver csa{n.tt_};
  duration_search search{n.tt_.n_stops()};
  std::vector<envelope> envs;
  for (auto const& q : n.queries_) {
    auto const r = csa.solve(n.env_.realized_sorted_,
                             source::at_origin(q.from_, q.time_), q.to_, false);
    envs.push_back(build_envelope(n.env_.realized_sorted_, n.g_, search, q.from_,
                                  q.to_, q.time_, r.arrival_));
  }
  std::size_t i = 0U;
  for (auto _ : state) {
    auto const k = i % envs.size();
    auto const& q = pick(state, i);
    auto const r = csa.solve(envs[k].sorted(),
                             source::at_origin(q.from_, q.time_), q.to_);
    benchmark::DoNotOptimize(r.arrival_);
  }
}
BENCHMARK(bm_csa_envelope);

void bm_tig_search(benchmark::State& state) {
  auto const& n = net();
  duration_search search{n.tt_.n_stops()};
  std::size_t i = 0U;
  for (auto _ : state) {
    auto const& q = pick(state, i);
    search.run(n.g_, q.from_, search_direction::forward, 4 * 3600);
    benchmark::DoNotOptimize(search[q.to_]);
  }
}
BENCHMARK(bm_tig_search);

void bm_envelope_build(benchmark::State& state) {
  auto const& n = net();
  csa_solver csa{n.tt_};
  duration_search search{n.tt_.n_stops()};
  std::vector<timestamp> bounds;
  for (auto const& q : n.queries_) {
    bounds.push_back(csa.solve(n.env_.realized_sorted_,
                               source::at_origin(q.from_, q.time_), q.to_, false)
                         .arrival_);
  }
  std::size_t i = 0U;
  for (auto _ : state) {
    auto const k = i % bounds.size();
    auto const& q = pick(state, i);
    auto const env = build_envelope(n.env_.realized_sorted_, n.g_, search, q.from_,
                                    q.to_, q.time_, bounds[k]);
    benchmark::DoNotOptimize(env.size());
  }
}
BENCHMARK(bm_envelope_build);

void bm_resort_updated(benchmark::State& state) {
  auto const& n = net();
  for (auto _ : state) {
    auto const sorted = sorted_connections_updated(*n.now_view_);
    benchmark::DoNotOptimize(sorted.data());
  }
}
BENCHMARK(bm_resort_updated);

}  // namespace

BENCHMARK_MAIN();
