#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "replan/csa.h"
#include "replan/delay.h"
#include "replan/error.h"
#include "replan/experiment.h"
#include "replan/gtfs.h"
#include "replan/report.h"
#include "replan/tig.h"
#include "replan/timetable_io.h"

namespace fs = std::filesystem;
using namespace replan;

namespace {

std::string utc_now() {
  auto const t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_text(fs::path const& p) {
  std::ifstream in{p, std::ios::binary};
  if (!in) {
    throw error{error_kind::config, "cannot open " + p.string()};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(fs::path const& p, std::string const& s) {
  if (p.has_parent_path()) {
    fs::create_directories(p.parent_path());
  }
  std::ofstream out{p, std::ios::binary};
  out << s;
  if (!out) {
    throw error{error_kind::config, "cannot write " + p.string()};
  }
}

fs::path tig_path(fs::path cache) { return cache.replace_extension(".tig"); }

std::size_t walking_footpaths(timetable const& tt) {
  auto n = 0U;
  for (auto const& f : tt.footpaths()) {
    n += f.from_ != f.to_ ? 1U : 0U;
  }
  return n;
}

void print_metrics(timetable const& tt) {
  std::cout << "stops:       " << tt.n_stops() << '\n'
            << "connections: " << tt.n_connections() << '\n'
            << "trips:       " << tt.n_trips() << '\n'
            << "routes:      " << tt.n_routes() << '\n'
            << "footpaths:   " << walking_footpaths(tt) << " (+ "
            << tt.footpaths().size() - walking_footpaths(tt)
            << " transfer loops)\n";
}

struct ingest_opts {
  std::string gtfs_, out_;
  std::optional<std::string> date_;
  std::optional<int> weekday_;
  duration loop_{kDefaultLoopDuration};
  double walk_radius_{0.0};
};

int cmd_ingest(ingest_opts const& o) {
  gtfs_options opts;
  opts.date_ = o.date_;
  opts.weekday_ = o.weekday_;
  opts.default_loop_ = o.loop_;
  opts.walk_radius_m_ = o.walk_radius_;
  gtfs_summary summary;
  auto const tt = load_gtfs(o.gtfs_, opts, &summary);
  write_timetable(o.out_, tt);
  std::cout << "service day: " << summary.service_day_ << '\n';
  print_metrics(tt);
  std::cout << "active trips " << summary.active_trips_ << ", dropped "
            << summary.dropped_trips_ << ", from frequencies "
            << summary.frequency_trips_ << ", interpolated times "
            << summary.interpolated_times_ << ", adjusted times "
            << summary.adjusted_times_ << '\n'
            << "validation:  ok\n"
            << "fingerprint: " << hex(fingerprint(tt)) << '\n'
            << "wrote " << o.out_ << '\n';
  return 0;
}

int cmd_precompute(std::string const& cache, std::string const& out) {
  auto const tt = read_timetable(cache);
  auto const g = time_independent_graph::build(tt);
  auto const path = out.empty() ? tig_path(cache) : fs::path{out};
  write_tig(path, g, fingerprint(tt));
  std::cout << "tig: " << g.n_stops() << " stops, " << g.n_edges() << " edges\n"
            << "wrote " << path.string() << '\n';
  return 0;
}

int cmd_sample(std::string const& cache, std::uint64_t const seed,
               std::string const& params, std::string const& out) {
  auto const tt = read_timetable(cache);
  auto const p = params.empty() ? delay_params{} : parse_delay_params(read_text(params));
  auto const feed = sample_delays(tt, p, seed);
  write_feed(out, tt, feed);
  std::cout << "events: " << feed.size() << '\n' << "wrote " << out << '\n';
  return 0;
}

int cmd_simulate(std::string const& config, std::string const& out,
                 std::optional<std::size_t> const threads) {
  run_manifest m;
  m.started_ = utc_now();
  auto cfg = load_config(config);
  if (threads.has_value()) {
    cfg.threads_ = std::max<std::size_t>(1U, *threads);
  }
  auto const in = load_inputs(cfg);
  sim_env const env{in->tt_, in->tig_, in->feed_};
  auto const queries = resolve_queries(cfg, env);
  auto const res =
      run_experiment(env, queries, cfg.strategies_, cfg.threads_, in->peaks_);

  write_report(out, res.rows_, res.end_of_day_, res.peaks_, cfg.penalty_);
  m.config_hash_ = config_hash(cfg);
  m.dataset_fingerprint_ = hex(fingerprint(in->tt_));
  m.feed_fingerprint_ = hex(fingerprint(in->feed_, in->tt_));
  m.delay_seed_ = cfg.delay_seed_;
  m.query_seed_ = cfg.query_seed_;
  m.end_of_day_ = res.end_of_day_;
  m.penalty_ = cfg.penalty_;
  m.peaks_ = res.peaks_;
  m.strategies_ = cfg.strategies_;
  m.n_queries_ = queries.size();
  m.finished_ = utc_now();
  write_text(fs::path{out} / "manifest.json", to_json(m));

  std::cout << "queries: " << queries.size() << ", strategies: "
            << cfg.strategies_.size() << ", delay events: " << in->feed_.size()
            << '\n';
  for (auto const& [s, sum] : summarize(res.rows_, res.end_of_day_, cfg.penalty_)) {
    std::printf("%-8s mean travel %8.1f s  effective %8.1f s  stranded %zu\n",
                to_string(s), sum.mean_travel_time_s_,
                sum.mean_effective_travel_time_s_, sum.stranded_);
  }
  std::cout << "wrote " << out << '\n';
  return 0;
}

int cmd_report(std::string const& results, std::string const& out) {
  auto const run = read_run(results);
  write_report(out, run.rows_, run.manifest_.end_of_day_, run.manifest_.peaks_,
               run.manifest_.penalty_);
  if (fs::path{results} != fs::path{out}) {
    write_text(fs::path{out} / "manifest.json", to_json(run.manifest_));
  }
  std::cout << "rows: " << run.rows_.size() << '\n' << "wrote " << out << '\n';
  return 0;
}

struct plan_opts {
  std::string cache_, from_, to_, time_, feed_, now_;
};

int cmd_plan(plan_opts const& o) {
  auto const tt = read_timetable(o.cache_);
  auto const from = tt.find_stop(o.from_);
  auto const to = tt.find_stop(o.to_);
  if (!from.has_value() || !to.has_value()) {
    throw error{error_kind::invalid_argument,
                "unknown stop " + (from.has_value() ? o.to_ : o.from_)};
  }
  auto const time = parse_time(o.time_);
  auto feed = delay_feed{};
  if (!o.feed_.empty()) {
    feed = read_feed(o.feed_, tt).feed_;
  }
  auto const now = o.now_.empty() ? time : parse_time(o.now_);
  auto const view = apply_delays(tt, feed, now);
  auto const sorted = sorted_connections_updated(view);
  csa_solver csa{tt};
  auto const r = csa.solve(sorted, source{.stop_ = *from, .time_ = time}, *to);
  if (!r.reachable()) {
    throw error{error_kind::infeasible, o.to_ + " is not reachable from " +
                                            o.from_ + " at " + o.time_};
  }
  auto const& cs = r.journey_->connections_;
  for (auto i = 0U; i != cs.size();) {
    auto j = i;
    while (j + 1U != cs.size() && cs[j + 1U].trip_ == cs[i].trip_ &&
           tt.position(cs[j + 1U].idx_) == tt.position(cs[j].idx_) + 1U) {
      ++j;
    }
    std::cout << "trip " << tt.trips()[cs[i].trip_.v()].id_ << ": "
              << tt.stops()[cs[i].from_.v()].id_ << ' '
              << format_time(cs[i].dep_) << " -> "
              << tt.stops()[cs[j].to_.v()].id_ << ' ' << format_time(cs[j].arr_)
              << '\n';
    i = j + 1U;
  }
  std::cout << "arrival " << format_time(r.arrival_) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-aware journey replanning experiments"};
  app.require_subcommand(1);

  ingest_opts ing;
  auto* ingest = app.add_subcommand("ingest", "GTFS directory -> timetable cache");
  ingest->add_option("--gtfs", ing.gtfs_, "GTFS directory")->required();
  ingest->add_option("--out", ing.out_, "Timetable cache file")->required();
  ingest->add_option("--date", ing.date_, "Service date YYYYMMDD");
  ingest->add_option("--weekday", ing.weekday_, "Service weekday, 0 = Monday")
      ->check(CLI::Range(0, 6));
  ingest->add_option("--loop-duration", ing.loop_,
                     "Transfer time at a stop without transfers.txt entry [s]");
  ingest->add_option("--walk-radius", ing.walk_radius_,
                     "Generate walking footpaths within this radius [m]");

  std::string pre_cache, pre_out;
  auto* pre = app.add_subcommand("precompute", "Timetable cache -> TIG cache");
  pre->add_option("--cache", pre_cache, "Timetable cache file")->required();
  pre->add_option("--out", pre_out, "TIG file (default: cache with .tig)");

  std::string s_cache, s_params, s_out;
  std::uint64_t s_seed{0};
  auto* sample = app.add_subcommand("sample-delays", "Draw a delay feed");
  sample->add_option("--cache", s_cache, "Timetable cache file")->required();
  sample->add_option("--seed", s_seed, "RNG seed")->required();
  sample->add_option("--params", s_params, "Delay parameter JSON");
  sample->add_option("--out", s_out, "Feed file")->required();

  std::string sim_config, sim_out;
  std::optional<std::size_t> sim_threads;
  auto* sim = app.add_subcommand("simulate", "Run an experiment config");
  sim->add_option("--config", sim_config, "Experiment JSON")->required();
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_option("--threads", sim_threads, "Override the config's threads");

  std::string rep_results, rep_out;
  auto* rep = app.add_subcommand("report", "Aggregate a simulate output directory");
  rep->add_option("--results", rep_results, "simulate output directory")->required();
  rep->add_option("--out", rep_out, "Report directory")->required();

  plan_opts pl;
  auto* plan = app.add_subcommand("plan", "Earliest-arrival journey for one query");
  plan->add_option("--cache", pl.cache_, "Timetable cache file")->required();
  plan->add_option("--from", pl.from_, "Origin stop id")->required();
  plan->add_option("--to", pl.to_, "Destination stop id")->required();
  plan->add_option("--time", pl.time_, "Departure HH:MM[:SS]")->required();
  plan->add_option("--feed", pl.feed_, "Delay feed file");
  plan->add_option("--now", pl.now_, "Knowledge time (default: departure)");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    auto const rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(error_kind::config);
  }

  try {
    if (*ingest) {
      return cmd_ingest(ing);
    }
    if (*pre) {
      return cmd_precompute(pre_cache, pre_out);
    }
    if (*sample) {
      return cmd_sample(s_cache, s_seed, s_params, s_out);
    }
    if (*sim) {
      return cmd_simulate(sim_config, sim_out, sim_threads);
    }
    if (*rep) {
      return cmd_report(rep_results, rep_out);
    }
    if (*plan) {
      return cmd_plan(pl);
    }
  } catch (error const& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
