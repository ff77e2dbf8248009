#include "replan/experiment.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "replan/error.h"
#include "replan/timetable_io.h"

namespace replan {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(std::string const& msg) {
  throw error{error_kind::config, "config: " + msg};
}

void check_keys(json const& j, std::string const& where,
                std::set<std::string> const& allowed) {
  if (!j.is_object()) {
    fail(where + " must be an object");
  }
  for (auto const& [k, v] : j.items()) {
    if (!allowed.contains(k)) {
      fail("unknown key \"" + k + "\" in " + where);
    }
  }
}

template <typename T>
T get(json const& j, char const* key, std::string const& where) {
  try {
    return j.at(key).get<T>();
  } catch (json::exception const&) {
    fail("missing or invalid \"" + std::string{key} + "\" in " + where);
  }
}

timestamp time_value(json const& v, std::string const& where) {
  if (v.is_number_integer()) {
    return v.get<timestamp>();
  }
  if (v.is_string()) {
    try {
      return parse_time(v.get<std::string>());
    } catch (error const&) {
    }
  }
  fail("bad time " + v.dump() + " in " + where);
}

std::filesystem::path resolve(std::filesystem::path const& base,
                              std::string const& p) {
  auto const path = std::filesystem::path{p};
  return path.is_absolute() ? path : base / path;
}

void parse_delay_keys(json const& d, delay_params& params) {
  if (d.contains("mean_minutes")) {
    auto const& m = d.at("mean_minutes");
    check_keys(m, "delays.mean_minutes",
               {"fully_separated", "semi_separated", "mixed_traffic"});
    for (auto i = 0U; i != kNumModes; ++i) {
      auto const name = to_string(static_cast<transport_mode>(i));
      if (!m.contains(name)) {
        continue;
      }
      auto const v = get<std::vector<double>>(m, name, "delays.mean_minutes");
      if (v.size() != 2U || !(v[0] > 0.0) || !(v[1] > 0.0)) {
        fail(std::string{"delays.mean_minutes."} + name +
             " must be [off_peak, peak] with positive values");
      }
      params.mean_s_[i] = {v[0] * 60.0, v[1] * 60.0};
    }
  }
  if (d.contains("min_delay_s")) {
    params.min_delay_ = get<duration>(d, "min_delay_s", "delays");
  }
  if (d.contains("peak_threshold")) {
    params.peak_threshold_ = get<double>(d, "peak_threshold", "delays");
  }
  if (d.contains("peak_windows")) {
    peak_profile p;
    for (auto const& w : d.at("peak_windows")) {
      if (!w.is_array() || w.size() != 2U) {
        fail("peak window must be [from, to]");
      }
      p.windows_.push_back(time_window{time_value(w[0], "peak_windows"),
                                       time_value(w[1], "peak_windows")});
    }
    params.peak_windows_ = std::move(p);
  }

}

}  // namespace

experiment_config parse_config(std::string const& text,
                               std::filesystem::path const& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (json::parse_error const& e) {
    fail(std::string{"invalid JSON: "} + e.what());
  }
  check_keys(j, "config",
             {"dataset", "tig", "delays", "queries", "strategies",
              "penalty_minutes", "threads", "description"});

  experiment_config c;
  c.canonical_json_ = j.dump();

  auto const& ds = j.contains("dataset") ? j.at("dataset") : json{};
  if (ds.is_null()) {
    fail("missing \"dataset\"");
  }
  check_keys(ds, "dataset",
             {"timetable", "gtfs", "date", "weekday", "loop_duration",
              "walk_radius_m"});
  if (ds.contains("timetable") == ds.contains("gtfs")) {
    fail("dataset needs exactly one of \"timetable\" or \"gtfs\"");
  }
  if (ds.contains("timetable")) {
    c.timetable_ = resolve(base_dir, get<std::string>(ds, "timetable", "dataset"));
  } else {
    c.gtfs_ = resolve(base_dir, get<std::string>(ds, "gtfs", "dataset"));
    if (ds.contains("date")) {
      c.gtfs_options_.date_ = get<std::string>(ds, "date", "dataset");
    }
    if (ds.contains("weekday")) {
      c.gtfs_options_.weekday_ = get<int>(ds, "weekday", "dataset");
    }
    if (ds.contains("loop_duration")) {
      c.gtfs_options_.default_loop_ = get<duration>(ds, "loop_duration", "dataset");
    }
    if (ds.contains("walk_radius_m")) {
      c.gtfs_options_.walk_radius_m_ = get<double>(ds, "walk_radius_m", "dataset");
    }
  }
  if (j.contains("tig")) {
    c.tig_ = resolve(base_dir, get<std::string>(j, "tig", "config"));
  }

  if (!j.contains("delays")) {
    fail("missing \"delays\"");
  }
  auto const& d = j.at("delays");
  check_keys(d, "delays",
             {"feed", "seed", "mean_minutes", "min_delay_s", "peak_threshold",
              "peak_windows"});
  if (d.contains("feed")) {
    c.feed_ = resolve(base_dir, get<std::string>(d, "feed", "delays"));
  } else {
    if (!d.contains("seed")) {
      fail("sampled delays need \"delays.seed\"");
    }
    c.delay_seed_ = get<std::uint64_t>(d, "seed", "delays");
  }
  parse_delay_keys(d, c.delays_);

  if (!j.contains("queries")) {
    fail("missing \"queries\"");
  }
  auto const& q = j.at("queries");
  check_keys(q, "queries",
             {"pairs", "departure_times", "seed", "max_attempts", "fixed"});
  if (q.contains("fixed")) {
    for (auto const& f : q.at("fixed")) {
      check_keys(f, "queries.fixed[]", {"from", "to", "time"});
      c.queries_.push_back(experiment_config::fixed_query{
          get<std::string>(f, "from", "queries.fixed[]"),
          get<std::string>(f, "to", "queries.fixed[]"),
          time_value(f.at("time"), "queries.fixed[]")});
    }
  } else {
    c.n_pairs_ = get<std::size_t>(q, "pairs", "queries");
    if (!q.contains("seed")) {
      fail("random queries need \"queries.seed\"");
    }
    c.query_seed_ = get<std::uint64_t>(q, "seed", "queries");
    if (q.contains("max_attempts")) {
      c.max_attempts_ = get<std::size_t>(q, "max_attempts", "queries");
    }
    if (!q.contains("departure_times") || !q.at("departure_times").is_array()) {
      fail("missing \"queries.departure_times\"");
    }
    for (auto const& t : q.at("departure_times")) {
      c.departure_times_.push_back(time_value(t, "queries.departure_times"));
    }
    if (c.n_pairs_ == 0U || c.departure_times_.empty()) {
      fail("queries need pairs >= 1 and at least one departure time");
    }
  }

  if (!j.contains("strategies") || !j.at("strategies").is_array() ||
      j.at("strategies").empty()) {
    fail("\"strategies\" must be a non-empty list");
  }
  for (auto const& s : j.at("strategies")) {
    if (!s.is_string()) {
      fail("strategy names must be strings");
    }
    auto const st = parse_strategy(s.get<std::string>());
    if (std::find(begin(c.strategies_), end(c.strategies_), st) !=
        end(c.strategies_)) {
      fail("duplicate strategy " + s.get<std::string>());
    }
    c.strategies_.push_back(st);
  }
  std::sort(begin(c.strategies_), end(c.strategies_));

  if (j.contains("penalty_minutes")) {
    c.penalty_ = static_cast<duration>(
        get<double>(j, "penalty_minutes", "config") * 60.0);
  }
  if (j.contains("threads")) {
    c.threads_ = std::max<std::size_t>(1U, get<std::size_t>(j, "threads", "config"));
  }
  return c;
}

delay_params parse_delay_params(std::string const& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (json::parse_error const& e) {
    fail(std::string{"invalid JSON: "} + e.what());
  }
  check_keys(j, "delay parameters",
             {"mean_minutes", "min_delay_s", "peak_threshold", "peak_windows"});
  delay_params p;
  parse_delay_keys(j, p);
  return p;
}

std::string config_hash(experiment_config const& c) {
  return hex(fnv1a_text(c.canonical_json_));
}

experiment_config load_config(std::filesystem::path const& p) {
  std::ifstream in{p};
  if (!in) {
    throw error{error_kind::config, "cannot open config " + p.string()};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), p.parent_path());
}

std::unique_ptr<experiment_inputs> load_inputs(experiment_config const& c) {
  auto in = std::make_unique<experiment_inputs>();
  if (c.timetable_.has_value()) {
    in->tt_ = read_timetable(*c.timetable_);
  } else {
    in->tt_ = load_gtfs(*c.gtfs_, c.gtfs_options_);
  }
  auto const fp = fingerprint(in->tt_);
  if (c.tig_.has_value()) {
    in->tig_ = read_tig(*c.tig_, fp);
  } else {
    in->tig_ = time_independent_graph::build(in->tt_);
  }
  if (c.feed_.has_value()) {
    auto f = read_feed(*c.feed_, in->tt_);
    if (f.timetable_fingerprint_.has_value() && *f.timetable_fingerprint_ != fp) {
      throw error{error_kind::fingerprint,
                  "delay feed " + c.feed_->string() + " was sampled for timetable " +
                      hex(*f.timetable_fingerprint_) + ", not " + hex(fp) +
                      "; resample it"};
    }
    in->feed_ = std::move(f.feed_);
  } else {
    in->feed_ = sample_delays(in->tt_, c.delays_, c.delay_seed_);
  }
  check_feed(in->tt_, in->feed_);
  in->peaks_ = c.delays_.peak_windows_.has_value()
                   ? *c.delays_.peak_windows_
                   : peak_profile_from_timetable(in->tt_, c.delays_.peak_threshold_);
  return in;
}

std::vector<query> resolve_queries(experiment_config const& c,
                                   sim_env const& env) {
  if (c.queries_.empty()) {
    return generate_queries(env, c.n_pairs_, c.departure_times_, c.query_seed_,
                            c.max_attempts_);
  }
  std::vector<query> out;
  for (auto const& f : c.queries_) {
    auto const from = env.tt_.find_stop(f.from_);
    auto const to = env.tt_.find_stop(f.to_);
    if (!from.has_value() || !to.has_value()) {
      throw error{error_kind::config,
                  "config: unknown stop in query " + f.from_ + " -> " + f.to_};
    }
    out.push_back(query{.id_ = static_cast<std::uint32_t>(out.size()),
                        .from_ = *from,
                        .to_ = *to,
                        .time_ = f.time_});
  }
  return out;
}

experiment_result run_experiment(sim_env const& env,
                                 std::span<query const> const queries,
                                 std::span<strategy const> const strategies,
                                 std::size_t const threads,
                                 peak_profile const& peaks) {
  experiment_result res;
  res.queries_.assign(begin(queries), end(queries));
  res.end_of_day_ = env.end_of_day_;
  res.peaks_ = peaks;
  auto const n_s = strategies.size();
  res.rows_.resize(queries.size() * n_s);
  res.executed_.resize(queries.size() * n_s);

  std::atomic<std::size_t> next{0U};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto const work = [&]() {
    replan_context ctx{env.tt_, env.tig_};
    try {
      for (auto i = next++; i < queries.size(); i = next++) {
        for (auto k = 0U; k != n_s; ++k) {
          auto r = simulate(strategies[k], queries[i], env, ctx);
          res.rows_[i * n_s + k] = to_row(r, queries[i], env.tt_);
          res.executed_[i * n_s + k] = std::move(r.executed_);
        }
      }
    } catch (...) {
      std::lock_guard const lock{failure_mutex};
      if (!failure) {
        failure = std::current_exception();
      }
      next = queries.size();
    }
  };

  auto const n_threads = std::max<std::size_t>(
      1U, std::min(threads, std::max<std::size_t>(1U, queries.size())));
  if (n_threads == 1U) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (auto t = 0U; t != n_threads; ++t) {
      pool.emplace_back(work);
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  // Queries are laid out by index; sort by id so callers may pass any order.
  std::vector<std::size_t> order(res.rows_.size());
  for (auto i = 0U; i != order.size(); ++i) {
    order[i] = i;
  }
  std::stable_sort(begin(order), end(order), [&](auto const a, auto const b) {
    return std::tie(res.rows_[a].query_id_, res.rows_[a].strategy_) <
           std::tie(res.rows_[b].query_id_, res.rows_[b].strategy_);
  });
  experiment_result sorted = res;
  for (auto i = 0U; i != order.size(); ++i) {
    sorted.rows_[i] = res.rows_[order[i]];
    sorted.executed_[i] = res.executed_[order[i]];
  }
  return sorted;
}

}  // namespace replan
