#include "replan/report.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "replan/csv.h"
#include "replan/error.h"

namespace replan {

namespace {

using json = nlohmann::ordered_json;

char const* period_name(period const p) {
  return p == period::peak ? "peak" : "off_peak";
}

std::string csv_field(std::string const& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (auto const c : s) {
    out += c;
    if (c == '"') {
      out += '"';
    }
  }
  return out + "\"";
}

std::string fixed(double const v, int const digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Rounded so summaries do not depend on the last bits of a running sum.
double round3(double const v) { return std::round(v * 1000.0) / 1000.0; }

constexpr auto kResultColumns = std::array{
    "query_id",         "from",
    "to",               "departure",
    "strategy",         "status",
    "arrival",          "travel_time_s",
    "steps",            "boardings",
    "misses",           "repairs",
    "repair_failures",  "decisions",
    "journey_delayed",  "envelope_delayed",
    "neither_delayed",  "plans",
    "server_calls",     "local_replans",
    "envelope_builds",  "envelope_size_initial",
    "envelope_size_max", "envelope_size_mean",
    "pushed_bytes",     "pushed_messages",
    "scanned_server",   "scanned_edge"};

template <typename T>
T to_uint(std::string_view const s, csv_table const& t, std::size_t const row,
          char const* col) {
  T v{};
  auto const* const end = s.data() + s.size();
  auto const [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw error{error_kind::parse, t.name() + ":" + std::to_string(t.line(row)) +
                                       ": bad value \"" + std::string{s} +
                                       "\" in column " + col};
  }
  return v;
}

std::string write_text(std::filesystem::path const& p, std::string const& s) {
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out{p, std::ios::binary};
  out << s;
  if (!out) {
    throw error{error_kind::config, "cannot write " + p.string()};
  }
  return s;
}

std::string read_text(std::filesystem::path const& p) {
  std::ifstream in{p, std::ios::binary};
  if (!in) {
    throw error{error_kind::config, "cannot open " + p.string()};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json to_json(strategy_summary const& s) {
  return json{
      {"queries", s.n_},
      {"stranded", s.stranded_},
      {"mean_travel_time_s", round3(s.mean_travel_time_s_)},
      {"mean_effective_travel_time_s", round3(s.mean_effective_travel_time_s_)},
      {"mean_decisions", round3(s.mean_decisions_)},
      {"mean_server_calls", round3(s.mean_server_calls_)},
      {"mean_local_replans", round3(s.mean_local_replans_)},
      {"mean_pushed_bytes", round3(s.mean_pushed_bytes_)},
      {"mean_scanned_connections", round3(s.mean_scanned_)},
      {"median_envelope_size", round3(s.median_envelope_size_)},
      {"mean_journey_delayed_pct", round3(s.mean_journey_delayed_pct_)},
      {"mean_envelope_delayed_pct", round3(s.mean_envelope_delayed_pct_)},
      {"mean_neither_delayed_pct", round3(s.mean_neither_delayed_pct_)},
      {"mean_misses", round3(s.mean_misses_)},
      {"mean_repairs", round3(s.mean_repairs_)},
      {"repair_failures", s.repair_failures_}};
}

json to_json(diff_stats const& d) {
  auto q = json::object();
  for (auto const& [pct, v] : d.quantiles_s_) {
    q["p" + std::to_string(pct)] = round3(v);
  }
  return json{{"queries", d.n_},
              {"affected", d.affected_},
              {"affected_pct", round3(d.affected_pct_)},
              {"reference_later", d.reference_later_},
              {"mean_diff_s", round3(d.mean_diff_s_)},
              {"mean_diff_affected_s", round3(d.mean_diff_affected_s_)},
              {"quantiles_affected_s", q}};
}

json summaries(std::span<result_row const> const rows,
               timestamp const end_of_day, duration const penalty) {
  auto out = json::object();
  for (auto const& [s, sum] : summarize(rows, end_of_day, penalty)) {
    out[to_string(s)] = to_json(sum);
  }
  return out;
}

json windows_json(peak_profile const& p) {
  auto w = json::array();
  for (auto const& tw : p.windows_) {
    w.push_back(json::array({format_time(tw.from_), format_time(tw.to_)}));
  }
  return w;
}

struct timing_acc {
  std::size_t n_{0};
  double server_{0.0};
  double edge_{0.0};
};

std::map<strategy, timing_acc> timing_by_strategy(
    std::span<result_row const> const rows) {
  std::map<strategy, timing_acc> m;
  for (auto const& r : rows) {
    auto& a = m[r.strategy_];
    ++a.n_;
    a.server_ += static_cast<double>(r.server_ns_) / 1e6;
    a.edge_ += static_cast<double>(r.edge_ns_) / 1e6;
  }
  return m;
}

}  // namespace

std::string to_json(run_manifest const& m) {
  auto strategies = json::array();
  for (auto const s : m.strategies_) {
    strategies.push_back(to_string(s));
  }
  return json{{"version", m.version_},
              {"config_hash", m.config_hash_},
              {"dataset_fingerprint", m.dataset_fingerprint_},
              {"feed_fingerprint", m.feed_fingerprint_},
              {"delay_seed", m.delay_seed_},
              {"query_seed", m.query_seed_},
              {"queries", m.n_queries_},
              {"strategies", strategies},
              {"end_of_day", format_time(m.end_of_day_)},
              {"penalty_s", m.penalty_},
              {"peak_windows", windows_json(m.peaks_)},
              {"started", m.started_},
              {"finished", m.finished_}}
             .dump(2) +
         "\n";
}

run_manifest parse_manifest(std::string const& text) {
  try {
    auto const j = json::parse(text);
    run_manifest m;
    m.version_ = j.at("version").get<std::string>();
    m.config_hash_ = j.at("config_hash").get<std::string>();
    m.dataset_fingerprint_ = j.at("dataset_fingerprint").get<std::string>();
    m.feed_fingerprint_ = j.value("feed_fingerprint", std::string{});
    m.delay_seed_ = j.at("delay_seed").get<std::uint64_t>();
    m.query_seed_ = j.at("query_seed").get<std::uint64_t>();
    m.n_queries_ = j.at("queries").get<std::size_t>();
    for (auto const& s : j.at("strategies")) {
      m.strategies_.push_back(parse_strategy(s.get<std::string>()));
    }
    m.end_of_day_ = parse_time(j.at("end_of_day").get<std::string>());
    m.penalty_ = j.at("penalty_s").get<duration>();
    for (auto const& w : j.at("peak_windows")) {
      m.peaks_.windows_.push_back(
          time_window{parse_time(w.at(0).get<std::string>()),
                      parse_time(w.at(1).get<std::string>())});
    }
    m.started_ = j.value("started", std::string{});
    m.finished_ = j.value("finished", std::string{});
    return m;
  } catch (json::exception const& e) {
    throw error{error_kind::parse, std::string{"manifest.json: "} + e.what()};
  }
}

void write_results_csv(std::ostream& out, std::span<result_row const> const rows) {
  for (auto i = 0U; i != kResultColumns.size(); ++i) {
    out << (i == 0U ? "" : ",") << kResultColumns[i];
  }
  out << '\n';
  for (auto const& r : rows) {
    out << r.query_id_ << ',' << csv_field(r.from_) << ',' << csv_field(r.to_)
        << ',' << format_time(r.departure_) << ',' << to_string(r.strategy_)
        << ',' << (r.arrival_.has_value() ? "arrived" : "stranded") << ',';
    if (r.arrival_.has_value()) {
      out << format_time(*r.arrival_) << ',' << (*r.arrival_ - r.departure_);
    } else {
      out << ',';
    }
    out << ',' << r.steps_ << ',' << r.boardings_ << ',' << r.misses_ << ','
        << r.repairs_ << ',' << r.repair_failures_ << ',' << r.decisions_
        << ',' << r.journey_delayed_ << ',' << r.envelope_delayed_ << ','
        << r.neither_delayed_ << ',' << r.plans_ << ',' << r.server_calls_
        << ',' << r.local_replans_ << ',' << r.envelope_builds_ << ','
        << r.envelope_size_initial_ << ',' << r.envelope_size_max_ << ','
        << fixed(r.envelope_size_mean_) << ',' << r.pushed_bytes_ << ','
        << r.pushed_messages_ << ',' << r.scanned_server_ << ','
        << r.scanned_edge_ << '\n';
  }
}

std::vector<result_row> parse_results_csv(std::string_view const content,
                                          std::string const& name) {
  auto const t = csv_table::parse(content, name);
  std::array<std::size_t, kResultColumns.size()> col{};
  for (auto i = 0U; i != kResultColumns.size(); ++i) {
    col[i] = t.required_column(kResultColumns[i]);
  }
  auto const cell = [&](std::size_t const row, std::size_t const i) {
    return t.at(row, col[i]);
  };
  auto const line_error = [&](std::size_t const row, std::string const& msg) {
    return error{error_kind::parse,
                 name + ":" + std::to_string(t.line(row)) + ": " + msg};
  };

  std::vector<result_row> rows;
  rows.reserve(t.size());
  for (auto row = 0U; row != t.size(); ++row) {
    result_row r;
    auto const u = [&](std::size_t const i) {
      return to_uint<std::size_t>(cell(row, i), t, row, kResultColumns[i]);
    };
    r.query_id_ = to_uint<std::uint32_t>(cell(row, 0), t, row, "query_id");
    r.from_ = std::string{cell(row, 1)};
    r.to_ = std::string{cell(row, 2)};
    auto const status = cell(row, 5);
    if (status != "arrived" && status != "stranded") {
      throw line_error(row, "bad status \"" + std::string{status} + "\"");
    }
    try {
      r.departure_ = parse_time(cell(row, 3));
      r.strategy_ = parse_strategy(std::string{cell(row, 4)});
      if (status == "arrived") {
        r.arrival_ = parse_time(cell(row, 6));
      }
    } catch (error const& e) {
      throw line_error(row, e.what());
    }
    r.steps_ = u(8);
    r.boardings_ = u(9);
    r.misses_ = u(10);
    r.repairs_ = u(11);
    r.repair_failures_ = u(12);
    r.decisions_ = u(13);
    r.journey_delayed_ = u(14);
    r.envelope_delayed_ = u(15);
    r.neither_delayed_ = u(16);
    r.plans_ = u(17);
    r.server_calls_ = u(18);
    r.local_replans_ = u(19);
    r.envelope_builds_ = u(20);
    r.envelope_size_initial_ = u(21);
    r.envelope_size_max_ = u(22);
    try {
      r.envelope_size_mean_ = std::stod(std::string{cell(row, 23)});
    } catch (std::exception const&) {
      throw line_error(row, "bad envelope_size_mean");
    }
    r.pushed_bytes_ = u(24);
    r.pushed_messages_ = u(25);
    r.scanned_server_ = u(26);
    r.scanned_edge_ = u(27);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_timings_csv(std::ostream& out, std::span<result_row const> const rows) {
  out << "query_id,strategy,server_ns,edge_ns\n";
  for (auto const& r : rows) {
    out << r.query_id_ << ',' << to_string(r.strategy_) << ',' << r.server_ns_
        << ',' << r.edge_ns_ << '\n';
  }
}

void merge_timings_csv(std::string_view const content, std::string const& name,
                       std::span<result_row> const rows) {
  auto const t = csv_table::parse(content, name);
  auto const qc = t.required_column("query_id");
  auto const sc = t.required_column("strategy");
  auto const server = t.required_column("server_ns");
  auto const edge = t.required_column("edge_ns");
  std::map<std::pair<std::uint32_t, strategy>, result_row*> index;
  for (auto& r : rows) {
    index[{r.query_id_, r.strategy_}] = &r;
  }
  for (auto row = 0U; row != t.size(); ++row) {
    auto const key = std::pair{
        to_uint<std::uint32_t>(t.at(row, qc), t, row, "query_id"),
        parse_strategy(std::string{t.at(row, sc)})};
    auto const it = index.find(key);
    if (it == end(index)) {
      continue;
    }
    it->second->server_ns_ =
        to_uint<std::int64_t>(t.at(row, server), t, row, "server_ns");
    it->second->edge_ns_ = to_uint<std::int64_t>(t.at(row, edge), t, row, "edge_ns");
  }
}

std::string summary_json(std::span<result_row const> const rows,
                         timestamp const end_of_day, peak_profile const& peaks,
                         duration const penalty) {
  json j;
  j["end_of_day"] = format_time(end_of_day);
  j["penalty_s"] = penalty;
  j["peak_windows"] = windows_json(peaks);
  auto const ref = reference_strategy(rows);
  j["reference"] = ref.has_value() ? json(to_string(*ref)) : json(nullptr);
  j["strategies"] = summaries(rows, end_of_day, penalty);

  std::map<timestamp, std::vector<result_row>> by_dep;
  std::map<period, std::vector<result_row>> by_period;
  for (auto const& r : rows) {
    by_dep[r.departure_].push_back(r);
    by_period[classify_period(r.departure_, peaks)].push_back(r);
  }
  auto dep = json::object();
  for (auto const& [t, rs] : by_dep) {
    dep[format_time(t)] = summaries(rs, end_of_day, penalty);
  }
  j["by_departure"] = dep;
  auto per = json::object();
  for (auto const& [p, rs] : by_period) {
    per[period_name(p)] = summaries(rs, end_of_day, penalty);
  }
  j["by_period"] = per;

  auto cmp = json::array();
  if (ref.has_value()) {
    for (auto const& pc : compare(rows, *ref, peaks, penalty)) {
      auto d = json::object();
      for (auto const& [t, s] : pc.by_departure_) {
        d[format_time(t)] = to_json(s);
      }
      auto p = json::object();
      for (auto const& [pp, s] : pc.by_period_) {
        p[period_name(pp)] = to_json(s);
      }
      cmp.push_back(json{{"reference", to_string(pc.reference_)},
                         {"other", to_string(pc.other_)},
                         {"all", to_json(pc.all_)},
                         {"by_departure", d},
                         {"by_period", p}});
    }
  }
  j["comparisons"] = cmp;
  return j.dump(2) + "\n";
}

std::string timing_summary_json(std::span<result_row const> const rows) {
  json j;
  auto per = json::object();
  auto const m = timing_by_strategy(rows);
  for (auto const& [s, a] : m) {
    auto const n = static_cast<double>(a.n_);
    per[to_string(s)] = json{{"queries", a.n_},
                             {"mean_server_ms", a.server_ / n},
                             {"mean_edge_ms", a.edge_ / n},
                             {"mean_total_ms", (a.server_ + a.edge_) / n}};
  }
  j["strategies"] = per;
  auto const push = m.find(strategy::dr_push);
  auto const pull = m.find(strategy::dr_pull);
  if (push != end(m) && pull != end(m)) {
    auto const push_total = (push->second.server_ + push->second.edge_) /
                            static_cast<double>(push->second.n_);
    auto const pull_total = (pull->second.server_ + pull->second.edge_) /
                            static_cast<double>(pull->second.n_);
    j["pull_over_push_speedup"] =
        push_total > 0.0 ? json(pull_total / push_total) : json(nullptr);
  }
  return j.dump(2) + "\n";
}

void write_runtime_by_departure_csv(std::ostream& out,
                                    std::span<result_row const> const rows) {
  std::map<timestamp, std::vector<result_row>> by_dep;
  for (auto const& r : rows) {
    by_dep[r.departure_].push_back(r);
  }
  out << "departure,strategy,queries,mean_server_ms,mean_edge_ms,mean_total_ms,"
         "pull_over_push_speedup\n";
  for (auto const& [t, rs] : by_dep) {
    auto const m = timing_by_strategy(rs);
    auto speedup = std::string{};
    auto const push = m.find(strategy::dr_push);
    auto const pull = m.find(strategy::dr_pull);
    if (push != end(m) && pull != end(m)) {
      auto const a = (push->second.server_ + push->second.edge_) /
                     static_cast<double>(push->second.n_);
      auto const b = (pull->second.server_ + pull->second.edge_) /
                     static_cast<double>(pull->second.n_);
      if (a > 0.0) {
        speedup = fixed(b / a);
      }
    }
    for (auto const& [s, a] : m) {
      auto const n = static_cast<double>(a.n_);
      out << format_time(t) << ',' << to_string(s) << ',' << a.n_ << ','
          << fixed(a.server_ / n, 6) << ',' << fixed(a.edge_ / n, 6) << ','
          << fixed((a.server_ + a.edge_) / n, 6) << ','
          << (s == strategy::dr_push || s == strategy::dr_pull ? speedup : "")
          << '\n';
    }
  }
}

void write_savings_by_departure_csv(std::ostream& out,
                                    std::span<result_row const> const rows,
                                    peak_profile const& peaks,
                                    duration const penalty) {
  out << "reference,other,departure,queries,affected,affected_pct,"
         "reference_later,mean_diff_s,mean_diff_affected_s,p10_s,p25_s,p50_s,"
         "p75_s,p90_s\n";
  auto const ref = reference_strategy(rows);
  if (!ref.has_value()) {
    return;
  }
  auto const line = [&](pair_comparison const& pc, std::string const& dep,
                        diff_stats const& d) {
    out << to_string(pc.reference_) << ',' << to_string(pc.other_) << ','
        << dep << ',' << d.n_ << ',' << d.affected_ << ','
        << fixed(d.affected_pct_) << ',' << d.reference_later_ << ','
        << fixed(d.mean_diff_s_) << ',' << fixed(d.mean_diff_affected_s_);
    for (auto const pct : {10, 25, 50, 75, 90}) {
      auto const it = d.quantiles_s_.find(pct);
      out << ',' << (it == end(d.quantiles_s_) ? "" : fixed(it->second, 0));
    }
    out << '\n';
  };
  for (auto const& pc : compare(rows, *ref, peaks, penalty)) {
    for (auto const& [t, d] : pc.by_departure_) {
      line(pc, format_time(t), d);
    }
    line(pc, "all", pc.all_);
  }
}

void write_report(std::filesystem::path const& dir,
                  std::span<result_row const> const rows,
                  timestamp const end_of_day, peak_profile const& peaks,
                  duration const penalty) {
  std::filesystem::create_directories(dir);
  auto const emit = [&](char const* file, auto&& fn) {
    std::ostringstream ss;
    fn(ss);
    write_text(dir / file, ss.str());
  };
  emit("results.csv", [&](std::ostream& o) { write_results_csv(o, rows); });
  emit("timings.csv", [&](std::ostream& o) { write_timings_csv(o, rows); });
  write_text(dir / "summary.json", summary_json(rows, end_of_day, peaks, penalty));
  write_text(dir / "timing_summary.json", timing_summary_json(rows));
  emit("runtime_by_departure.csv",
       [&](std::ostream& o) { write_runtime_by_departure_csv(o, rows); });
  emit("savings_by_departure.csv", [&](std::ostream& o) {
    write_savings_by_departure_csv(o, rows, peaks, penalty);
  });
}

loaded_results read_run(std::filesystem::path const& dir) {
  loaded_results r;
  auto const results = dir / "results.csv";
  r.rows_ = parse_results_csv(read_text(results), results.string());
  auto const timings = dir / "timings.csv";
  if (std::filesystem::exists(timings)) {
    merge_timings_csv(read_text(timings), timings.string(), r.rows_);
  }
  r.manifest_ = parse_manifest(read_text(dir / "manifest.json"));
  return r;
}

}  // namespace replan
