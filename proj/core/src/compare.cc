#include "replan/compare.h"

#include <algorithm>
#include <cmath>

namespace replan {

result_row to_row(sim_result const& r, query const& q, timetable const& tt) {
  result_row row;
  row.query_id_ = q.id_;
  row.from_ = tt.stops()[q.from_.v()].id_;
  row.to_ = tt.stops()[q.to_.v()].id_;
  row.departure_ = q.time_;
  row.strategy_ = r.strategy_;
  row.arrival_ = r.arrival_;
  row.steps_ = r.steps_;
  row.boardings_ = r.boardings_;
  row.misses_ = r.misses_;
  row.repairs_ = r.repairs_;
  row.repair_failures_ = r.repair_failures_;
  row.decisions_ = r.decisions_;
  row.journey_delayed_ = r.journey_delayed_;
  row.envelope_delayed_ = r.envelope_delayed_;
  row.neither_delayed_ = r.neither_delayed_;
  row.plans_ = r.plans_;
  row.server_calls_ = r.stats_.server_calls_;
  row.local_replans_ = r.stats_.local_replans_;
  row.envelope_builds_ = r.stats_.envelope_builds_;
  auto const& sizes = r.stats_.envelope_sizes_;
  if (!sizes.empty()) {
    row.envelope_size_initial_ = sizes.front();
    row.envelope_size_max_ = *std::max_element(begin(sizes), end(sizes));
    auto sum = 0.0;
    for (auto const s : sizes) {
      sum += static_cast<double>(s);
    }
    row.envelope_size_mean_ = sum / static_cast<double>(sizes.size());
  }
  row.pushed_bytes_ = r.stats_.pushed_bytes_;
  row.pushed_messages_ = r.stats_.pushed_messages_;
  row.scanned_server_ = r.stats_.scanned_server_;
  row.scanned_edge_ = r.stats_.scanned_edge_;
  row.server_ns_ = r.stats_.server_ns_;
  row.edge_ns_ = r.stats_.edge_ns_;
  return row;
}

namespace {

using by_query_t =
    std::map<std::uint32_t, std::map<strategy, result_row const*>>;

by_query_t group(std::span<result_row const> const rows) {
  by_query_t m;
  for (auto const& r : rows) {
    m[r.query_id_][r.strategy_] = &r;
  }
  return m;
}

double diff(result_row const& ref, result_row const& other,
            duration const penalty) {
  if (ref.arrival_.has_value() && other.arrival_.has_value()) {
    return static_cast<double>(*other.arrival_ - *ref.arrival_);
  }
  if (ref.arrival_.has_value()) {
    return penalty;
  }
  if (other.arrival_.has_value()) {
    return -penalty;
  }
  return 0.0;
}

struct accumulator {
  void add(double const d) { diffs_.push_back(d); }

  diff_stats finish() const {
    diff_stats s;
    s.n_ = diffs_.size();
    std::vector<double> affected;
    auto sum = 0.0;
    for (auto const d : diffs_) {
      sum += d;
      if (d != 0.0) {
        affected.push_back(d);
      }
      if (d < 0.0) {
        ++s.reference_later_;
      }
    }
    s.affected_ = affected.size();
    if (s.n_ != 0U) {
      s.affected_pct_ = 100.0 * static_cast<double>(s.affected_) /
                        static_cast<double>(s.n_);
      s.mean_diff_s_ = sum / static_cast<double>(s.n_);
    }
    if (!affected.empty()) {
      auto asum = 0.0;
      for (auto const d : affected) {
        asum += d;
      }
      s.mean_diff_affected_s_ = asum / static_cast<double>(affected.size());
      std::sort(begin(affected), end(affected));
      for (auto const pct : {10, 25, 50, 75, 90}) {
        auto const rank = static_cast<std::size_t>(
            std::ceil(pct / 100.0 * static_cast<double>(affected.size())));
        s.quantiles_s_[pct] = affected[std::max<std::size_t>(rank, 1U) - 1U];
      }
    }
    return s;
  }

  std::vector<double> diffs_;
};

}  // namespace

std::optional<strategy> reference_strategy(std::span<result_row const> const rows) {
  auto has = [&](strategy const s) {
    return std::any_of(begin(rows), end(rows),
                       [&](result_row const& r) { return r.strategy_ == s; });
  };
  if (has(strategy::dr_push)) {
    return strategy::dr_push;
  }
  if (has(strategy::dr_pull)) {
    return strategy::dr_pull;
  }
  if (rows.empty()) {
    return std::nullopt;
  }
  return rows.front().strategy_;
}

std::vector<pair_comparison> compare(std::span<result_row const> const rows,
                                     strategy const reference,
                                     peak_profile const& peaks,
                                     duration const penalty) {
  auto const by_query = group(rows);
  std::vector<pair_comparison> out;
  for (auto i = 0U; i != kNumStrategies; ++i) {
    auto const other = static_cast<strategy>(i);
    if (other == reference) {
      continue;
    }
    accumulator all;
    std::map<timestamp, accumulator> by_dep;
    std::map<period, accumulator> by_period;
    for (auto const& [qid, results] : by_query) {
      auto const ref = results.find(reference);
      auto const oth = results.find(other);
      if (ref == end(results) || oth == end(results)) {
        continue;
      }
      auto const d = diff(*ref->second, *oth->second, penalty);
      all.add(d);
      by_dep[ref->second->departure_].add(d);
      by_period[classify_period(ref->second->departure_, peaks)].add(d);
    }
    if (all.diffs_.empty()) {
      continue;
    }
    pair_comparison pc;
    pc.reference_ = reference;
    pc.other_ = other;
    pc.all_ = all.finish();
    for (auto const& [t, acc] : by_dep) {
      pc.by_departure_[t] = acc.finish();
    }
    for (auto const& [p, acc] : by_period) {
      pc.by_period_[p] = acc.finish();
    }
    out.push_back(std::move(pc));
  }
  return out;
}

std::map<strategy, strategy_summary> summarize(
    std::span<result_row const> const rows, timestamp const end_of_day,
    duration const penalty) {
  auto const by_query = group(rows);
  auto const ref = reference_strategy(rows);

  struct sums {
    strategy_summary s_;
    double travel_{0.0};
    std::size_t arrived_{0};
    double effective_{0.0};
    double decisions_{0.0}, server_calls_{0.0}, local_{0.0}, bytes_{0.0},
        scanned_{0.0}, misses_{0.0}, repairs_{0.0};
    double jd_pct_{0.0}, ed_pct_{0.0}, nd_pct_{0.0};
    std::size_t with_decisions_{0};
    std::vector<double> env_sizes_;
  };
  std::map<strategy, sums> acc;
  for (auto const& [qid, results] : by_query) {
    auto const* reference =
        ref.has_value() && results.contains(*ref) ? results.at(*ref) : nullptr;
    for (auto const& [s, row] : results) {
      auto& a = acc[s];
      ++a.s_.n_;
      auto const travel =
          row->arrival_.has_value()
              ? static_cast<double>(*row->arrival_ - row->departure_)
              : 0.0;
      if (row->arrival_.has_value()) {
        a.travel_ += travel;
        ++a.arrived_;
        a.effective_ += travel;
      } else {
        ++a.s_.stranded_;
        auto const base = reference != nullptr && reference->arrival_.has_value()
                              ? *reference->arrival_
                              : end_of_day;
        a.effective_ += static_cast<double>(base + penalty - row->departure_);
      }
      a.decisions_ += static_cast<double>(row->decisions_);
      a.server_calls_ += static_cast<double>(row->server_calls_);
      a.local_ += static_cast<double>(row->local_replans_);
      a.bytes_ += static_cast<double>(row->pushed_bytes_);
      a.scanned_ += static_cast<double>(row->scanned_server_ + row->scanned_edge_);
      a.misses_ += static_cast<double>(row->misses_);
      a.repairs_ += static_cast<double>(row->repairs_);
      a.s_.repair_failures_ += row->repair_failures_;
      auto const tagged =
          row->journey_delayed_ + row->envelope_delayed_ + row->neither_delayed_;
      if (tagged != 0U) {
        ++a.with_decisions_;
        auto const t = static_cast<double>(tagged);
        a.jd_pct_ += 100.0 * static_cast<double>(row->journey_delayed_) / t;
        a.ed_pct_ += 100.0 * static_cast<double>(row->envelope_delayed_) / t;
        a.nd_pct_ += 100.0 * static_cast<double>(row->neither_delayed_) / t;
      }
      if (row->envelope_builds_ != 0U) {
        a.env_sizes_.push_back(static_cast<double>(row->envelope_size_initial_));
      }
    }
  }

  std::map<strategy, strategy_summary> out;
  for (auto& [s, a] : acc) {
    auto const n = static_cast<double>(a.s_.n_);
    auto& r = out[s];
    r = a.s_;
    r.mean_travel_time_s_ =
        a.arrived_ == 0U ? 0.0 : a.travel_ / static_cast<double>(a.arrived_);
    r.mean_effective_travel_time_s_ = a.effective_ / n;
    r.mean_decisions_ = a.decisions_ / n;
    r.mean_server_calls_ = a.server_calls_ / n;
    r.mean_local_replans_ = a.local_ / n;
    r.mean_pushed_bytes_ = a.bytes_ / n;
    r.mean_scanned_ = a.scanned_ / n;
    r.mean_misses_ = a.misses_ / n;
    r.mean_repairs_ = a.repairs_ / n;
    if (a.with_decisions_ != 0U) {
      auto const k = static_cast<double>(a.with_decisions_);
      r.mean_journey_delayed_pct_ = a.jd_pct_ / k;
      r.mean_envelope_delayed_pct_ = a.ed_pct_ / k;
      r.mean_neither_delayed_pct_ = a.nd_pct_ / k;
    }
    if (!a.env_sizes_.empty()) {
      auto& v = a.env_sizes_;
      std::sort(begin(v), end(v));
      auto const m = v.size() / 2U;
      r.median_envelope_size_ = v.size() % 2U == 1U ? v[m] : (v[m - 1U] + v[m]) / 2.0;
    }
  }
  return out;
}

}  // namespace replan
