#include "replan/footpaths.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "replan/error.h"

namespace replan {

namespace {

struct union_find {
  explicit union_find(std::size_t const n) : parent_(n) {
    std::iota(begin(parent_), end(parent_), 0U);
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::uint32_t const a, std::uint32_t const b) {
    auto const ra = find(a);
    auto const rb = find(b);
    if (ra != rb) {
      parent_[std::max(ra, rb)] = std::min(ra, rb);
    }
  }

  std::vector<std::uint32_t> parent_;
};

}  // namespace

std::vector<footpath> close_footpaths(std::span<footpath const> const input,
                                      std::size_t const max_component) {
  std::vector<footpath> out;
  std::map<std::pair<std::uint32_t, std::uint32_t>, duration> edges;
  std::vector<std::uint32_t> nodes;
  for (auto const& f : input) {
    if (f.duration_ < 0) {
      throw error{error_kind::validation,
                  "footpath " + std::to_string(f.from_.v()) + " -> " +
                      std::to_string(f.to_.v()) + " has negative duration"};
    }
    if (f.from_ == f.to_) {
      out.push_back(f);
      continue;
    }
    auto const key = std::pair{f.from_.v(), f.to_.v()};
    auto const it = edges.find(key);
    if (it == end(edges) || it->second > f.duration_) {
      edges[key] = f.duration_;
    }
    nodes.push_back(f.from_.v());
    nodes.push_back(f.to_.v());
  }
  std::sort(begin(nodes), end(nodes));
  nodes.erase(std::unique(begin(nodes), end(nodes)), end(nodes));

  auto const local = [&](std::uint32_t const s) {
    return static_cast<std::uint32_t>(
        std::lower_bound(begin(nodes), end(nodes), s) - begin(nodes));
  };

  std::vector<std::vector<std::pair<std::uint32_t, duration>>> adj(nodes.size());
  union_find uf{nodes.size()};
  for (auto const& [key, d] : edges) {
    auto const a = local(key.first);
    auto const b = local(key.second);
    adj[a].emplace_back(b, d);
    uf.unite(a, b);
  }

  std::vector<std::uint32_t> component_size(nodes.size(), 0U);
  for (auto i = 0U; i != nodes.size(); ++i) {
    ++component_size[uf.find(i)];
  }
  for (auto i = 0U; i != nodes.size(); ++i) {
    if (component_size[i] > max_component) {
      throw error{error_kind::validation,
                  "footpath component around stop " + std::to_string(nodes[i]) +
                      " has " + std::to_string(component_size[i]) +
                      " stops (limit " + std::to_string(max_component) + ")"};
    }
  }

  using entry = std::pair<duration, std::uint32_t>;
  std::vector<duration> dist(nodes.size(), kUnreachable);
  std::vector<std::uint32_t> touched;
  for (auto src = 0U; src != nodes.size(); ++src) {
    std::priority_queue<entry, std::vector<entry>, std::greater<>> pq;
    dist[src] = 0;
    touched.push_back(src);
    pq.emplace(0, src);
    while (!pq.empty()) {
      auto const [d, u] = pq.top();
      pq.pop();
      if (d != dist[u]) {
        continue;
      }
      for (auto const& [v, w] : adj[u]) {
        if (d + w < dist[v]) {
          if (dist[v] == kUnreachable) {
            touched.push_back(v);
          }
          dist[v] = d + w;
          pq.emplace(dist[v], v);
        }
      }
    }
    for (auto const v : touched) {
      if (v != src) {
        out.push_back(footpath{stop_idx_t{nodes[src]}, stop_idx_t{nodes[v]},
                               dist[v]});
      }
      dist[v] = kUnreachable;
    }
    touched.clear();
  }

  std::sort(begin(out), end(out), [](footpath const& a, footpath const& b) {
    return std::tie(a.from_, a.to_, a.duration_) <
           std::tie(b.from_, b.to_, b.duration_);
  });
  return out;
}

std::vector<footpath> add_loop_footpaths(std::span<footpath const> const input,
                                         std::size_t const n_stops,
                                         duration const default_loop_duration) {
  if (default_loop_duration < 0) {
    throw error{error_kind::invalid_argument, "negative loop duration"};
  }
  std::vector<duration> loop(n_stops, kUnreachable);
  std::vector<footpath> out;
  for (auto const& f : input) {
    if (f.from_ == f.to_ && f.from_.v() < n_stops) {
      loop[f.from_.v()] = std::min(loop[f.from_.v()], f.duration_);
    } else {
      out.push_back(f);
    }
  }
  for (auto s = 0U; s != n_stops; ++s) {
    out.push_back(footpath{
        stop_idx_t{s}, stop_idx_t{s},
        loop[s] == kUnreachable ? default_loop_duration : loop[s]});
  }
  std::sort(begin(out), end(out), [](footpath const& a, footpath const& b) {
    return std::tie(a.from_, a.to_, a.duration_) <
           std::tie(b.from_, b.to_, b.duration_);
  });
  return out;
}

namespace {

double haversine_m(double const lat1, double const lon1, double const lat2,
                   double const lon2) {
  constexpr auto kEarthRadius = 6371000.0;
  constexpr auto kRad = std::numbers::pi / 180.0;
  auto const dlat = (lat2 - lat1) * kRad;
  auto const dlon = (lon2 - lon1) * kRad;
  auto const a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                 std::cos(lat1 * kRad) * std::cos(lat2 * kRad) *
                     std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(a)));
}

}  // namespace

std::vector<footpath> walking_footpaths(std::span<stop const> const stops,
                                        double const radius_m,
                                        double const speed_mps) {
  std::vector<footpath> out;
  if (radius_m <= 0.0) {
    return out;
  }

  // Grid with cells of roughly radius_m; neighbours are in the 3x3 block.
  auto const cell_deg = radius_m / 111000.0;
  auto const cell_of = [&](double const lat, double const lon) {
    return std::pair{static_cast<std::int64_t>(std::floor(lat / cell_deg)),
                     static_cast<std::int64_t>(std::floor(lon / cell_deg))};
  };
  struct pair_hash {
    std::size_t operator()(std::pair<std::int64_t, std::int64_t> const& p) const {
      return std::hash<std::int64_t>{}(p.first * 1000003 + p.second);
    }
  };
  std::unordered_map<std::pair<std::int64_t, std::int64_t>,
                     std::vector<std::uint32_t>, pair_hash>
      grid;
  for (auto i = 0U; i != stops.size(); ++i) {
    if (stops[i].lat_.has_value() && stops[i].lon_.has_value()) {
      grid[cell_of(*stops[i].lat_, *stops[i].lon_)].push_back(i);
    }
  }

  for (auto i = 0U; i != stops.size(); ++i) {
    if (!stops[i].lat_.has_value() || !stops[i].lon_.has_value()) {
      continue;
    }
    auto const lat = *stops[i].lat_;
    auto const lon = *stops[i].lon_;
    auto const [cy, cx] = cell_of(lat, lon);
    // Longitude cells shrink with latitude; widen the search accordingly.
    auto const lon_span = static_cast<std::int64_t>(std::ceil(
        1.0 / std::max(0.05, std::cos(lat * std::numbers::pi / 180.0))));
    for (auto dy = -1; dy <= 1; ++dy) {
      for (auto dx = -lon_span; dx <= lon_span; ++dx) {
        auto const it = grid.find({cy + dy, cx + dx});
        if (it == end(grid)) {
          continue;
        }
        for (auto const j : it->second) {
          if (j == i) {
            continue;
          }
          auto const d = haversine_m(lat, lon, *stops[j].lat_, *stops[j].lon_);
          if (d <= radius_m) {
            out.push_back(footpath{
                stop_idx_t{i}, stop_idx_t{j},
                static_cast<duration>(std::ceil(d / speed_mps))});
          }
        }
      }
    }
  }
  std::sort(begin(out), end(out), [](footpath const& a, footpath const& b) {
    return std::tie(a.from_, a.to_) < std::tie(b.from_, b.to_);
  });
  return out;
}

}  // namespace replan
