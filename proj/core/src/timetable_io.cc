#include "replan/timetable_io.h"

#include <fstream>
#include <iterator>

#include "replan/error.h"

#include "binary.h"

namespace replan {

namespace detail {

std::vector<std::uint8_t> read_file(std::filesystem::path const& p) {
  std::ifstream in{p, std::ios::binary};
  if (!in) {
    throw error{error_kind::parse, "cannot open " + p.string()};
  }
  return {std::istreambuf_iterator<char>{in}, std::istreambuf_iterator<char>{}};
}

void write_file(std::filesystem::path const& p,
                std::span<std::uint8_t const> const bytes) {
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out{p, std::ios::binary | std::ios::trunc};
  if (!out) {
    throw error{error_kind::config, "cannot write " + p.string()};
  }
  out.write(reinterpret_cast<char const*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace detail

namespace {

constexpr char kMagic[4] = {'R', 'P', 'T', 'T'};

std::vector<std::uint8_t> body(timetable const& tt) {
  detail::writer w;
  w.put(static_cast<std::uint32_t>(tt.n_stops()));
  for (auto const& s : tt.stops()) {
    w.put_string(s.id_);
    w.put_string(s.name_);
    w.put(static_cast<std::uint8_t>(s.lat_.has_value() && s.lon_.has_value()));
    if (s.lat_.has_value() && s.lon_.has_value()) {
      w.put(*s.lat_);
      w.put(*s.lon_);
    }
  }
  w.put(static_cast<std::uint32_t>(tt.n_trips()));
  for (auto t = 0U; t != tt.n_trips(); ++t) {
    auto const& tr = tt.trips()[t];
    w.put_string(tr.id_);
    w.put_string(tr.gtfs_route_id_);
    w.put(static_cast<std::uint8_t>(tr.mode_));
    w.put(tr.size_);
    for (auto const& c : tt.trip_connections(trip_idx_t{t})) {
      w.put(c.from_.v());
      w.put(c.to_.v());
      w.put(c.dep_);
      w.put(c.arr_);
    }
  }
  w.put(static_cast<std::uint32_t>(tt.footpaths().size()));
  for (auto const& f : tt.footpaths()) {
    w.put(f.from_.v());
    w.put(f.to_.v());
    w.put(f.duration_);
  }
  return std::move(w.buf());
}

}  // namespace

std::uint64_t fingerprint(timetable const& tt) {
  return detail::fnv1a_hash(body(tt));
}

std::vector<std::uint8_t> serialize(timetable const& tt) {
  auto const b = body(tt);
  detail::writer w;
  for (auto const ch : kMagic) {
    w.put(ch);
  }
  w.put(kTimetableCacheVersion);
  w.put(detail::fnv1a_hash(b));
  w.put_bytes(b);
  return std::move(w.buf());
}

timetable deserialize_timetable(std::span<std::uint8_t const> const bytes) {
  detail::reader r{bytes, "timetable cache"};
  for (auto const ch : kMagic) {
    if (r.get<char>() != ch) {
      throw error{error_kind::parse, "timetable cache: bad magic"};
    }
  }
  if (auto const v = r.get<std::uint32_t>(); v != kTimetableCacheVersion) {
    throw error{error_kind::fingerprint,
                "timetable cache: version " + std::to_string(v) +
                    " (expected " + std::to_string(kTimetableCacheVersion) +
                    "); re-run ingest"};
  }
  auto const stored = r.get<std::uint64_t>();
  if (detail::fnv1a_hash(r.rest()) != stored) {
    throw error{error_kind::fingerprint,
                "timetable cache: content does not match its fingerprint"};
  }

  timetable_builder b;
  auto const n_stops = r.get<std::uint32_t>();
  for (auto i = 0U; i != n_stops; ++i) {
    auto id = r.get_string();
    auto name = r.get_string();
    auto lat = std::optional<double>{};
    auto lon = std::optional<double>{};
    if (r.get<std::uint8_t>() != 0U) {
      lat = r.get<double>();
      lon = r.get<double>();
    }
    b.add_stop(std::move(id), std::move(name), lat, lon);
  }
  auto const n_trips = r.get<std::uint32_t>();
  std::vector<timetable_builder::raw_connection> cons;
  for (auto t = 0U; t != n_trips; ++t) {
    auto id = r.get_string();
    auto route = r.get_string();
    auto const mode = r.get<std::uint8_t>();
    if (mode >= kNumModes) {
      throw error{error_kind::parse, "timetable cache: bad transport mode"};
    }
    auto const n = r.get<std::uint32_t>();
    cons.clear();
    for (auto i = 0U; i != n; ++i) {
      auto const from = stop_idx_t{r.get<std::uint32_t>()};
      auto const to = stop_idx_t{r.get<std::uint32_t>()};
      auto const dep = r.get<timestamp>();
      auto const arr = r.get<timestamp>();
      cons.push_back({from, dep, to, arr});
    }
    b.add_trip_connections(std::move(id), cons,
                           static_cast<transport_mode>(mode), std::move(route));
  }
  auto const n_fps = r.get<std::uint32_t>();
  for (auto i = 0U; i != n_fps; ++i) {
    auto const from = stop_idx_t{r.get<std::uint32_t>()};
    auto const to = stop_idx_t{r.get<std::uint32_t>()};
    b.add_footpath(from, to, r.get<duration>());
  }
  if (!r.done()) {
    throw error{error_kind::parse, "timetable cache: trailing bytes"};
  }
  return std::move(b).build();
}

void write_timetable(std::filesystem::path const& p, timetable const& tt) {
  detail::write_file(p, serialize(tt));
}

timetable read_timetable(std::filesystem::path const& p) {
  return deserialize_timetable(detail::read_file(p));
}

}  // namespace replan
