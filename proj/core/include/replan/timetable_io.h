#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "replan/timetable.h"

namespace replan {

constexpr std::uint32_t kTimetableCacheVersion = 1U;

// FNV-1a over the canonical binary encoding. Identical timetables (including
// every ordering) have identical fingerprints.
std::uint64_t fingerprint(timetable const&);

std::vector<std::uint8_t> serialize(timetable const&);

// Throws error_kind::parse on malformed input and error_kind::fingerprint if
// the stored fingerprint does not match the content.
timetable deserialize_timetable(std::span<std::uint8_t const>);

void write_timetable(std::filesystem::path const&, timetable const&);
timetable read_timetable(std::filesystem::path const&);

}  // namespace replan
