#include "replan/error.h"

#include <charconv>
#include <cstdio>

#include "replan/types.h"

namespace replan {

int exit_code(error_kind const kind) noexcept {
  switch (kind) {
    case error_kind::parse: return 2;
    case error_kind::validation: return 3;
    case error_kind::config: return 4;
    case error_kind::infeasible: return 5;
    case error_kind::fingerprint: return 6;
    case error_kind::invalid_argument: return 7;
  }
  return 1;
}

char const* to_string(error_kind const kind) noexcept {
  switch (kind) {
    case error_kind::parse: return "parse error";
    case error_kind::validation: return "validation error";
    case error_kind::config: return "config error";
    case error_kind::infeasible: return "infeasible";
    case error_kind::fingerprint: return "fingerprint mismatch";
    case error_kind::invalid_argument: return "invalid argument";
  }
  return "error";
}

std::string format_time(timestamp const t) {
  if (t == kInfinity) {
    return "inf";
  }
  auto const sign = t < 0 ? "-" : "";
  auto const a = t < 0 ? -static_cast<long>(t) : static_cast<long>(t);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02ld:%02ld:%02ld", sign, a / 3600,
                (a / 60) % 60, a % 60);
  return buf;
}

timestamp parse_time(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }

  int parts[3] = {0, 0, 0};
  auto n = 0;
  auto it = s.data();
  auto const end = s.data() + s.size();
  while (it != end && n < 3) {
    auto const [ptr, ec] = std::from_chars(it, end, parts[n]);
    if (ec != std::errc{} || ptr == it) {
      throw error{error_kind::parse, "bad time \"" + std::string{s} + "\""};
    }
    ++n;
    it = ptr;
    if (it != end) {
      if (*it != ':') {
        throw error{error_kind::parse, "bad time \"" + std::string{s} + "\""};
      }
      ++it;
    }
  }
  if (n < 2 || it != end || parts[1] > 59 || parts[2] > 59 || parts[0] < 0 ||
      parts[1] < 0 || parts[2] < 0) {
    throw error{error_kind::parse, "bad time \"" + std::string{s} + "\""};
  }
  return parts[0] * 3600 + parts[1] * 60 + parts[2];
}

std::uint64_t fnv1a_text(std::string_view const s) {
  auto h = std::uint64_t{0xcbf29ce484222325ULL};
  for (auto const c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t const v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace replan
