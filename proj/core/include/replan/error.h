#pragma once

#include <stdexcept>
#include <string>

namespace replan {

enum class error_kind {
  parse,  // malformed input file
  validation,  // timetable or feed violates an invariant
  config,  // bad configuration or arguments
  infeasible,  // no journey / query cannot be satisfied
  fingerprint,  // cache files out of sync
  invalid_argument,  // API misuse (unknown id etc.)
};

class error : public std::runtime_error {
public:
  error(error_kind const kind, std::string const& msg)
      : std::runtime_error{msg}, kind_{kind} {}

  error_kind kind() const noexcept { return kind_; }

private:
  error_kind kind_;
};

// Process exit code used by the CLI for each error kind.
int exit_code(error_kind) noexcept;

char const* to_string(error_kind) noexcept;

}  // namespace replan
