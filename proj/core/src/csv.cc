#include "replan/csv.h"

#include <fstream>
#include <sstream>

#include "replan/error.h"

namespace replan {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

csv_table csv_table::parse(std::string_view content, std::string name) {
  if (content.starts_with("\xEF\xBB\xBF")) {
    content.remove_prefix(3);
  }

  csv_table t;
  t.name_ = std::move(name);

  std::vector<std::string> record;
  std::string field;
  auto in_quotes = false;
  auto line = std::size_t{1};
  auto record_line = std::size_t{1};
  auto field_started = false;

  auto const end_record = [&]() {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
    auto const blank = record.size() == 1U && trim(record.front()).empty();
    if (!blank) {
      if (t.header_.empty()) {
        for (auto& h : record) {
          t.header_.emplace_back(trim(h));
        }
      } else {
        t.rows_.push_back(std::move(record));
        t.lines_.push_back(record_line);
      }
    }
    record.clear();
  };

  for (auto i = std::size_t{0}; i < content.size(); ++i) {
    auto const ch = content[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') {
          ++line;
        }
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field_started || trim(field).empty()) {
          field.clear();
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(ch);
        }
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r': break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
        break;
    }
  }
  if (in_quotes) {
    throw error{error_kind::parse,
                t.name_ + ": unterminated quoted field starting near line " +
                    std::to_string(record_line)};
  }
  if (field_started || !field.empty() || !record.empty()) {
    end_record();
  }
  if (t.header_.empty()) {
    throw error{error_kind::parse, t.name_ + ": missing header row"};
  }
  return t;
}

csv_table csv_table::read(std::filesystem::path const& p) {
  std::ifstream in{p, std::ios::binary};
  if (!in) {
    throw error{error_kind::parse, "cannot open " + p.string()};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), p.filename().string());
}

std::optional<std::size_t> csv_table::column(std::string_view const name) const {
  for (auto i = std::size_t{0}; i != header_.size(); ++i) {
    if (header_[i] == name) {
      return i;
    }
  }
  return std::nullopt;
}

std::size_t csv_table::required_column(std::string_view const name) const {
  auto const c = column(name);
  if (!c.has_value()) {
    throw error{error_kind::parse,
                name_ + ": missing required column \"" + std::string{name} +
                    "\""};
  }
  return *c;
}

std::string_view csv_table::at(std::size_t const row,
                               std::size_t const col) const {
  auto const& r = rows_[row];
  return col < r.size() ? trim(r[col]) : std::string_view{};
}

std::string_view csv_table::get(std::size_t const row,
                                std::optional<std::size_t> const col) const {
  return col.has_value() ? at(row, *col) : std::string_view{};
}

}  // namespace replan
