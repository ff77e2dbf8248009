#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace replan {

// RFC-4180 style CSV table with a header row, as used by GTFS. Handles
// quoted fields (including embedded separators, quotes and newlines), a
// UTF-8 BOM and CRLF line endings.
class csv_table {
public:
  static csv_table parse(std::string_view content, std::string name);
  static csv_table read(std::filesystem::path const&);

  std::string const& name() const { return name_; }
  std::size_t size() const { return rows_.size(); }

  std::optional<std::size_t> column(std::string_view) const;

  // Throws error_kind::parse naming the file and the column.
  std::size_t required_column(std::string_view) const;

  std::string_view at(std::size_t row, std::size_t col) const;

  // Empty view when the column is absent.
  std::string_view get(std::size_t row, std::optional<std::size_t> col) const;

  // 1-based line number of a data row in the source file (header = 1).
  std::size_t line(std::size_t row) const { return lines_[row]; }

private:
  std::string name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
};

}  // namespace replan
