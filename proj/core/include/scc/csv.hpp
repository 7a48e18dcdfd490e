#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace scc {

/// Comma-separated table with a mandatory header row. Quoting is not
/// supported; fields are trimmed of surrounding whitespace and blank lines
/// are skipped.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  /// Column index by name; throws InputError naming the source when absent.
  std::size_t column(std::string_view name) const;
  /// Parses a double, reporting source:line and column on failure.
  double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(std::istream& in, std::string source);
CsvTable read_csv_file(const std::string& path);
CsvTable parse_csv(std::string_view text, std::string source);

}  // namespace scc
