#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wld::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or -1.
  int column(std::string_view name) const;
};

/// RFC 4180 with a mandatory header row. Rows must match the header width.
/// Throws FormatError with the 1-based line number.
Table parse(std::string_view text);
Table read_file(const std::string& path);

std::string escape(std::string_view field);
std::string format_row(const std::vector<std::string>& fields);

}  // namespace wld::csv
