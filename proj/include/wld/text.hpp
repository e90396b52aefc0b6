#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wld {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Shortest representation that parses back to the same double.
std::string format_number(double v);
/// Rounded to `digits` significant digits, for human display.
std::string format_display(double v, int digits = 4);
/// Whole-string parse; accepts "inf"/"-inf". Returns nullopt on junk.
std::optional<double> parse_number(std::string_view s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace wld
