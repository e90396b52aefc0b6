#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wld {

/// Exit codes: 0 ok, 1 I/O or malformed input, 2 usage or configuration.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Splits a script into statements at top-level semicolons, honouring quotes
/// and comments. Blank statements are dropped.
std::vector<std::string> split_sql_statements(const std::string& text);

}  // namespace wld
