#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wld/sql_parser.hpp"

namespace wld {

/// Feature name -> occurrence count. Every stored count is >= 1.
using ClauseTokenMap = std::map<std::string, int>;

ClauseTokenMap featurize(const sql::QueryAst& resolved);

/// tokenize + parse + resolve + featurize. Throws sql::SqlError.
ClauseTokenMap featurize_query(std::string_view text);

struct QueryRecord {
  std::string text;
  double time = 0.0;
  double nrows = 0.0;
  std::map<std::string, std::string> fields;  // every other input column, raw
};

struct Rejection {
  std::size_t record = 0;  // index in the input stream
  sql::SqlErrorKind kind = sql::SqlErrorKind::SyntaxError;
  std::size_t offset = 0;
  std::string message;
};

struct WorkloadMatrix {
  std::vector<std::size_t> accepted;   // input index of each row
  std::vector<ClauseTokenMap> rows;
  std::vector<Rejection> rejected;
  std::size_t unresolved_references = 0;

  /// Feature names sorted, which is also their id order.
  std::vector<std::string> dictionary() const;
};

/// Featurizes every record; failures are reported per record and never abort
/// the batch. Row order follows input order for any thread count.
WorkloadMatrix parse_workload(const std::vector<QueryRecord>& records, std::size_t threads = 1);

}  // namespace wld
