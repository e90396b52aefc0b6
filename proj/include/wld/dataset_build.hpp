#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wld/csv.hpp"
#include "wld/dataset.hpp"
#include "wld/workload_io.hpp"

namespace wld {

/// Header cell `name:kind` or `name:kind{a|b|c}`; untyped cells have no kind.
struct ColumnHeader {
  std::string name;
  std::optional<AttributeKind> kind;
  std::vector<std::string> declared;
};

ColumnHeader parse_column_header(std::string_view cell);

/// Epoch seconds or ISO 8601 (`2021-03-04T10:20:30`, optional fraction and Z), UTC.
std::optional<double> parse_timestamp(std::string_view text);

struct BuildInputs {
  const QueryLog* queries = nullptr;
  const std::vector<ClauseTokenMap>* features = nullptr;  // aligned with queries->records
  std::vector<std::string> dictionary;                    // token column order; sorted names when empty
  const csv::Table* env = nullptr;
  const csv::Table* alerts = nullptr;  // server, start, end, alert, level
  const csv::Table* ash = nullptr;     // server, start, end, <category>:numeric ...
};

struct BuildOptions {
  std::vector<std::string> join_key;
  std::string server_column = "serverName";
  std::string timestamp_column = "timestamp";
  std::vector<std::string> alert_names = {"manyActiveSessions", "blockedSessions", "poolAlmostFull", "anomalyASH"};
  std::vector<std::string> alert_levels = {"Info", "Alarm", "Critical", "Blocking"};
};

struct BuildReport {
  std::size_t missing_join_keys = 0;
};

/// One object per query record. Attribute order: query tokens, env columns,
/// alerts, ASH categories, then typed query-log columns in header order.
Dataset build_dataset(const BuildInputs& inputs, const BuildOptions& options, BuildReport* report = nullptr);

}  // namespace wld
