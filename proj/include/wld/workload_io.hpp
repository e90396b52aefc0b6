#pragma once

#include <string>
#include <vector>

#include "wld/featurize.hpp"

namespace wld {

struct QueryLog {
  std::vector<std::string> columns;  // header order, including query/time/nrows
  std::vector<QueryRecord> records;
};

/// CSV with a header, or newline-delimited JSON objects (chosen by content).
/// Required fields: query, time, nrows. Other fields are kept verbatim.
QueryLog parse_query_log(const std::string& text);
QueryLog read_query_log(const std::string& path);

/// `row,feature_name,count`, rows numbered over accepted queries.
std::string format_coo(const std::vector<ClauseTokenMap>& rows);
/// `feature_name,feature_id`
std::string format_dictionary(const std::vector<std::string>& names);
/// One JSON object per rejected record.
std::string format_rejects(const WorkloadMatrix& matrix);

std::vector<ClauseTokenMap> parse_coo(const std::string& text);

}  // namespace wld
