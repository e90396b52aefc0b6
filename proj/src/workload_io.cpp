#include "wld/workload_io.hpp"

#include <algorithm>

#include "json.hpp"

#include "wld/csv.hpp"
#include "wld/errors.hpp"
#include "wld/text.hpp"

namespace wld {

namespace {

bool looks_like_jsonl(const std::string& text) {
  std::string_view t = trim(text);
  return !t.empty() && t.front() == '{';
}

double required_number(const std::string& raw, const std::string& what, std::size_t line) {
  auto v = parse_number(raw);
  if (!v) throw FormatError("query log line " + std::to_string(line) + ": " + what + " is not a number");
  return *v;
}

QueryLog parse_jsonl(const std::string& text) {
  QueryLog log;
  log.columns = {"query", "time", "nrows"};
  auto lines = split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError("query log line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("query") || !obj.contains("time") || !obj.contains("nrows")) {
      throw FormatError("query log line " + std::to_string(i + 1) + ": needs query, time and nrows");
    }
    QueryRecord rec;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      std::string value = it->is_string() ? it->get<std::string>() : it->dump();
      if (it.key() == "query") {
        rec.text = value;
      } else if (it.key() == "time") {
        rec.time = required_number(value, "time", i + 1);
      } else if (it.key() == "nrows") {
        rec.nrows = required_number(value, "nrows", i + 1);
      } else {
        rec.fields[it.key()] = value;
        if (std::find(log.columns.begin(), log.columns.end(), it.key()) == log.columns.end()) {
          log.columns.push_back(it.key());
        }
      }
    }
    log.records.push_back(std::move(rec));
  }
  return log;
}

QueryLog parse_csv_log(const std::string& text) {
  csv::Table table = csv::parse(text);
  int q = table.column("query");
  int t = table.column("time");
  int n = table.column("nrows");
  if (q < 0 || t < 0 || n < 0) throw FormatError("query log header needs query, time and nrows columns");
  QueryLog log;
  log.columns = table.header;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    QueryRecord rec;
    rec.text = row[q];
    rec.time = required_number(row[t], "time", r + 2);
    rec.nrows = required_number(row[n], "nrows", r + 2);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (static_cast<int>(c) == q || static_cast<int>(c) == t || static_cast<int>(c) == n) continue;
      rec.fields[table.header[c]] = row[c];
    }
    log.records.push_back(std::move(rec));
  }
  return log;
}

}  // namespace

QueryLog parse_query_log(const std::string& text) {
  if (trim(text).empty()) return {};
  return looks_like_jsonl(text) ? parse_jsonl(text) : parse_csv_log(text);
}

QueryLog read_query_log(const std::string& path) { return parse_query_log(read_text_file(path)); }

std::string format_coo(const std::vector<ClauseTokenMap>& rows) {
  std::string out = "row,feature_name,count\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [name, count] : rows[r]) {
      out += csv::format_row({std::to_string(r), name, std::to_string(count)});
    }
  }
  return out;
}

std::string format_dictionary(const std::vector<std::string>& names) {
  std::string out = "feature_name,feature_id\n";
  for (std::size_t i = 0; i < names.size(); ++i) out += csv::format_row({names[i], std::to_string(i)});
  return out;
}

std::string format_rejects(const WorkloadMatrix& matrix) {
  std::string out;
  for (const auto& r : matrix.rejected) {
    nlohmann::json j = {{"record", r.record},
                        {"error", std::string(sql::to_string(r.kind))},
                        {"offset", r.offset},
                        {"message", r.message}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<ClauseTokenMap> parse_coo(const std::string& text) {
  csv::Table table = csv::parse(text);
  int r = table.column("row");
  int f = table.column("feature_name");
  int c = table.column("count");
  if (r < 0 || f < 0 || c < 0) throw FormatError("coo header must be row,feature_name,count");
  std::vector<ClauseTokenMap> rows;
  for (const auto& line : table.rows) {
    auto row = parse_number(line[r]);
    auto count = parse_number(line[c]);
    if (!row || *row < 0 || !count || *count < 1) throw FormatError("coo: bad entry for " + line[f]);
    std::size_t idx = static_cast<std::size_t>(*row);
    if (rows.size() <= idx) rows.resize(idx + 1);
    rows[idx][line[f]] = static_cast<int>(*count);
  }
  return rows;
}

}  // namespace wld
