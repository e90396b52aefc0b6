#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wld/dataset.hpp"
#include "wld/redundancy.hpp"
#include "wld/search.hpp"

namespace wld {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Finite doubles as numbers; inf/-inf/nan as the strings "inf", "-inf", "nan".
json number_json(double v);
double number_from_json(const json& v);  // throws FormatError

struct RunInfo {
  std::string target_description;
  SearchConfig config;
};

json subgroup_to_json(const Subgroup& s, const Dataset& data, const MeasureSpec& m, std::size_t rank);
json results_to_json(const ResultSet& rs, const Dataset& data, const RunInfo& info);

/// Subgroups read back from a results document. Extents are rebuilt over the
/// union of object ids listed in the document.
struct LoadedResults {
  json document;
  std::vector<std::string> object_ids;
  std::vector<Subgroup> subgroups;
};

LoadedResults parse_results(const std::string& text);  // throws FormatError

json dendrogram_to_json(const Dendrogram& d);
json truncation_to_json(const Truncation& t, const Dendrogram& d);

enum class DedupMode { None, Greedy, Hac };

struct DedupConfig {
  DedupMode mode = DedupMode::None;
  double theta = 0.5;
  std::optional<std::size_t> clusters;
  std::optional<double> distance;
  bool strict = false;
};

DedupMode parse_dedup_mode(std::string_view s);  // none, greedy, hac; throws ConfigError

/// Applies redundancy reduction to a results document whose `subgroups`
/// array lines up with `ranked`. Greedy keeps the survivors; HAC keeps one
/// representative per cluster and attaches the dendrogram.
json apply_dedup(json document, const std::vector<Subgroup>& ranked, const DedupConfig& dedup);

/// Pretty-printed with a trailing newline.
std::string dump(const json& j);

}  // namespace wld
