#include "wld/results_json.hpp"

#include <cmath>
#include <map>

#include "wld/errors.hpp"
#include "wld/text.hpp"

namespace wld {

json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double number_from_json(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    if (auto d = parse_number(v.get<std::string>())) return *d;
    if (v.get<std::string>() == "nan") return std::nan("");
  }
  throw FormatError("expected a number, got " + v.dump());
}

json subgroup_to_json(const Subgroup& s, const Dataset& data, const MeasureSpec& m, std::size_t rank) {
  json j;
  j["rank"] = rank;
  j["pattern"] = s.text;
  j["depth"] = s.pattern.depth();
  j["size"] = s.stats.size;
  j["support"] = number_json(s.stats.sup);
  j["mean"] = number_json(s.stats.mean);
  j["median"] = number_json(s.stats.median);
  j["std"] = number_json(s.stats.std);
  if (s.stats.precision) j["precision"] = number_json(*s.stats.precision);
  j["score"] = number_json(s.score.value);
  j["degenerate"] = s.score.degenerate;
  j["measure"] = m.name();
  json objects = json::array();
  s.extent.for_each([&](std::size_t i) { objects.push_back(data.object_id(i)); });
  j["objects"] = std::move(objects);
  return j;
}

json results_to_json(const ResultSet& rs, const Dataset& data, const RunInfo& info) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = WLD_VERSION;
  j["measure"] = rs.measure.name();
  j["algorithm"] = std::string(to_string(info.config.algorithm));
  j["config"] = {{"k", info.config.k},
                 {"depth", info.config.depth},
                 {"min_support", info.config.min_support},
                 {"beam_width", info.config.beam_width},
                 {"bins", info.config.selectors.bins}};
  json target = {{"description", info.target_description},
                 {"binary", rs.global.binary},
                 {"n", rs.global.n},
                 {"mean", number_json(rs.global.mean)},
                 {"median", number_json(rs.global.median)}};
  if (rs.global.binary) target["positives"] = rs.global.positives;
  j["target"] = std::move(target);
  j["incomplete"] = rs.incomplete;
  j["cancelled"] = rs.cancelled;
  json subs = json::array();
  for (std::size_t i = 0; i < rs.entries.size(); ++i) {
    subs.push_back(subgroup_to_json(rs.entries[i], data, rs.measure, i + 1));
  }
  j["subgroups"] = std::move(subs);
  return j;
}

LoadedResults parse_results(const std::string& text) {
  LoadedResults out;
  try {
    out.document = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("results: ") + e.what());
  }
  const json& doc = out.document;
  if (!doc.is_object() || !doc.contains("subgroups") || !doc["subgroups"].is_array()) {
    throw FormatError("results: missing subgroups array");
  }
  if (doc.value("schema_version", 0) != kSchemaVersion) throw FormatError("results: unsupported schema_version");

  std::map<std::string, std::size_t> index;
  try {
    for (const auto& s : doc["subgroups"]) {
      for (const auto& id : s.at("objects")) {
        if (index.emplace(id.get<std::string>(), out.object_ids.size()).second) {
          out.object_ids.push_back(id.get<std::string>());
        }
      }
    }
    for (const auto& s : doc["subgroups"]) {
      Subgroup sg;
      sg.text = s.at("pattern").get<std::string>();
      sg.extent = Extent(out.object_ids.size());
      for (const auto& id : s.at("objects")) sg.extent.set(index.at(id.get<std::string>()));
      sg.stats.size = s.at("size").get<std::size_t>();
      sg.stats.sup = number_from_json(s.at("support"));
      sg.stats.mean = number_from_json(s.at("mean"));
      sg.stats.median = number_from_json(s.at("median"));
      if (s.contains("std")) sg.stats.std = number_from_json(s["std"]);
      if (s.contains("precision")) sg.stats.precision = number_from_json(s["precision"]);
      sg.score.value = number_from_json(s.at("score"));
      sg.score.degenerate = s.value("degenerate", false);
      out.subgroups.push_back(std::move(sg));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("results: ") + e.what());
  }
  return out;
}

namespace {

json node_json(const Dendrogram& d, std::size_t node) {
  if (node < d.leaves) {
    return {{"leaf", node}, {"pattern", d.labels[node]}, {"score", number_json(d.scores[node])}};
  }
  const DendrogramNode& m = d.merges[node - d.leaves];
  return {{"distance", m.distance},
          {"size", m.size},
          {"children", json::array({node_json(d, m.left), node_json(d, m.right)})}};
}

}  // namespace

json dendrogram_to_json(const Dendrogram& d) {
  return node_json(d, d.merges.empty() ? 0 : d.leaves + d.merges.size() - 1);
}

json truncation_to_json(const Truncation& t, const Dendrogram& d) {
  json clusters = json::array();
  for (const auto& c : t.clusters) {
    json members = json::array();
    for (auto m : c.members) members.push_back(d.labels[m]);
    clusters.push_back({{"representative", d.labels[c.representative]},
                        {"score", number_json(d.scores[c.representative])},
                        {"members", std::move(members)}});
  }
  return {{"requested", t.requested}, {"infeasible", t.infeasible}, {"clusters", std::move(clusters)}};
}

DedupMode parse_dedup_mode(std::string_view s) {
  if (s == "none") return DedupMode::None;
  if (s == "greedy") return DedupMode::Greedy;
  if (s == "hac") return DedupMode::Hac;
  throw ConfigError("unknown dedup mode: " + std::string(s) + " (valid: none, greedy, hac)");
}

json apply_dedup(json doc, const std::vector<Subgroup>& ranked, const DedupConfig& dedup) {
  if (dedup.mode == DedupMode::None) return doc;
  const json original = doc.at("subgroups");
  if (original.size() != ranked.size()) throw FormatError("results: subgroup list does not match");
  std::vector<std::size_t> keep;
  json info;
  info["input_count"] = ranked.size();
  if (dedup.mode == DedupMode::Greedy) {
    keep = greedy_select_indices(ranked, dedup.theta);
    info["mode"] = "greedy";
    info["theta"] = dedup.theta;
  } else {
    if (dedup.clusters.has_value() == dedup.distance.has_value()) {
      throw ConfigError("hac needs exactly one of a cluster count or a cut distance");
    }
    info["mode"] = "hac";
    info["linkage"] = "average";
    if (!ranked.empty()) {
      Dendrogram d = hierarchical_cluster(ranked);
      Truncation t = dedup.clusters ? truncate_to_count(d, *dedup.clusters, dedup.strict)
                                    : truncate_at_distance(d, *dedup.distance);
      for (const auto& c : t.clusters) keep.push_back(c.representative);
      info["dendrogram"] = dendrogram_to_json(d);
      info["truncation"] = truncation_to_json(t, d);
      if (dedup.distance) info["distance"] = *dedup.distance;
    }
    if (dedup.clusters) info["clusters"] = *dedup.clusters;
  }
  json subs = json::array();
  for (std::size_t r = 0; r < keep.size(); ++r) {
    json entry = original[keep[r]];
    entry["rank"] = r + 1;
    subs.push_back(std::move(entry));
  }
  doc["subgroups"] = std::move(subs);
  doc["dedup"] = std::move(info);
  return doc;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace wld
