#include "wld/cli.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "wld/csv.hpp"
#include "wld/dataset_build.hpp"
#include "wld/dataset_io.hpp"
#include "wld/digest.hpp"
#include "wld/errors.hpp"
#include "wld/featurize.hpp"
#include "wld/pattern.hpp"
#include "wld/redundancy.hpp"
#include "wld/results_json.hpp"
#include "wld/search.hpp"
#include "wld/service.hpp"
#include "wld/synth.hpp"
#include "wld/text.hpp"
#include "wld/workload_io.hpp"

namespace wld {

namespace fs = std::filesystem;

std::vector<std::string> split_sql_statements(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  bool code = false;  // anything besides comments and whitespace
  auto flush = [&] {
    if (code) out.emplace_back(trim(cur));
    cur.clear();
    code = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\'' || c == '"') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != c) ++j;
      cur.append(text, i, j - i + 1);
      i = j;
      code = true;
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      std::size_t j = text.find('\n', i);
      if (j == std::string::npos) j = text.size();
      cur.append(text, i, j - i);
      i = j - 1;
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      std::size_t j = text.find("*/", i + 2);
      j = j == std::string::npos ? text.size() : j + 2;
      cur.append(text, i, j - i);
      i = j - 1;
    } else if (c == ';') {
      flush();
    } else {
      cur += c;
      if (!std::isspace(static_cast<unsigned char>(c))) code = true;
    }
  }
  flush();
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

// ------------------------------------------------------------------ parse

struct ParseArgs {
  std::string input;
  std::string out;
  std::string format = "auto";
  std::size_t threads = 1;
};

QueryLog load_queries(const std::string& path, const std::string& format) {
  std::string fmt = format;
  if (fmt == "auto") fmt = fs::path(path).extension() == ".sql" ? "sql" : "log";
  if (fmt == "sql") {
    QueryLog log;
    log.columns = {"query"};
    for (auto& s : split_sql_statements(read_text_file(path))) {
      QueryRecord r;
      r.text = std::move(s);
      log.records.push_back(std::move(r));
    }
    return log;
  }
  if (fmt != "log") throw ConfigError("unknown input format: " + format + " (valid: auto, sql, log)");
  const std::string text = read_text_file(path);
  if (trim(text).empty()) return {};
  return parse_query_log(text);
}

int cmd_parse(const ParseArgs& a, std::ostream& out) {
  QueryLog log = load_queries(a.input, a.format);
  WorkloadMatrix m = parse_workload(log.records, a.threads);
  ensure_dir(a.out);
  const auto dict = m.dictionary();
  write_text_file(a.out + "/features.coo", format_coo(m.rows));
  write_text_file(a.out + "/features.dict.csv", format_dictionary(dict));
  write_text_file(a.out + "/rejects.jsonl", format_rejects(m));
  json report = {{"records", log.records.size()},
                 {"accepted", m.accepted.size()},
                 {"rejected", m.rejected.size()},
                 {"unresolved_references", m.unresolved_references},
                 {"features", dict.size()}};
  write_text_file(a.out + "/parse_report.json", dump(report));
  out << "records " << log.records.size() << ", accepted " << m.accepted.size() << ", rejected " << m.rejected.size()
      << ", features " << dict.size() << "\n";
  if (m.accepted.empty()) throw UsageError("no query could be parsed");
  return 0;
}

// ------------------------------------------------------------------ build

struct BuildArgs {
  std::string queries, features, dictionary, env, alerts, ash, out;
  std::vector<std::string> join_key;
  std::vector<std::string> alert_names;
  std::string server_column = "serverName";
  std::string timestamp_column = "timestamp";
  std::size_t threads = 1;
};

int cmd_build(const BuildArgs& a, std::ostream& out) {
  QueryLog log = read_query_log(a.queries);
  std::vector<ClauseTokenMap> features;
  std::vector<std::string> dictionary;
  if (!a.features.empty()) {
    features = parse_coo(read_text_file(a.features));
  } else {
    WorkloadMatrix m = parse_workload(log.records, a.threads);
    QueryLog kept;
    kept.columns = log.columns;
    for (auto i : m.accepted) kept.records.push_back(log.records[i]);
    if (!m.rejected.empty()) out << "skipped " << m.rejected.size() << " unparseable queries\n";
    log = std::move(kept);
    features = std::move(m.rows);
  }
  if (!a.dictionary.empty()) {
    csv::Table d = csv::read_file(a.dictionary);
    if (d.header.empty()) throw FormatError("dictionary has no header");
    std::vector<std::pair<long long, std::string>> ids;
    for (const auto& row : d.rows) {
      auto id = parse_number(row.size() > 1 ? row[1] : "");
      ids.emplace_back(id ? static_cast<long long>(*id) : static_cast<long long>(ids.size()), row[0]);
    }
    std::stable_sort(ids.begin(), ids.end());
    for (auto& [id, name] : ids) dictionary.push_back(name);
  }
  csv::Table env, alerts, ash;
  BuildInputs in;
  in.queries = &log;
  in.features = &features;
  in.dictionary = dictionary;
  if (!a.env.empty()) in.env = &(env = csv::read_file(a.env));
  if (!a.alerts.empty()) in.alerts = &(alerts = csv::read_file(a.alerts));
  if (!a.ash.empty()) in.ash = &(ash = csv::read_file(a.ash));
  BuildOptions opt;
  opt.join_key = a.join_key;
  opt.server_column = a.server_column;
  opt.timestamp_column = a.timestamp_column;
  if (!a.alert_names.empty()) opt.alert_names = a.alert_names;
  BuildReport report;
  Dataset data = build_dataset(in, opt, &report);
  save_dataset(data, a.out);
  out << "objects " << data.size() << ", attributes " << data.attribute_count();
  if (report.missing_join_keys) out << ", unmatched env keys " << report.missing_join_keys;
  out << "\n";
  return 0;
}

// ------------------------------------------------------------------ stats

int cmd_stats(const std::string& dir, bool as_json, std::ostream& out) {
  Dataset data = load_dataset(dir);
  DatasetSummary s = summarize(data);
  if (as_json) {
    out << dump({{"n", s.n},
                 {"m", s.m},
                 {"clause_counts", s.clause_counts},
                 {"token_columns", s.token_columns},
                 {"nonzeros", s.nonzeros},
                 {"sparsity", s.sparsity},
                 {"kinds", s.kinds},
                 {"provenances", s.provenances}});
    return 0;
  }
  out << "objects (n)        " << s.n << "\n";
  out << "attributes (m)     " << s.m << "\n";
  out << "token columns      " << s.token_columns << "\n";
  out << "nonzeros           " << s.nonzeros << "\n";
  out << "sparsity           " << format_display(s.sparsity * 100.0) << "%\n";
  for (const char* tag : {"FROM", "JOIN", "SELECT", "WHERE", "GROUPBY", "HAVING", "ORDERBY", "AVG", "SUM", "COUNT",
                          "MIN", "MAX"}) {
    out << std::left << std::setw(19) << (std::string(tag) + " features") << s.clause_counts.at(tag) << "\n";
  }
  for (const auto& [k, v] : s.kinds) out << std::left << std::setw(19) << (k + " attributes") << v << "\n";
  return 0;
}

// ------------------------------------------------------------------- mine

struct MineArgs {
  std::string dataset;
  std::string target;
  std::string target_mode = "numeric";
  std::optional<double> threshold;
  std::vector<std::string> positive_ids;
  std::vector<std::string> filters;
  std::vector<std::string> objects;
  std::string measure = "klosgen:0.5";
  std::string algorithm = "dfs";
  std::size_t width = 50;
  std::size_t k = 10;
  std::size_t depth = 3;
  std::size_t min_support = 10;
  std::size_t bins = 5;
  std::optional<double> time_budget;
  std::size_t threads = 1;
  std::string dedup = "none";
  double theta = 0.5;
  std::optional<std::size_t> clusters;
  std::optional<double> distance;
  bool strict = false;
  std::string out;
  std::string manifest;
  std::string from_manifest;
  bool quiet = false;
};

json mine_config_json(const MineArgs& a) {
  json c = {{"dataset", a.dataset},
            {"target", a.target},
            {"target_mode", a.target_mode},
            {"positive_ids", a.positive_ids},
            {"filters", a.filters},
            {"objects", a.objects},
            {"measure", a.measure},
            {"algorithm", a.algorithm},
            {"beam_width", a.width},
            {"k", a.k},
            {"depth", a.depth},
            {"min_support", a.min_support},
            {"bins", a.bins},
            {"dedup", {{"mode", a.dedup}, {"theta", a.theta}, {"strict", a.strict}}}};
  c["threshold"] = a.threshold ? number_json(*a.threshold) : json(nullptr);
  c["time_budget_seconds"] = a.time_budget ? json(*a.time_budget) : json(nullptr);
  c["dedup"]["clusters"] = a.clusters ? json(*a.clusters) : json(nullptr);
  c["dedup"]["distance"] = a.distance ? json(*a.distance) : json(nullptr);
  return c;
}

void apply_manifest(MineArgs& a, const json& m, bool out_given, bool threads_given) {
  try {
    const json& c = m.at("config");
    a.dataset = c.at("dataset").get<std::string>();
    a.target = c.at("target").get<std::string>();
    a.target_mode = c.at("target_mode").get<std::string>();
    a.threshold = c.at("threshold").is_null() ? std::nullopt : std::optional<double>(number_from_json(c["threshold"]));
    a.positive_ids = c.at("positive_ids").get<std::vector<std::string>>();
    a.filters = c.at("filters").get<std::vector<std::string>>();
    a.objects = c.at("objects").get<std::vector<std::string>>();
    a.measure = c.at("measure").get<std::string>();
    a.algorithm = c.at("algorithm").get<std::string>();
    a.width = c.at("beam_width").get<std::size_t>();
    a.k = c.at("k").get<std::size_t>();
    a.depth = c.at("depth").get<std::size_t>();
    a.min_support = c.at("min_support").get<std::size_t>();
    a.bins = c.at("bins").get<std::size_t>();
    a.time_budget = c.at("time_budget_seconds").is_null() ? std::nullopt
                                                          : std::optional<double>(c["time_budget_seconds"].get<double>());
    const json& d = c.at("dedup");
    a.dedup = d.at("mode").get<std::string>();
    a.theta = d.at("theta").get<double>();
    a.strict = d.at("strict").get<bool>();
    a.clusters = d.at("clusters").is_null() ? std::nullopt : std::optional<std::size_t>(d["clusters"].get<std::size_t>());
    a.distance = d.at("distance").is_null() ? std::nullopt : std::optional<double>(d["distance"].get<double>());
    if (!out_given) a.out = m.at("outputs").at("results").get<std::string>();
    if (!threads_given) a.threads = m.at("threads").get<std::size_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
}

std::string default_manifest_path(const std::string& out) {
  fs::path p(out);
  fs::path stem = p.extension() == ".json" ? p.parent_path() / p.stem() : p;
  return stem.string() + ".manifest.json";
}

void print_results(const json& doc, std::ostream& out) {
  const auto& subs = doc.at("subgroups");
  out << "measure " << doc.at("measure").get<std::string>() << ", " << subs.size() << " subgroups";
  if (doc.value("incomplete", false)) out << " (incomplete)";
  out << "\n";
  for (const auto& s : subs) {
    double score = number_from_json(s.at("score"));
    out << std::right << std::setw(3) << s.at("rank").get<std::size_t>() << "  score " << std::left << std::setw(10)
        << format_display(score) << " size " << std::setw(6) << s.at("size").get<std::size_t>() << " "
        << s.at("pattern").get<std::string>() << "\n";
  }
}

int cmd_mine(MineArgs a, bool out_given, bool threads_given, std::ostream& out) {
  const auto t0 = Clock::now();
  json manifest_in;
  if (!a.from_manifest.empty()) {
    try {
      manifest_in = json::parse(read_text_file(a.from_manifest));
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("manifest: ") + e.what());
    }
    apply_manifest(a, manifest_in, out_given, threads_given);
  }
  if (a.dataset.empty()) throw UsageError("--dataset is required");
  if (a.target.empty() && a.target_mode != "selection") throw UsageError("--target is required");
  if (a.out.empty()) throw UsageError("--out is required");

  SearchConfig config;
  config.k = a.k;
  config.depth = a.depth;
  config.min_support = a.min_support;
  config.measure = parse_measure(a.measure);
  config.algorithm = parse_algorithm(a.algorithm);
  config.beam_width = a.width;
  config.time_budget_seconds = a.time_budget;
  config.threads = std::max<std::size_t>(1, a.threads);
  config.selectors.bins = a.bins;
  validate(config);
  DedupConfig dedup;
  dedup.mode = parse_dedup_mode(a.dedup);
  dedup.theta = a.theta;
  dedup.clusters = a.clusters;
  dedup.distance = a.distance;
  dedup.strict = a.strict;
  if (!(dedup.theta >= 0 && dedup.theta <= 1)) throw ConfigError("--theta must be in [0,1]");
  if (dedup.mode == DedupMode::Hac && dedup.clusters.has_value() == dedup.distance.has_value()) {
    throw ConfigError("--dedup hac needs exactly one of --clusters or --distance");
  }
  TargetSpec spec;
  auto mode = parse_target_mode(a.target_mode);
  if (!mode) throw ConfigError("unknown target mode: " + a.target_mode + " (valid: numeric, boolean, thresholded, selection)");
  spec.mode = *mode;
  spec.attribute = a.target;
  spec.threshold = a.threshold;
  spec.positive_ids = a.positive_ids;

  const std::string digest = dataset_digest(a.dataset);
  if (!manifest_in.is_null()) {
    const std::string expected = manifest_in.at("inputs").value("dataset_sha256", std::string());
    if (expected != digest) throw FormatError("dataset " + a.dataset + " differs from the manifest's digest");
  }
  Dataset full = load_dataset(a.dataset);
  std::vector<Predicate> preds;
  for (const auto& f : a.filters) preds.push_back(parse_predicate(f));
  Dataset data = (preds.empty() && a.objects.empty())
                     ? full
                     : full.filter(preds, a.objects.empty() ? std::nullopt
                                                            : std::optional<std::vector<std::string>>(a.objects));
  Target target = derive_target(data, spec);
  const double load_s = seconds_since(t0);

  const auto t1 = Clock::now();
  ResultSet rs = mine(data, target, config);
  const double search_s = seconds_since(t1);

  const auto t2 = Clock::now();
  json doc = apply_dedup(results_to_json(rs, data, RunInfo{target.description, config}), rs.entries, dedup);
  const double dedup_s = seconds_since(t2);
  if (!target.warnings.empty()) doc["warnings"] = target.warnings;

  const std::string text = dump(doc);
  if (fs::path(a.out).has_parent_path()) ensure_dir(fs::path(a.out).parent_path().string());
  write_text_file(a.out, text);

  json manifest = {{"schema_version", kSchemaVersion},
                   {"tool_version", WLD_VERSION},
                   {"command", "mine"},
                   {"config", mine_config_json(a)},
                   {"threads", config.threads},
                   {"inputs", {{"dataset_sha256", digest}}},
                   {"outputs", {{"results", a.out}, {"results_sha256", sha256_hex(text)}}},
                   {"timings",
                    {{"load_seconds", load_s},
                     {"search_seconds", search_s},
                     {"dedup_seconds", dedup_s},
                     {"total_seconds", seconds_since(t0)}}}};
  const std::string manifest_path = a.manifest.empty() ? default_manifest_path(a.out) : a.manifest;
  write_text_file(manifest_path, dump(manifest));
  if (!a.quiet) {
    for (const auto& w : target.warnings) out << "warning: " << w << "\n";
    print_results(doc, out);
  }
  return 0;
}

// ------------------------------------------------------------------ dedup

struct DedupArgs {
  std::string in, out, mode = "greedy";
  double theta = 0.5;
  std::optional<std::size_t> clusters;
  std::optional<double> distance;
  bool strict = false;
};

int cmd_dedup(const DedupArgs& a, std::ostream& out) {
  DedupConfig d;
  d.mode = parse_dedup_mode(a.mode);
  d.theta = a.theta;
  d.clusters = a.clusters;
  d.distance = a.distance;
  d.strict = a.strict;
  if (!(d.theta >= 0 && d.theta <= 1)) throw ConfigError("--theta must be in [0,1]");
  if (d.mode == DedupMode::Hac && d.clusters.has_value() == d.distance.has_value()) {
    throw ConfigError("--mode hac needs exactly one of --clusters or --distance");
  }
  LoadedResults loaded = parse_results(read_text_file(a.in));
  if (loaded.document.contains("dedup")) throw ConfigError("results were already deduplicated");
  if (d.clusters && !loaded.subgroups.empty() && *d.clusters > loaded.subgroups.size()) {
    throw ConfigError("--clusters exceeds the number of subgroups");
  }
  json doc = apply_dedup(loaded.document, loaded.subgroups, d);
  const std::string text = dump(doc);
  if (a.out.empty()) {
    out << text;
  } else {
    write_text_file(a.out, text);
    print_results(doc, out);
  }
  return 0;
}

// ------------------------------------------------------------------ synth

int cmd_synth(const SynthConfig& c, const std::string& model, const std::string& dir, std::ostream& out) {
  SynthConfig cfg = c;
  if (model == "planted") {
    cfg.target_model = TargetModel::Planted;
  } else if (model == "noise") {
    cfg.target_model = TargetModel::Noise;
  } else {
    throw ConfigError("unknown target model: " + model + " (valid: planted, noise)");
  }
  SynthOutput s = synthesize(cfg);
  save_dataset(s.data, dir);
  json truth = {{"n", cfg.n},
                {"tables", cfg.tables},
                {"cols", cfg.cols},
                {"sparsity", cfg.sparsity},
                {"seed", cfg.seed},
                {"target_model", model},
                {"target", "time"},
                {"base_time", cfg.base_time},
                {"noise", cfg.noise_sd},
                {"delta", cfg.delta},
                {"planted_token", s.planted_token},
                {"planted_selector", s.planted_selector},
                {"planted_support", s.planted_support}};
  write_text_file(dir + "/synth.json", dump(truth));
  out << "objects " << s.data.size() << ", token columns " << cfg.tables * cfg.cols;
  if (!s.planted_token.empty()) out << ", planted " << s.planted_selector << " (" << s.planted_support << " objects)";
  out << "\n";
  return 0;
}

// ------------------------------------------------------------------ serve

int cmd_serve(ServiceConfig c, bool port_given, bool upload_given, bool threads_given, std::ostream& out) {
  ServiceConfig env = config_from_env(c);
  if (!port_given) c.port = env.port;
  if (!upload_given) c.max_upload_mb = env.max_upload_mb;
  if (!threads_given) c.threads = env.threads;
  MiningService service(c);
  int port = serve_http(service, [&](int p) { out << "listening on " << c.host << ":" << p << std::endl; });
  if (port < 0) throw IoError("cannot bind " + c.host + ":" + std::to_string(c.port));
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SQL workload subgroup discovery"};
  app.set_version_flag("--version", std::string(WLD_VERSION));
  app.require_subcommand(1);

  ParseArgs pa;
  auto* parse = app.add_subcommand("parse", "featurize a query log or .sql file");
  parse->add_option("--input", pa.input, "CSV/JSONL query log or .sql file")->required();
  parse->add_option("--out", pa.out, "output directory")->required();
  parse->add_option("--format", pa.format, "auto, sql or log");
  parse->add_option("--threads", pa.threads)->check(CLI::PositiveNumber);

  BuildArgs ba;
  auto* build = app.add_subcommand("build", "assemble a dataset directory");
  build->add_option("--queries", ba.queries, "query log (CSV or JSONL)")->required();
  build->add_option("--features", ba.features, "COO features aligned with the log");
  build->add_option("--dictionary", ba.dictionary, "feature_name,feature_id column order");
  build->add_option("--env", ba.env);
  build->add_option("--alerts", ba.alerts);
  build->add_option("--ash", ba.ash);
  build->add_option("--join-key", ba.join_key, "env join column(s)");
  build->add_option("--alert-names", ba.alert_names)->delimiter(',');
  build->add_option("--server-column", ba.server_column);
  build->add_option("--timestamp-column", ba.timestamp_column);
  build->add_option("--threads", ba.threads)->check(CLI::PositiveNumber);
  build->add_option("--out", ba.out)->required();

  std::string stats_dir;
  bool stats_json = false;
  auto* stats = app.add_subcommand("stats", "dataset statistics");
  stats->add_option("--dataset", stats_dir)->required();
  stats->add_flag("--json", stats_json);

  MineArgs ma;
  auto* mine_cmd = app.add_subcommand("mine", "top-k subgroup search");
  mine_cmd->add_option("--dataset", ma.dataset);
  mine_cmd->add_option("--target", ma.target);
  mine_cmd->add_option("--target-mode", ma.target_mode, "numeric, boolean, thresholded, selection");
  mine_cmd->add_option("--threshold", ma.threshold);
  mine_cmd->add_option("--positive-ids", ma.positive_ids)->delimiter(',');
  mine_cmd->add_option("--filter", ma.filters, "predicate such as 'serverName = LYN'");
  mine_cmd->add_option("--objects", ma.objects, "restrict to these object ids")->delimiter(',');
  mine_cmd->add_option("--measure", ma.measure);
  mine_cmd->add_option("--algo", ma.algorithm, "dfs or beam");
  mine_cmd->add_option("--width", ma.width);
  mine_cmd->add_option("--k", ma.k);
  mine_cmd->add_option("--depth", ma.depth);
  mine_cmd->add_option("--min-support", ma.min_support);
  mine_cmd->add_option("--bins", ma.bins);
  mine_cmd->add_option("--time-budget", ma.time_budget, "seconds");
  auto* mine_threads = mine_cmd->add_option("--threads", ma.threads);
  mine_cmd->add_option("--dedup", ma.dedup, "none, greedy or hac");
  mine_cmd->add_option("--theta", ma.theta);
  mine_cmd->add_option("--clusters", ma.clusters);
  mine_cmd->add_option("--distance", ma.distance);
  mine_cmd->add_flag("--strict", ma.strict);
  auto* mine_out = mine_cmd->add_option("--out", ma.out);
  mine_cmd->add_option("--manifest", ma.manifest);
  mine_cmd->add_option("--from-manifest", ma.from_manifest);
  mine_cmd->add_flag("--quiet", ma.quiet);

  DedupArgs da;
  auto* dedup = app.add_subcommand("dedup", "redundancy reduction of a results file");
  dedup->add_option("--in", da.in)->required();
  dedup->add_option("--out", da.out);
  dedup->add_option("--mode", da.mode, "greedy or hac");
  dedup->add_option("--theta", da.theta);
  dedup->add_option("--clusters", da.clusters);
  dedup->add_option("--distance", da.distance);
  dedup->add_flag("--strict", da.strict);

  SynthConfig sc;
  std::string synth_model = "planted";
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "synthetic workload with a planted token");
  synth->add_option("--n", sc.n);
  synth->add_option("--tables", sc.tables);
  synth->add_option("--cols", sc.cols);
  synth->add_option("--sparsity", sc.sparsity);
  synth->add_option("--seed", sc.seed)->required();
  synth->add_option("--target-model", synth_model, "planted or noise");
  synth->add_option("--delta", sc.delta);
  synth->add_option("--noise", sc.noise_sd);
  synth->add_option("--base-time", sc.base_time);
  synth->add_option("--planted-column", sc.planted_column);
  synth->add_option("--out", synth_out)->required();

  ServiceConfig svc;
  auto* serve = app.add_subcommand("serve", "HTTP mining service");
  serve->add_option("--host", svc.host);
  auto* port_opt = serve->add_option("--port", svc.port);
  auto* upload_opt = serve->add_option("--max-upload-mb", svc.max_upload_mb);
  auto* threads_opt = serve->add_option("--threads", svc.threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << WLD_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (parse->parsed()) return cmd_parse(pa, out);
    if (build->parsed()) return cmd_build(ba, out);
    if (stats->parsed()) return cmd_stats(stats_dir, stats_json, out);
    if (mine_cmd->parsed()) return cmd_mine(ma, mine_out->count() > 0, mine_threads->count() > 0, out);
    if (dedup->parsed()) return cmd_dedup(da, out);
    if (synth->parsed()) return cmd_synth(sc, synth_model, synth_out, out);
    if (serve->parsed()) {
      return cmd_serve(svc, port_opt->count() > 0, upload_opt->count() > 0, threads_opt->count() > 0, out);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    // configuration, unknown names, empty subsets, bad patterns
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace wld
