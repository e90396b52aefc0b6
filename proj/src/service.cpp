#include "wld/service.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>

#include "wld/dataset_io.hpp"
#include "wld/errors.hpp"
#include "wld/measures.hpp"
#include "wld/pattern.hpp"
#include "wld/results_json.hpp"
#include "wld/text.hpp"

namespace wld {

namespace {

using Clock = std::chrono::steady_clock;

Response error(int status, const std::string& code, const std::string& message, json detail = json::object()) {
  return {status, {{"code", code}, {"message", message}, {"detail", std::move(detail)}}};
}

struct HttpError : std::runtime_error {
  HttpError(int s, std::string c, const std::string& m, json d = json::object())
      : std::runtime_error(m), status(s), code(std::move(c)), detail(std::move(d)) {}
  int status;
  std::string code;
  json detail;
};

json parse_body(const Request& r) {
  if (trim(r.body).empty()) return json::object();
  try {
    json j = json::parse(r.body);
    if (!j.is_object()) throw HttpError(400, "MalformedRequest", "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw HttpError(400, "MalformedRequest", std::string("invalid JSON: ") + e.what());
  }
}

std::size_t env_size(const char* name, std::size_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  auto d = parse_number(v);
  if (!d || *d < 0 || std::floor(*d) != *d) throw ConfigError(std::string(name) + " must be a non-negative integer");
  return static_cast<std::size_t>(*d);
}

json histogram(const Dataset& data, std::size_t j) {
  const Attribute& a = data.attribute(j);
  json h;
  std::size_t unknown = 0;
  if (a.kind == AttributeKind::Nominal || a.kind == AttributeKind::Ordinal) {
    std::vector<std::size_t> counts(a.categories.size(), 0);
    for (auto c : data.codes(j)) {
      if (c < 0) {
        ++unknown;
      } else {
        ++counts[static_cast<std::size_t>(c)];
      }
    }
    h = {{"type", "categorical"}, {"categories", a.categories}, {"counts", counts}};
  } else {
    std::vector<double> v;
    for (double x : data.numbers(j)) {
      if (std::isnan(x)) {
        ++unknown;
      } else {
        v.push_back(x);
      }
    }
    const std::size_t bins = 10;
    std::vector<std::size_t> counts;
    json edges = json::array();
    if (!v.empty()) {
      auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      const double min = *lo, max = *hi;
      const std::size_t b = min == max ? 1 : bins;
      counts.assign(b, 0);
      for (std::size_t i = 0; i <= b; ++i) edges.push_back(min + (max - min) * static_cast<double>(i) / static_cast<double>(b));
      for (double x : v) {
        std::size_t k = b == 1 ? 0 : static_cast<std::size_t>((x - min) / (max - min) * static_cast<double>(b));
        ++counts[std::min(k, b - 1)];
      }
    }
    h = {{"type", "numeric"}, {"edges", edges}, {"counts", counts}};
  }
  h["unknown"] = unknown;
  return h;
}

json summary_json(const Dataset& data) {
  DatasetSummary s = summarize(data);
  json attrs = json::array();
  for (std::size_t j = 0; j < data.attribute_count(); ++j) {
    const Attribute& a = data.attribute(j);
    attrs.push_back({{"name", a.name},
                     {"kind", std::string(to_string(a.kind))},
                     {"source", std::string(to_string(a.source))},
                     {"categories", a.categories},
                     {"histogram", histogram(data, j)}});
  }
  return {{"n", s.n},
          {"m", s.m},
          {"clause_counts", s.clause_counts},
          {"token_columns", s.token_columns},
          {"nonzeros", s.nonzeros},
          {"sparsity", s.sparsity},
          {"kinds", s.kinds},
          {"provenances", s.provenances},
          {"attributes", attrs}};
}

json target_json(const Target& t) {
  const GlobalStats g = global_stats(t.values, t.binary);
  json j = {{"description", t.description},
            {"binary", t.binary},
            {"n", g.n},
            {"mean", number_json(g.mean)},
            {"median", number_json(g.median)}};
  if (t.binary) {
    j["positives"] = g.positives;
    j["precision"] = static_cast<double>(g.positives) / static_cast<double>(g.n);
  }
  j["warnings"] = t.warnings;
  return j;
}

std::vector<Predicate> predicates_from(const json& list) {
  std::vector<Predicate> out;
  if (!list.is_array()) throw HttpError(400, "MalformedRequest", "predicates must be an array");
  for (const auto& p : list) {
    if (p.is_string()) {
      out.push_back(parse_predicate(p.get<std::string>()));
    } else if (p.is_object()) {
      std::string text = p.at("attribute").get<std::string>() + " " + p.at("op").get<std::string>() + " " +
                         (p.at("value").is_string() ? p.at("value").get<std::string>() : p.at("value").dump());
      out.push_back(parse_predicate(text));
    } else {
      throw HttpError(400, "MalformedRequest", "predicate must be a string or an object");
    }
  }
  return out;
}

TargetSpec target_spec_from(const json& b) {
  TargetSpec spec;
  auto mode = parse_target_mode(b.value("mode", std::string("numeric")));
  if (!mode) throw HttpError(422, "InvalidTarget", "unknown target mode");
  spec.mode = *mode;
  spec.attribute = b.value("attribute", std::string());
  if (b.contains("threshold")) spec.threshold = number_from_json(b["threshold"]);
  if (b.contains("positive_ids")) spec.positive_ids = b["positive_ids"].get<std::vector<std::string>>();
  return spec;
}

SearchConfig search_config_from(const json& b, std::size_t default_threads) {
  SearchConfig c;
  c.k = b.value("k", c.k);
  c.depth = b.value("depth", c.depth);
  c.min_support = b.value("min_support", c.min_support);
  c.beam_width = b.value("beam_width", c.beam_width);
  c.selectors.bins = b.value("bins", c.selectors.bins);
  c.measure = parse_measure(b.value("measure", std::string("klosgen:0.5")));
  c.algorithm = parse_algorithm(b.value("algorithm", std::string("dfs")));
  if (b.contains("time_budget_seconds")) c.time_budget_seconds = b["time_budget_seconds"].get<double>();
  c.threads = b.value("threads", default_threads);
  validate(c);
  return c;
}

DedupConfig dedup_from(const json& b) {
  DedupConfig d;
  if (!b.contains("dedup") || b["dedup"].is_null()) return d;
  const json& x = b["dedup"];
  d.mode = parse_dedup_mode(x.value("mode", std::string("none")));
  d.theta = x.value("theta", d.theta);
  if (x.contains("clusters")) d.clusters = x["clusters"].get<std::size_t>();
  if (x.contains("distance")) d.distance = x["distance"].get<double>();
  d.strict = x.value("strict", false);
  if (d.mode == DedupMode::Hac && d.clusters.has_value() == d.distance.has_value()) {
    throw ConfigError("hac needs exactly one of clusters or distance");
  }
  if (!(d.theta >= 0.0 && d.theta <= 1.0)) throw ConfigError("theta must be in [0,1]");
  return d;
}

std::vector<std::string> segments(const std::string& path) {
  std::vector<std::string> out;
  for (auto& s : split(path, '/')) {
    if (!s.empty()) out.push_back(s);
  }
  return out;
}

}  // namespace

ServiceConfig config_from_env(ServiceConfig base) {
  std::size_t port = env_size("WLD_PORT", static_cast<std::size_t>(base.port));
  if (port > 65535) throw ConfigError("WLD_PORT out of range");
  base.port = static_cast<int>(port);
  base.max_upload_mb = env_size("WLD_MAX_UPLOAD_MB", base.max_upload_mb);
  base.threads = std::max<std::size_t>(1, env_size("WLD_THREADS", base.threads));
  return base;
}

// ------------------------------------------------------------------ state

struct MiningService::Session {
  std::mutex m;
  std::string id;
  std::string dataset_id;
  std::shared_ptr<const Dataset> full;
  std::shared_ptr<const Dataset> view;
  json subset = json::object();
  std::optional<TargetSpec> target_spec;
  std::shared_ptr<const Target> target;
  std::vector<std::string> jobs;
  Clock::time_point last_access = Clock::now();
};

struct MiningService::Job {
  std::string id;
  std::string session_id;
  std::mutex m;
  std::condition_variable cv;
  std::string status = "queued";
  std::string error;
  json result;
  SearchControl control;
  std::thread worker;

  bool active() {
    std::lock_guard lock(m);
    return status == "queued" || status == "running";
  }
};

MiningService::MiningService(ServiceConfig config) : config_(std::move(config)) {}

MiningService::~MiningService() {
  std::vector<std::shared_ptr<Job>> all;
  {
    std::lock_guard lock(mutex_);
    for (auto& [id, j] : jobs_) all.push_back(j);
  }
  for (auto& j : all) j->control.cancel = true;
  for (auto& j : all) {
    if (j->worker.joinable()) j->worker.join();
  }
}

void MiningService::wait(const std::string& job_id) {
  auto j = job(job_id);
  if (!j) return;
  std::unique_lock lock(j->m);
  j->cv.wait(lock, [&] { return j->status != "queued" && j->status != "running"; });
}

std::shared_ptr<MiningService::Session> MiningService::session(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw HttpError(404, "NotFound", "unknown session " + id);
  it->second->last_access = Clock::now();
  return it->second;
}

std::shared_ptr<MiningService::Job> MiningService::job(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(id);
  return it == jobs_.end() ? nullptr : it->second;
}

std::string MiningService::open_session(const std::string& dataset_id) {
  auto s = std::make_shared<Session>();
  std::lock_guard lock(mutex_);
  s->id = "s" + std::to_string(next_session_++);
  s->dataset_id = dataset_id;
  s->full = datasets_.at(dataset_id);
  s->view = s->full;
  sessions_[s->id] = s;
  return s->id;
}

void MiningService::evict_idle_sessions() {
  std::lock_guard lock(mutex_);
  const auto now = Clock::now();
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    const double idle = std::chrono::duration<double>(now - it->second->last_access).count();
    bool busy = std::any_of(jobs_.begin(), jobs_.end(), [&](const auto& kv) {
      return kv.second->session_id == it->first && kv.second->active();
    });
    if (idle > config_.session_ttl_seconds && !busy) {
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

// --------------------------------------------------------------- dispatch

Response MiningService::handle(const Request& r) {
  try {
    evict_idle_sessions();
    const auto seg = segments(r.path);
    const std::string& m = r.method;
    auto wrong_method = [&] { return error(405, "MethodNotAllowed", m + " not allowed on " + r.path); };

    if (seg.size() == 1 && seg[0] == "healthz") {
      if (m != "GET") return wrong_method();
      return {200, {{"status", "ok"}, {"version", WLD_VERSION}}};
    }
    if (!seg.empty() && seg[0] == "datasets") {
      if (seg.size() == 1) return m == "POST" ? post_dataset(r) : wrong_method();
      if (seg.size() == 2) {
        if (m != "GET") return wrong_method();
        std::lock_guard lock(mutex_);
        auto it = datasets_.find(seg[1]);
        if (it == datasets_.end()) return error(404, "NotFound", "unknown dataset " + seg[1]);
        json body = summary_json(*it->second);
        body["dataset_id"] = seg[1];
        return {200, body};
      }
      if (seg.size() == 3 && seg[2] == "objects") return m == "GET" ? get_dataset_objects(seg[1], r) : wrong_method();
    }
    if (!seg.empty() && seg[0] == "sessions") {
      if (seg.size() == 1) return m == "POST" ? post_session(r) : wrong_method();
      if (seg.size() == 2) return m == "GET" ? get_session(seg[1]) : wrong_method();
      if (seg.size() == 3) {
        if (m != "POST") return wrong_method();
        if (seg[2] == "subset") return post_subset(seg[1], r);
        if (seg[2] == "target") return post_target(seg[1], r);
        if (seg[2] == "jobs") return post_job(seg[1], r);
        if (seg[2] == "evaluate") return post_evaluate(seg[1], r);
      }
    }
    if (!seg.empty() && seg[0] == "jobs") {
      if (seg.size() == 2) {
        if (m == "GET") return get_job(seg[1]);
        if (m == "DELETE") return delete_job(seg[1]);
        return wrong_method();
      }
      if (seg.size() == 3 && seg[2] == "result") return m == "GET" ? get_job_result(seg[1]) : wrong_method();
    }
    return error(404, "NotFound", "no route for " + r.path);
  } catch (const HttpError& e) {
    return error(e.status, e.code, e.what(), e.detail);
  } catch (const DatasetError& e) {
    return error(422, std::string(to_string(e.kind())), e.what(), {{"subject", e.subject()}});
  } catch (const PatternError& e) {
    return error(422, std::string(to_string(e.kind())), e.what());
  } catch (const MeasureError& e) {
    std::string what = e.what();
    return error(422, what.rfind("EmptyExtent", 0) == 0 ? "EmptyExtent" : "MeasureError", what);
  } catch (const ConfigError& e) {
    return error(422, "InvalidConfig", e.what());
  } catch (const FormatError& e) {
    return error(400, "MalformedDataset", e.what());
  } catch (const IoError& e) {
    return error(400, "IoError", e.what());
  } catch (const json::exception& e) {
    return error(400, "MalformedRequest", e.what());
  } catch (const std::exception& e) {
    return error(500, "InternalError", e.what());
  }
}

// --------------------------------------------------------------- handlers

Response MiningService::post_dataset(const Request& r) {
  const std::size_t limit = config_.max_upload_mb * 1024 * 1024;
  std::size_t total = r.body.size();
  for (const auto& [k, v] : r.files) total += v.size();
  if (total > limit) {
    return error(413, "PayloadTooLarge", "upload exceeds " + std::to_string(config_.max_upload_mb) + " MB");
  }

  std::string columns, objects, coo;
  auto pick = [&](const std::map<std::string, std::string>& files, const std::string& a, const std::string& b,
                  std::string& out, bool required) {
    if (auto it = files.find(a); it != files.end()) {
      out = it->second;
    } else if (auto it2 = files.find(b); it2 != files.end()) {
      out = it2->second;
    } else if (required) {
      throw HttpError(400, "MalformedRequest", "missing upload part " + a);
    }
  };
  if (!r.files.empty()) {
    pick(r.files, "columns", "columns.csv", columns, true);
    pick(r.files, "objects", "objects.csv", objects, true);
    pick(r.files, "features", "features.coo", coo, false);
  } else {
    json b = parse_body(r);
    if (b.contains("path")) {
      const std::string dir = b["path"].get<std::string>();
      if (!std::filesystem::is_directory(dir)) throw HttpError(400, "MalformedRequest", "not a directory: " + dir);
      columns = read_text_file(dir + "/columns.csv");
      objects = read_text_file(dir + "/objects.csv");
      if (std::filesystem::exists(dir + "/features.coo")) coo = read_text_file(dir + "/features.coo");
    } else if (b.contains("files")) {
      std::map<std::string, std::string> files = b["files"].get<std::map<std::string, std::string>>();
      pick(files, "columns", "columns.csv", columns, true);
      pick(files, "objects", "objects.csv", objects, true);
      pick(files, "features", "features.coo", coo, false);
    } else {
      throw HttpError(400, "MalformedRequest", "send multipart files, {\"path\": dir} or {\"files\": {...}}");
    }
  }

  const std::string id = dataset_digest(columns, objects, coo);
  std::shared_ptr<const Dataset> data;
  {
    std::lock_guard lock(mutex_);
    if (auto it = datasets_.find(id); it != datasets_.end()) data = it->second;
  }
  if (!data) {
    auto parsed = std::make_shared<const Dataset>(parse_dataset(columns, objects, coo));
    std::lock_guard lock(mutex_);
    data = datasets_.emplace(id, parsed).first->second;
  }
  json body = summary_json(*data);
  body["dataset_id"] = id;
  body["session_id"] = open_session(id);
  return {201, body};
}

Response MiningService::get_dataset_objects(const std::string& id, const Request& r) {
  std::shared_ptr<const Dataset> data;
  {
    std::lock_guard lock(mutex_);
    auto it = datasets_.find(id);
    if (it == datasets_.end()) return error(404, "NotFound", "unknown dataset " + id);
    data = it->second;
  }
  std::vector<std::size_t> cols;
  if (auto it = r.query.find("columns"); it != r.query.end()) {
    for (const auto& name : split(it->second, ',')) cols.push_back(data->attribute_index(std::string(trim(name))));
  }
  std::size_t limit = data->size();
  if (auto it = r.query.find("limit"); it != r.query.end()) {
    auto v = parse_number(it->second);
    if (!v || *v < 0) throw HttpError(400, "MalformedRequest", "limit must be a non-negative number");
    limit = std::min(limit, static_cast<std::size_t>(*v));
  }
  json rows = json::array();
  for (std::size_t i = 0; i < limit; ++i) {
    json row = {{"id", data->object_id(i)}};
    for (auto j : cols) {
      Value v = data->value(j, i);
      row[data->attribute(j).name] =
          std::holds_alternative<double>(v) ? number_json(std::get<double>(v)) : json(std::get<std::string>(v));
    }
    rows.push_back(std::move(row));
  }
  return {200, {{"dataset_id", id}, {"total", data->size()}, {"objects", rows}}};
}

Response MiningService::post_session(const Request& r) {
  json b = parse_body(r);
  const std::string id = b.at("dataset_id").get<std::string>();
  {
    std::lock_guard lock(mutex_);
    if (!datasets_.count(id)) return error(404, "NotFound", "unknown dataset " + id);
  }
  return {201, {{"session_id", open_session(id)}, {"dataset_id", id}}};
}

Response MiningService::get_session(const std::string& id) {
  auto s = session(id);
  std::lock_guard lock(s->m);
  json body = {{"session_id", s->id}, {"dataset_id", s->dataset_id}, {"size", s->view->size()},
               {"subset", s->subset}, {"jobs", s->jobs}};
  body["target"] = s->target ? target_json(*s->target) : json(nullptr);
  return {200, body};
}

Response MiningService::post_subset(const std::string& id, const Request& r) {
  auto s = session(id);
  json b = parse_body(r);
  std::vector<Predicate> preds;
  if (b.contains("predicates")) preds = predicates_from(b["predicates"]);
  std::optional<std::vector<std::string>> ids;
  if (b.contains("object_ids") && !b["object_ids"].is_null()) ids = b["object_ids"].get<std::vector<std::string>>();

  std::lock_guard lock(s->m);
  for (const auto& jid : s->jobs) {
    auto j = job(jid);
    if (j && j->active()) return error(409, "JobRunning", "cancel job " + jid + " before changing the subset");
  }
  auto view = std::make_shared<const Dataset>(s->full->filter(preds, ids));
  s->view = view;
  s->subset = b;
  // a target was defined over the previous objects
  const bool cleared = s->target != nullptr;
  s->target.reset();
  s->target_spec.reset();
  return {200, {{"session_id", s->id}, {"size", view->size()}, {"target_cleared", cleared}, {"summary", summary_json(*view)}}};
}

Response MiningService::post_target(const std::string& id, const Request& r) {
  auto s = session(id);
  json b = parse_body(r);
  TargetSpec spec = target_spec_from(b);
  std::lock_guard lock(s->m);
  for (const auto& jid : s->jobs) {
    auto j = job(jid);
    if (j && j->active()) return error(409, "JobRunning", "cancel job " + jid + " before changing the target");
  }
  auto t = std::make_shared<const Target>(derive_target(*s->view, spec));
  if (t->degenerate) {
    return error(422, "DegenerateTarget", "target is constant over the current objects", {{"description", t->description}});
  }
  s->target_spec = spec;
  s->target = t;
  json body = target_json(*t);
  body["session_id"] = s->id;
  return {200, body};
}

Response MiningService::post_job(const std::string& id, const Request& r) {
  auto s = session(id);
  json b = parse_body(r);
  SearchConfig config = search_config_from(b, config_.threads);
  DedupConfig dedup = dedup_from(b);

  std::shared_ptr<const Dataset> view;
  std::shared_ptr<const Target> target;
  {
    std::lock_guard lock(s->m);
    if (!s->target) return error(409, "NoTarget", "set a target before mining");
    view = s->view;
    target = s->target;
  }
  if (config.measure.family == MeasureFamily::Lift) {
    const GlobalStats g = global_stats(target->values, target->binary);
    if (!(g.mean > 0.0)) return error(422, "InvalidConfig", "lift needs a target with positive mean");
  }

  auto j = std::make_shared<Job>();
  {
    std::lock_guard lock(mutex_);
    if (b.contains("job_id")) {
      j->id = b["job_id"].get<std::string>();
      if (j->id.empty()) return error(400, "MalformedRequest", "job_id must not be empty");
      if (jobs_.count(j->id)) return error(409, "JobExists", "job id already used: " + j->id);
    } else {
      do {
        j->id = "j" + std::to_string(next_job_++);
      } while (jobs_.count(j->id));
    }
    j->session_id = s->id;
    jobs_[j->id] = j;
  }
  {
    std::lock_guard lock(s->m);
    s->jobs.push_back(j->id);
  }
  const std::string description = target->description;
  j->worker = std::thread([j, view, target, config, dedup, description] {
    {
      std::lock_guard lock(j->m);
      if (j->control.cancel) {
        j->status = "cancelled";
        j->cv.notify_all();
        return;
      }
      j->status = "running";
    }
    std::string status;
    json result;
    std::string err;
    try {
      ResultSet rs = mine(*view, *target, config, &j->control);
      result = apply_dedup(results_to_json(rs, *view, RunInfo{description, config}), rs.entries, dedup);
      status = rs.cancelled ? "cancelled" : "done";
    } catch (const std::exception& e) {
      status = "failed";
      err = e.what();
    }
    std::lock_guard lock(j->m);
    j->result = std::move(result);
    j->error = std::move(err);
    j->status = status;
    j->cv.notify_all();
  });
  return {202, {{"job_id", j->id}, {"status", "queued"}, {"session_id", s->id}}};
}

Response MiningService::get_job(const std::string& id) {
  auto j = job(id);
  if (!j) return error(404, "NotFound", "unknown job " + id);
  std::lock_guard lock(j->m);
  double progress = j->status == "done" ? 1.0 : j->control.progress.load();
  json body = {{"job_id", j->id}, {"session_id", j->session_id}, {"status", j->status}, {"progress", progress}};
  if (!j->error.empty()) body["error"] = j->error;
  return {200, body};
}

Response MiningService::get_job_result(const std::string& id) {
  auto j = job(id);
  if (!j) return error(404, "NotFound", "unknown job " + id);
  std::lock_guard lock(j->m);
  if (j->status != "done") {
    return error(409, "JobNotDone", "job " + id + " is " + j->status, {{"status", j->status}, {"error", j->error}});
  }
  return {200, j->result};
}

Response MiningService::delete_job(const std::string& id) {
  auto j = job(id);
  if (!j) return error(404, "NotFound", "unknown job " + id);
  j->control.cancel = true;
  {
    std::unique_lock lock(j->m);
    // the worker notices the flag within a few hundred nodes
    j->cv.wait(lock, [&] { return j->status != "queued" && j->status != "running"; });
  }
  std::lock_guard lock(j->m);
  return {200, {{"job_id", j->id}, {"status", j->status}}};
}

Response MiningService::post_evaluate(const std::string& id, const Request& r) {
  auto s = session(id);
  json b = parse_body(r);
  if (!b.contains("pattern") || !b["pattern"].is_string()) {
    return error(400, "MalformedRequest", "body needs a pattern string");
  }
  MeasureSpec m = parse_measure(b.value("measure", std::string("klosgen:0.5")));
  std::shared_ptr<const Dataset> view;
  std::shared_ptr<const Target> target;
  {
    std::lock_guard lock(s->m);
    if (!s->target) return error(409, "NoTarget", "set a target before evaluating");
    view = s->view;
    target = s->target;
  }
  Pattern p = parse_pattern(b["pattern"].get<std::string>(), *view);
  Subgroup sg = evaluate_pattern(*view, *target, m, p);
  json body = subgroup_to_json(sg, *view, m, 0);
  body.erase("rank");
  body["target"] = target_json(*target);
  return {200, body};
}

}  // namespace wld
