#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "wld/dataset.hpp"
#include "wld/search.hpp"

namespace wld {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_upload_mb = 64;
  std::size_t threads = 1;
  double session_ttl_seconds = 3600.0;
};

/// Overrides from WLD_PORT, WLD_MAX_UPLOAD_MB and WLD_THREADS. Throws
/// ConfigError on malformed values.
ServiceConfig config_from_env(ServiceConfig base = {});

struct Request {
  std::string method;
  std::string path;  // without query string
  std::map<std::string, std::string> query;
  std::string body;                          // JSON text, may be empty
  std::map<std::string, std::string> files;  // multipart uploads by field name
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

/// HTTP-independent core of the mining service. Every public member is safe
/// to call concurrently.
class MiningService {
 public:
  explicit MiningService(ServiceConfig config = {});
  ~MiningService();
  MiningService(const MiningService&) = delete;
  MiningService& operator=(const MiningService&) = delete;

  Response handle(const Request& request);
  const ServiceConfig& config() const { return config_; }

  /// Blocks until the job leaves queued/running; for tests and shutdown.
  void wait(const std::string& job_id);

 private:
  struct Session;
  struct Job;

  Response post_dataset(const Request& r);
  Response get_dataset_objects(const std::string& id, const Request& r);
  Response post_session(const Request& r);
  Response get_session(const std::string& id);
  Response post_subset(const std::string& id, const Request& r);
  Response post_target(const std::string& id, const Request& r);
  Response post_job(const std::string& id, const Request& r);
  Response post_evaluate(const std::string& id, const Request& r);
  Response get_job(const std::string& id);
  Response get_job_result(const std::string& id);
  Response delete_job(const std::string& id);

  std::shared_ptr<Session> session(const std::string& id);
  std::shared_ptr<Job> job(const std::string& id);
  std::string open_session(const std::string& dataset_id);
  void evict_idle_sessions();

  ServiceConfig config_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets_;  // by content digest
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::size_t next_session_ = 1;
  std::size_t next_job_ = 1;
};

/// Serves on config().host/port until the process ends. `on_bound` gets the
/// bound port (port 0 picks one). Returns -1 when binding fails.
int serve_http(MiningService& service, const std::function<void(int)>& on_bound = {});

class HttpServer {
 public:
  explicit HttpServer(MiningService& service);
  ~HttpServer();
  /// Binds (port 0 picks a free one) and serves on a background thread.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wld
