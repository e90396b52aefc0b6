#include "httplib.h"
#include "wld/service.hpp"

namespace wld {

namespace {

void route(httplib::Server& server, MiningService& service) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query[k] = v;
    if (req.is_multipart_form_data()) {
      for (const auto& [name, part] : req.files) r.files[name] = part.content;
    } else {
      r.body = req.body;
    }
    Response out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  const char* any = R"(/.*)";
  server.Get(any, handler);
  server.Post(any, handler);
  server.Delete(any, handler);
  server.set_payload_max_length(service.config().max_upload_mb * 1024 * 1024 + 1024 * 1024);
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(MiningService& s) : service(s) { route(server, service); }
  MiningService& service;
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(MiningService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) return -1;
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  return bound;
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int serve_http(MiningService& service, const std::function<void(int)>& on_bound) {
  httplib::Server server;
  route(server, service);
  const auto& c = service.config();
  int port = c.port == 0 ? server.bind_to_any_port(c.host) : (server.bind_to_port(c.host, c.port) ? c.port : -1);
  if (port < 0) return -1;
  if (on_bound) on_bound(port);
  server.listen_after_bind();
  return port;
}

}  // namespace wld
