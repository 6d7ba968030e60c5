#include <stdexcept>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "linkclimate/service/service.hpp"

namespace linkclimate::service {

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  explicit Impl(Service& s) : service(s) {}
};

namespace {

HttpRequest convert(const httplib::Request& in) {
  HttpRequest out;
  out.method = in.method;
  out.path = in.path;
  for (const auto& [k, v] : in.params) out.params.emplace_back(k, v);
  for (const auto& [k, v] : in.headers) out.headers.emplace_back(k, v);
  out.body = in.body;
  return out;
}

}  // namespace

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    HttpResponse r = impl_->service.handle(convert(req));
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body, r.contentType);
  };
  auto& s = impl_->server;
  if (!impl_->service.config().staticDir.empty())
    s.set_mount_point("/console", impl_->service.config().staticDir);
  s.Get(".*", handler);
  s.Post(".*", handler);
  s.Put(".*", handler);
  s.Delete(".*", handler);
  s.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                        : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::waitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace linkclimate::service
