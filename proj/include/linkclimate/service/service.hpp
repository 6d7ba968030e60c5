#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkclimate/ontology/ontology.hpp"
#include "linkclimate/rdf/dataset.hpp"

namespace linkclimate::service {

// Transport-neutral request. Path and parameters are already percent-decoded.
struct HttpRequest {
  std::string method = "GET";
  std::string path;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;

  std::optional<std::string> param(std::string_view name) const;
  bool hasParam(std::string_view name) const;
  // Case-insensitive.
  std::optional<std::string> header(std::string_view name) const;
};

struct HttpResponse {
  int status = 200;
  std::string contentType = "text/plain; charset=utf-8";
  std::string body;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t incomingCap = 100;  // incoming triples per dereference document
  std::string staticDir;           // console assets; empty = none
};

// Picks the best of `offered` media types for an Accept header (q-values
// and wildcards honoured, ties go to the earlier offer). A missing or empty
// header selects offered[0]. nullopt means nothing acceptable.
std::optional<std::size_t> negotiate(std::string_view accept,
                                     const std::vector<std::string_view>& offered);

// Decodes application/x-www-form-urlencoded text.
std::vector<std::pair<std::string, std::string>> parseForm(std::string_view body);

// The /sparql, /data, /resource and /healthz endpoints over one store.
class Service {
 public:
  using MutationHook = std::function<void()>;

  Service(rdf::Store& store, const ontology::Ontology& onto, ServiceConfig config = {},
          MutationHook onMutation = {});

  HttpResponse handle(const HttpRequest& req);

  HttpResponse sparql(const HttpRequest& req);
  HttpResponse graphStore(const HttpRequest& req);
  HttpResponse dereference(const HttpRequest& req);
  HttpResponse health(const HttpRequest& req);

  const ServiceConfig& config() const noexcept { return config_; }

 private:
  rdf::Store& store_;
  const ontology::Ontology& onto_;
  ServiceConfig config_;
  MutationHook onMutation_;
};

// Focus description served on dereference: outgoing triples, outgoing
// triples of skolemized result nodes one hop away, and up to `incomingCap`
// incoming triples. Each list is canonically sorted.
struct Description {
  rdf::Iri focus;
  std::vector<rdf::Triple> outgoing;
  std::vector<rdf::Triple> expanded;
  std::vector<rdf::Triple> incoming;
  bool incomingTruncated = false;

  std::vector<rdf::Triple> all() const;
};

Description describe(const rdf::Dataset& data, const ontology::Ontology& onto,
                     const rdf::Iri& focus, std::size_t incomingCap);

std::string describeJson(const Description& d);
std::string describeHtml(const Description& d, const ontology::Ontology& onto);

// Blocking HTTP server bound to a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws on failure.
  int bind(const std::string& host, int port);
  // Serves until stop() is called.
  void run();
  void stop();
  void waitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace linkclimate::service
