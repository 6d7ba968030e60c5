#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "linkclimate/net/transport.hpp"

namespace linkclimate::net {

struct HttpTransport::Impl {
  std::unique_ptr<httplib::Client> client;
  std::string pathPrefix;
};

HttpTransport::HttpTransport(std::string baseUrl, std::chrono::seconds timeout)
    : impl_(std::make_unique<Impl>()) {
  auto scheme = baseUrl.find("://");
  if (scheme == std::string::npos) throw std::invalid_argument("base URL needs a scheme: " + baseUrl);
  auto slash = baseUrl.find('/', scheme + 3);
  std::string origin = slash == std::string::npos ? baseUrl : baseUrl.substr(0, slash);
  impl_->pathPrefix = slash == std::string::npos ? "" : baseUrl.substr(slash);
  while (!impl_->pathPrefix.empty() && impl_->pathPrefix.back() == '/') impl_->pathPrefix.pop_back();
  impl_->client = std::make_unique<httplib::Client>(origin);
  impl_->client->set_connection_timeout(timeout);
  impl_->client->set_read_timeout(timeout);
  impl_->client->set_follow_location(true);
}

HttpTransport::~HttpTransport() = default;

Response HttpTransport::get(const Request& request) {
  std::string target = impl_->pathPrefix + request.path;
  std::string query;
  for (const auto& [k, v] : request.params) {
    query += query.empty() ? '?' : '&';
    query += percentEncode(k) + "=" + percentEncode(v);
  }
  httplib::Headers headers;
  for (const auto& [k, v] : request.headers) headers.emplace(k, v);
  auto result = impl_->client->Get(target + query, headers);
  if (!result) return Response{0, httplib::to_string(result.error())};
  return Response{result->status, result->body};
}

}  // namespace linkclimate::net
