#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace linkclimate::net {

using Params = std::vector<std::pair<std::string, std::string>>;
using Headers = std::vector<std::pair<std::string, std::string>>;

struct Request {
  std::string path;  // relative to the transport's base, e.g. "/stations"
  Params params;
  Headers headers;
};

struct Response {
  int status = 0;  // 0 = connection-level failure
  std::string body;
};

// Where HTTP GETs go: a live server or a fixture directory.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual Response get(const Request& request) = 0;
};

// Live HTTP(S) client over cpp-httplib.
class HttpTransport : public Transport {
 public:
  // `baseUrl` like "https://www.ncdc.noaa.gov/cdo-web/api/v2".
  explicit HttpTransport(std::string baseUrl,
                         std::chrono::seconds timeout = std::chrono::seconds(60));
  ~HttpTransport() override;
  Response get(const Request& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string percentEncode(std::string_view text);
std::string percentDecode(std::string_view text);
// Sorted by key then value, percent-encoded, "&"-joined.
std::string canonicalQuery(const Params& params);
std::optional<std::string> param(const Params& params, std::string_view key);

class HttpError : public std::runtime_error {
 public:
  HttpError(int status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

struct RetryPolicy {
  int maxRetries = 5;
  std::chrono::milliseconds initialBackoff{1000};
  double backoffMultiplier = 2.0;
  // Minimum spacing between consecutive requests.
  std::chrono::milliseconds minInterval{0};
  // Total requests allowed through this fetcher; 0 = unlimited.
  std::size_t requestBudget = 0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
void sleepFor(std::chrono::milliseconds d);

// Rate limiting, request budget and retry with exponential backoff on 429,
// 5xx and connection failures. Other 4xx fail immediately.
class Fetcher {
 public:
  Fetcher(Transport& transport, RetryPolicy policy, Sleeper sleeper = sleepFor);

  // Returns a 2xx response or throws HttpError.
  Response get(const Request& request);
  std::size_t requestsIssued() const noexcept { return issued_; }

 private:
  Transport& transport_;
  RetryPolicy policy_;
  Sleeper sleep_;
  std::size_t issued_ = 0;
  std::optional<std::chrono::steady_clock::time_point> last_;
};

std::string describe(const Request& request);  // path?query, without headers

}  // namespace linkclimate::net
