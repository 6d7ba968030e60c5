#include "linkclimate/net/transport.hpp"

#include <algorithm>
#include <cstdio>
#include <thread>

namespace linkclimate::net {

std::string percentEncode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    bool keep = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                c == '-' || c == '.' || c == '_' || c == '~';
    if (keep) {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

std::string percentDecode(std::string_view text) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size()) {
      int hi = hex(text[i + 1]), lo = hex(text[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += text[i];
  }
  return out;
}

std::string canonicalQuery(const Params& params) {
  Params sorted = params;
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (const auto& [k, v] : sorted) {
    if (!out.empty()) out += '&';
    out += percentEncode(k);
    out += '=';
    out += percentEncode(v);
  }
  return out;
}

std::optional<std::string> param(const Params& params, std::string_view key) {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  return std::nullopt;
}

std::string describe(const Request& request) {
  std::string q = canonicalQuery(request.params);
  return q.empty() ? request.path : request.path + "?" + q;
}

void sleepFor(std::chrono::milliseconds d) {
  if (d.count() > 0) std::this_thread::sleep_for(d);
}

Fetcher::Fetcher(Transport& transport, RetryPolicy policy, Sleeper sleeper)
    : transport_(transport), policy_(policy), sleep_(std::move(sleeper)) {}

Response Fetcher::get(const Request& request) {
  auto backoff = policy_.initialBackoff;
  for (int attempt = 0;; ++attempt) {
    if (policy_.requestBudget != 0 && issued_ >= policy_.requestBudget)
      throw HttpError(0, "request budget of " + std::to_string(policy_.requestBudget) +
                             " exhausted before " + describe(request));
    if (last_ && policy_.minInterval.count() > 0) {
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - *last_);
      if (elapsed < policy_.minInterval) sleep_(policy_.minInterval - elapsed);
    }
    ++issued_;
    Response resp = transport_.get(request);
    last_ = std::chrono::steady_clock::now();
    if (resp.status >= 200 && resp.status < 300) return resp;
    bool retryable = resp.status == 0 || resp.status == 429 || resp.status >= 500;
    if (!retryable)
      throw HttpError(resp.status,
                      "HTTP " + std::to_string(resp.status) + " for " + describe(request));
    if (attempt >= policy_.maxRetries)
      throw HttpError(resp.status, "giving up after " + std::to_string(attempt + 1) +
                                       " attempts (last HTTP " + std::to_string(resp.status) +
                                       ") for " + describe(request));
    sleep_(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<long long>(static_cast<double>(backoff.count()) * policy_.backoffMultiplier));
  }
}

}  // namespace linkclimate::net
