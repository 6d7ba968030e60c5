#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "linkclimate/net/transport.hpp"

namespace linkclimate::noaa {

using Json = nlohmann::json;

inline constexpr std::string_view kDefaultBaseUrl = "https://www.ncdc.noaa.gov/cdo-web/api/v2";

// A record violating its type's invariants. Mapping loops log and skip these.
class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Body that is not valid JSON, or a CDO envelope that contradicts itself.
class MalformedResponse : public std::runtime_error {
 public:
  MalformedResponse(const std::string& what, std::size_t byteOffset)
      : std::runtime_error(what), byteOffset_(byteOffset) {}
  std::size_t byteOffset() const noexcept { return byteOffset_; }

 private:
  std::size_t byteOffset_;
};

struct StationRec {
  std::string id;
  std::string name;
  double latitude = 0;
  double longitude = 0;
  std::optional<double> elevation;
  std::optional<std::string> elevationUnit;
  std::optional<std::string> mindate, maxdate;
  std::optional<double> datacoverage;

  static StationRec fromJson(const Json& j);
};

struct ObservationRec {
  std::string date;  // as delivered; normalized during mapping
  std::string datatype;
  std::string station;
  double value = 0;
  std::optional<std::string> attributes;

  static ObservationRec fromJson(const Json& j);
};

struct MetadataRec {
  std::string id;
  std::string name;
  std::optional<std::string> mindate, maxdate;
  std::optional<double> datacoverage;

  static MetadataRec fromJson(const Json& j);
};

struct ResultSet {
  long offset = 1;
  long count = 0;
  long limit = 0;
};

struct Envelope {
  std::vector<Json> results;
  ResultSet resultset;

  // Accepts `{}` (CDO's empty answer) as zero results.
  static Envelope parse(std::string_view body);
};

struct FetchPlan {
  std::string endpoint;  // one of the Table-1 endpoints, e.g. "/stations"
  net::Params params;    // scope constraints; limit/offset are managed by fetchAll
  std::string token;     // sent as the `token` header, never logged
  int limit = 1000;
};

bool isCdoEndpoint(std::string_view endpoint);

// Pages through an endpoint by advancing `offset` by `limit` until the
// resultset count is exhausted. Throws net::HttpError / MalformedResponse.
std::vector<Json> fetchAll(const FetchPlan& plan, net::Fetcher& fetcher);

// Offline CDO: serves `<dir>/<endpoint>.json` corpora, applying the
// request's filters, date window and paging the way the live API does.
// Corpus layout: {"results": [...], "filters": {param: {value: [ids]}}}.
// Records match a filter when their "id" (or "station" for /data) is
// listed under the requested value. A file named
// `<dir>/exact/<endpoint>/<canonical query>.json` overrides the emulation
// for that exact request.
class FixtureTransport : public net::Transport {
 public:
  explicit FixtureTransport(std::filesystem::path dir);
  net::Response get(const net::Request& request) override;

  std::vector<net::Request> requestLog() const;

 private:
  struct Corpus {
    std::vector<Json> results;
    Json filters;
  };
  const Corpus* corpus(const std::string& endpoint);

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::map<std::string, Corpus> corpora_;
  std::vector<net::Request> log_;
};

}  // namespace linkclimate::noaa
