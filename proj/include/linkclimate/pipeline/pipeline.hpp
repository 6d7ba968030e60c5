#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "linkclimate/geo/geolink.hpp"
#include "linkclimate/net/transport.hpp"
#include "linkclimate/noaa/cdo.hpp"
#include "linkclimate/ontology/ontology.hpp"
#include "linkclimate/rdf/dataset.hpp"
#include "linkclimate/util/dates.hpp"

namespace linkclimate::pipeline {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kTokenEnv = "NOAA_TOKEN";

struct SyncConfig {
  std::vector<std::string> datasets{"GHCND"};
  std::vector<std::string> locations{"FIPS:EI", "FIPS:UK"};
  int windowDays = 28;
  int scheduleIntervalDays = 7;
  std::string noaaBase{noaa::kDefaultBaseUrl};
  std::string token;  // environment only
  std::string geocoderBase{geo::kDefaultGeocoderBase};
  std::string baseIri{ontology::kDefaultBase};
  std::filesystem::path snapshotPath;
  std::filesystem::path fixtureDir;  // non-empty = fixture mode
  std::optional<std::string> units;  // NOAA `units`; unset = raw values
  int pageLimit = 1000;
  std::size_t requestBudget = 0;
  std::chrono::milliseconds requestInterval{200};
  int maxRetries = 5;

  bool fixtureMode() const { return !fixtureDir.empty(); }
  // <fixtureDir>/cdo and <fixtureDir>/nominatim
  std::filesystem::path cdoFixtures() const { return fixtureDir / "cdo"; }
  std::filesystem::path geocoderFixtures() const { return fixtureDir / "nominatim"; }

  // Throws ConfigError.
  void validate() const;
  net::RetryPolicy retryPolicy() const;
};

// Reads a JSON config document; unknown keys are rejected. The token is
// taken from the environment, never from the file.
SyncConfig loadConfig(const std::filesystem::path& path);
SyncConfig parseConfig(std::string_view json);

struct SyncReport {
  util::Date windowStart, windowEnd;
  std::size_t recordsFetched = 0;
  std::size_t triplesEmitted = 0;
  std::size_t triplesNew = 0;
  std::size_t recordsRejected = 0;
  std::size_t sourcesTotal = 0;
  std::size_t sourcesFailed = 0;
  double seconds = 0;

  bool allFailed() const { return sourcesTotal > 0 && sourcesFailed == sourcesTotal; }
};

// One sliding-window pass: ontology T-Box, metadata, stations and
// observations in [now - windowDays, now] for every (dataset, location).
// Duplicates are absorbed by set semantics. A failing source is logged and
// counted; the rest still run.
SyncReport runSync(const SyncConfig& cfg, rdf::Store& store, net::Transport& cdo,
                   const ontology::Ontology& onto, util::Date now,
                   net::Sleeper sleeper = net::sleepFor);

struct EnrichReport {
  std::size_t stations = 0;
  std::size_t enriched = 0;
  std::size_t unenriched = 0;  // geocoder had nothing for the coordinate
  std::size_t failed = 0;      // transport errors
  std::size_t triplesNew = 0;
};

// Reverse-geocodes every station carrying wgs84 coordinates and links the
// resulting administrative areas. Stations are visited in IRI order.
EnrichReport enrichAll(rdf::Store& store, geo::Geocoder& geocoder, const ontology::Ontology& onto);

// Canonical snapshot (default graph, then named graphs by name) written to a
// temporary file and renamed into place.
void saveSnapshot(const rdf::Dataset& data, const std::filesystem::path& path);
std::string snapshotText(const rdf::Dataset& data);
// Throws rdf::SyntaxError or std::runtime_error; never returns a partial store.
rdf::Dataset loadSnapshot(const std::filesystem::path& path);
rdf::Dataset parseSnapshot(std::string_view text);

}  // namespace linkclimate::pipeline
