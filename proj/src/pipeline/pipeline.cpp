#include "linkclimate/pipeline/pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "linkclimate/noaa/mapping.hpp"
#include "linkclimate/rdf/syntax.hpp"

namespace linkclimate::pipeline {

using rdf::Triple;

void SyncConfig::validate() const {
  if (windowDays < 1) throw ConfigError("window_days must be at least 1");
  if (scheduleIntervalDays < 1) throw ConfigError("schedule_interval_days must be at least 1");
  if (scheduleIntervalDays > windowDays)
    throw ConfigError("schedule_interval_days exceeds window_days; windows would leave gaps");
  if (datasets.empty()) throw ConfigError("no datasets configured");
  if (locations.empty()) throw ConfigError("no locations configured");
  if (pageLimit < 1 || pageLimit > 1000) throw ConfigError("page_limit must be in [1, 1000]");
  if (!rdf::Iri::isValid(baseIri) || !baseIri.ends_with('/'))
    throw ConfigError("base_iri must be an absolute IRI ending in '/'");
  if (maxRetries < 0) throw ConfigError("max_retries must be non-negative");
}

net::RetryPolicy SyncConfig::retryPolicy() const {
  net::RetryPolicy p;
  p.maxRetries = maxRetries;
  p.requestBudget = requestBudget;
  p.minInterval = fixtureMode() ? std::chrono::milliseconds(0) : requestInterval;
  return p;
}

SyncConfig parseConfig(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  SyncConfig cfg;
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "datasets") cfg.datasets = v.get<std::vector<std::string>>();
      else if (key == "locations") cfg.locations = v.get<std::vector<std::string>>();
      else if (key == "window_days") cfg.windowDays = v.get<int>();
      else if (key == "schedule_interval_days") cfg.scheduleIntervalDays = v.get<int>();
      else if (key == "noaa_base") cfg.noaaBase = v.get<std::string>();
      else if (key == "geocoder_base") cfg.geocoderBase = v.get<std::string>();
      else if (key == "base_iri") cfg.baseIri = v.get<std::string>();
      else if (key == "snapshot_path") cfg.snapshotPath = v.get<std::string>();
      else if (key == "fixture_dir") cfg.fixtureDir = v.get<std::string>();
      else if (key == "units") cfg.units = v.is_null() ? std::nullopt : std::optional(v.get<std::string>());
      else if (key == "page_limit") cfg.pageLimit = v.get<int>();
      else if (key == "request_budget") cfg.requestBudget = v.get<std::size_t>();
      else if (key == "request_interval_ms") cfg.requestInterval = std::chrono::milliseconds(v.get<long>());
      else if (key == "max_retries") cfg.maxRetries = v.get<int>();
      else if (key == "token") throw ConfigError(std::string("token must come from $") + kTokenEnv);
      else throw ConfigError("unknown config key \"" + key + "\"");
    }
  } catch (const nlohmann::json::type_error& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  if (const char* token = std::getenv(kTokenEnv)) cfg.token = token;
  return cfg;
}

SyncConfig loadConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  SyncConfig cfg = parseConfig(ss.str());
  // Relative paths in the file are relative to the file.
  auto base = path.parent_path();
  if (!cfg.fixtureDir.empty() && cfg.fixtureDir.is_relative()) cfg.fixtureDir = base / cfg.fixtureDir;
  if (!cfg.snapshotPath.empty() && cfg.snapshotPath.is_relative())
    cfg.snapshotPath = base / cfg.snapshotPath;
  return cfg;
}

namespace {

struct Source {
  noaa::FetchPlan plan;
  noaa::RequestContext ctx;
};

class Sync {
 public:
  Sync(const SyncConfig& cfg, rdf::Store& store, net::Fetcher& fetcher,
       const ontology::Ontology& onto, SyncReport& report)
      : cfg_(cfg), store_(store), fetcher_(fetcher), mapper_(onto), report_(report) {}

  // Fetches one source and maps every record; returns the fetched records
  // or nullopt when the source failed.
  std::optional<std::vector<noaa::Json>> fetch(const Source& src) {
    ++report_.sourcesTotal;
    try {
      auto records = noaa::fetchAll(src.plan, fetcher_);
      report_.recordsFetched += records.size();
      return records;
    } catch (const std::exception& e) {
      ++report_.sourcesFailed;
      spdlog::warn("source {} {} failed: {}", src.plan.endpoint,
                   net::canonicalQuery(src.plan.params), e.what());
      return std::nullopt;
    }
  }

  template <typename MapFn>
  void apply(const std::vector<noaa::Json>& records, MapFn&& map) {
    std::vector<Triple> triples;
    for (const auto& rec : records) {
      try {
        auto mapped = map(rec);
        triples.insert(triples.end(), mapped.begin(), mapped.end());
      } catch (const noaa::RecordError& e) {
        ++report_.recordsRejected;
        spdlog::warn("rejected record: {}", e.what());
      }
    }
    commit(triples);
  }

  void commit(const std::vector<Triple>& triples) {
    report_.triplesEmitted += triples.size();
    report_.triplesNew += store_.write([&](rdf::Dataset& d) { return d.insertAll(std::nullopt, triples); });
  }

  Source source(std::string endpoint, net::Params params, noaa::RequestContext ctx = {}) const {
    if (cfg_.units) params.emplace_back("units", *cfg_.units);
    return {{std::move(endpoint), std::move(params), cfg_.token, cfg_.pageLimit}, std::move(ctx)};
  }

  void metadata(const Source& src) {
    auto records = fetch(src);
    if (!records) return;
    apply(*records, [&](const noaa::Json& j) {
      return mapper_.mapMetadata(noaa::MetadataRec::fromJson(j), src.plan.endpoint, src.ctx);
    });
  }

  const SyncConfig& cfg_;
  rdf::Store& store_;
  net::Fetcher& fetcher_;
  noaa::Mapper mapper_;
  SyncReport& report_;
};

}  // namespace

SyncReport runSync(const SyncConfig& cfg, rdf::Store& store, net::Transport& cdo,
                   const ontology::Ontology& onto, util::Date now, net::Sleeper sleeper) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  SyncReport report;
  report.windowEnd = now;
  report.windowStart = now.plusDays(-cfg.windowDays);

  net::Fetcher fetcher(cdo, cfg.retryPolicy(), std::move(sleeper));
  Sync sync(cfg, store, fetcher, onto, report);

  sync.commit(onto.ontologyTriples());

  sync.metadata(sync.source("/datasets", {}));
  sync.metadata(sync.source("/locationcategories", {}));
  for (const auto& ds : cfg.datasets) {
    auto categories = sync.fetch(sync.source("/datacategories", {{"datasetid", ds}}));
    if (categories) {
      sync.apply(*categories, [&](const noaa::Json& j) {
        return sync.mapper_.mapMetadata(noaa::MetadataRec::fromJson(j), "/datacategories");
      });
      for (const auto& c : *categories) {
        if (!c.contains("id") || !c["id"].is_string()) continue;
        const std::string cat = c["id"].get<std::string>();
        sync.metadata(sync.source("/datatypes", {{"datasetid", ds}, {"datacategoryid", cat}},
                                  {std::nullopt, cat}));
      }
    }
    sync.metadata(sync.source("/locations", {{"datasetid", ds}, {"locationcategoryid", "CNTRY"}}));
    for (const auto& loc : cfg.locations) {

      auto stations = sync.fetch(sync.source("/stations", {{"datasetid", ds}, {"locationid", loc}}));
      if (stations) {
        sync.apply(*stations, [&](const noaa::Json& j) {
          auto rec = noaa::StationRec::fromJson(j);
          auto triples = sync.mapper_.mapStation(rec);
          triples.push_back(sync.mapper_.stationLocation(rec.id, loc));
          return triples;
        });
      }

      auto data = sync.fetch(sync.source("/data", {{"datasetid", ds},
                                                   {"locationid", loc},
                                                   {"startdate", report.windowStart.str()},
                                                   {"enddate", report.windowEnd.str()}}));
      if (data) {
        sync.apply(*data, [&](const noaa::Json& j) {
          return sync.mapper_.mapObservation(noaa::ObservationRec::fromJson(j));
        });
      }
    }
  }

  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  spdlog::info("sync {}..{}: {} records, {} triples emitted, {} new, {} rejected, {}/{} sources failed",
               report.windowStart.str(), report.windowEnd.str(), report.recordsFetched,
               report.triplesEmitted, report.triplesNew, report.recordsRejected,
               report.sourcesFailed, report.sourcesTotal);
  return report;
}

EnrichReport enrichAll(rdf::Store& store, geo::Geocoder& geocoder, const ontology::Ontology& onto) {
  const auto& t = onto.terms();
  struct Point {
    rdf::Iri station;
    double lat, lon;
  };
  std::vector<Point> points = store.read([&](const rdf::Dataset& d) {
    std::vector<Point> out;
    std::set<rdf::Iri> stations;
    for (const auto& tr : d.match(std::nullopt, std::nullopt, ontology::term::type(), rdf::Term(t.Station)))
      stations.insert(tr.subject);
    for (const auto& s : stations) {
      auto lat = d.match(std::nullopt, s, t.lat, std::nullopt);
      auto lon = d.match(std::nullopt, s, t.lon, std::nullopt);
      if (lat.empty() || lon.empty() || !lat[0].object.isLiteral() || !lon[0].object.isLiteral())
        continue;
      auto la = lat[0].object.literal().numericValue(), lo = lon[0].object.literal().numericValue();
      if (la && lo) out.push_back({s, *la, *lo});
    }
    return out;
  });

  EnrichReport report;
  report.stations = points.size();
  geo::Enricher enricher(onto);
  for (const auto& p : points) {
    geo::GeocodeResult g;
    try {
      g = geocoder.reverse(p.lat, p.lon);
    } catch (const std::exception& e) {
      ++report.failed;
      spdlog::warn("geocoding {} failed: {}", p.station.str(), e.what());
      continue;
    }
    if (g.empty()) {
      ++report.unenriched;
      continue;
    }
    auto triples = enricher.enrichStation(p.station, g);
    report.triplesNew += store.write([&](rdf::Dataset& d) { return d.insertAll(std::nullopt, triples); });
    ++report.enriched;
  }
  spdlog::info("enrich: {} stations, {} enriched, {} without coverage, {} failed, {} new triples",
               report.stations, report.enriched, report.unenriched, report.failed, report.triplesNew);
  return report;
}

std::string snapshotText(const rdf::Dataset& data) { return rdf::serializeNQuads(data); }

void saveSnapshot(const rdf::Dataset& data, const std::filesystem::path& path) {
  const std::string text = snapshotText(data);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot replace " + path.string() + ": " + ec.message());
  }
}

rdf::Dataset parseSnapshot(std::string_view text) {
  rdf::Dataset data;
  for (auto& q : rdf::parseNQuads(text)) data.insert(q.graph, q.triple);
  return data;
}

rdf::Dataset loadSnapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read snapshot " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseSnapshot(ss.str());
}

}  // namespace linkclimate::pipeline
