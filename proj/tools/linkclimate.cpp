// linkclimate: command-line front end for ingestion, enrichment, the HTTP
// service and local querying. Exit codes: 0 ok, 1 operational failure,
// 2 usage error.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "linkclimate/geo/geolink.hpp"
#include "linkclimate/noaa/cdo.hpp"
#include "linkclimate/pipeline/competency.hpp"
#include "linkclimate/pipeline/pipeline.hpp"
#include "linkclimate/rdf/syntax.hpp"
#include "linkclimate/service/service.hpp"
#include "linkclimate/sparql/query.hpp"

namespace fs = std::filesystem;
namespace lc = linkclimate;
using lc::pipeline::SyncConfig;

namespace {

constexpr int kOk = 0, kFailed = 1, kUsage = 2;

struct Options {
  std::string config, fixtureDir, snapshot, now, baseIri;
  int windowDays = 0;
  bool once = false, verbose = false;
};

std::string readAll(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SyncConfig resolveConfig(const Options& o) {
  SyncConfig cfg = o.config.empty() ? lc::pipeline::parseConfig("{}") : lc::pipeline::loadConfig(o.config);
  if (!o.fixtureDir.empty()) cfg.fixtureDir = o.fixtureDir;
  if (o.windowDays != 0) cfg.windowDays = o.windowDays;
  if (!o.snapshot.empty()) cfg.snapshotPath = o.snapshot;
  if (!o.baseIri.empty()) cfg.baseIri = o.baseIri;
  if (cfg.snapshotPath.empty()) cfg.snapshotPath = "linkclimate.nq";
  cfg.validate();
  return cfg;
}

lc::rdf::Dataset loadOrEmpty(const SyncConfig& cfg) {
  if (!fs::exists(cfg.snapshotPath)) {
    spdlog::info("no snapshot at {}; starting empty", cfg.snapshotPath.string());
    return {};
  }
  return lc::pipeline::loadSnapshot(cfg.snapshotPath);
}

void save(lc::rdf::Store& store, const SyncConfig& cfg) {
  store.read([&](const lc::rdf::Dataset& d) { lc::pipeline::saveSnapshot(d, cfg.snapshotPath); });
  spdlog::info("snapshot written to {}", cfg.snapshotPath.string());
}

lc::util::Date parseNow(const std::string& text) {
  if (text.empty()) return lc::util::Date::today();
  auto d = lc::util::Date::parse(text);
  if (!d) throw CLI::ValidationError("--now", "expected YYYY-MM-DD");
  return *d;
}

int ingest(const Options& o) {
  SyncConfig cfg = resolveConfig(o);
  std::unique_ptr<lc::net::Transport> cdo;
  if (cfg.fixtureMode()) {
    cdo = std::make_unique<lc::noaa::FixtureTransport>(cfg.cdoFixtures());
  } else {
    if (cfg.token.empty())
      throw lc::pipeline::ConfigError(std::string("$") + lc::pipeline::kTokenEnv + " is not set");
    cdo = std::make_unique<lc::net::HttpTransport>(cfg.noaaBase);
  }
  lc::ontology::Ontology onto(cfg.baseIri);
  lc::rdf::Store store(loadOrEmpty(cfg));
  lc::util::Date now = parseNow(o.now);
  for (;;) {
    auto report = lc::pipeline::runSync(cfg, store, *cdo, onto, now);
    save(store, cfg);
    std::printf("window %s..%s records=%zu emitted=%zu new=%zu rejected=%zu failed_sources=%zu/%zu %.2fs\n",
                report.windowStart.str().c_str(), report.windowEnd.str().c_str(), report.recordsFetched,
                report.triplesEmitted, report.triplesNew, report.recordsRejected, report.sourcesFailed,
                report.sourcesTotal, report.seconds);
    std::fflush(stdout);
    if (report.allFailed()) return kFailed;
    if (o.once) return kOk;
    std::this_thread::sleep_for(std::chrono::hours(24) * cfg.scheduleIntervalDays);
    now = o.now.empty() ? lc::util::Date::today() : now.plusDays(cfg.scheduleIntervalDays);
  }
}

int enrich(const Options& o) {
  SyncConfig cfg = resolveConfig(o);
  std::unique_ptr<lc::net::Transport> transport;
  lc::net::RetryPolicy policy = lc::geo::Geocoder::livePolicy();
  if (cfg.fixtureMode()) {
    transport = std::make_unique<lc::geo::FixtureGeocoderTransport>(cfg.geocoderFixtures());
    policy.minInterval = std::chrono::milliseconds(0);
    policy.maxRetries = 0;
  } else {
    transport = std::make_unique<lc::net::HttpTransport>(cfg.geocoderBase);
  }
  lc::geo::Geocoder geocoder(*transport, policy);
  lc::ontology::Ontology onto(cfg.baseIri);
  lc::rdf::Store store(loadOrEmpty(cfg));
  auto r = lc::pipeline::enrichAll(store, geocoder, onto);
  save(store, cfg);
  std::printf("stations=%zu enriched=%zu unenriched=%zu failed=%zu new=%zu\n", r.stations, r.enriched,
              r.unenriched, r.failed, r.triplesNew);
  return r.stations > 0 && r.failed == r.stations ? kFailed : kOk;
}

int wikidataImport(const Options& o, const std::string& file) {
  SyncConfig cfg = resolveConfig(o);
  lc::ontology::Ontology onto(cfg.baseIri);
  lc::rdf::Store store(loadOrEmpty(cfg));
  std::string text = readAll(file);
  auto added = store.write([&](lc::rdf::Dataset& d) { return lc::geo::importWikidataSnapshot(d, text, onto); });
  save(store, cfg);
  std::printf("imported %zu new triples into <%s>\n", added, lc::geo::wikidataGraph(onto).str().c_str());
  return kOk;
}

std::atomic<lc::service::HttpServer*> gServer{nullptr};

extern "C" void onSignal(int) {
  if (auto* s = gServer.load()) s->stop();
}

int serve(const Options& o, const std::string& host, int port, const std::string& staticDir) {
  SyncConfig cfg = resolveConfig(o);
  lc::ontology::Ontology onto(cfg.baseIri);
  lc::rdf::Store store(loadOrEmpty(cfg));
  lc::service::ServiceConfig sc;
  sc.host = host;
  sc.port = port;
  sc.staticDir = staticDir;
  lc::service::Service service(store, onto, sc, [&] { save(store, cfg); });
  lc::service::HttpServer server(service);
  int bound = server.bind(host, port);
  gServer = &server;
  std::signal(SIGINT, onSignal);
  std::signal(SIGTERM, onSignal);
  spdlog::info("serving on http://{}:{}/ (sparql, data, resource, healthz)", host, bound);
  server.run();
  gServer = nullptr;
  return kOk;
}

int query(const Options& o, const std::string& file, const std::string& format) {
  SyncConfig cfg = resolveConfig(o);
  std::string text = readAll(file);
  lc::rdf::Dataset data = loadOrEmpty(cfg);
  auto table = lc::sparql::execute(text, data);
  std::cout << (format == "csv" ? lc::sparql::toCsv(table) : lc::sparql::toSparqlJson(table));
  if (format != "csv") std::cout << "\n";
  return kOk;
}

int exportSnapshot(const Options& o, const std::string& path, const std::string& format) {
  SyncConfig cfg = resolveConfig(o);
  lc::rdf::Dataset data = loadOrEmpty(cfg);
  if (format == "nq") {
    lc::pipeline::saveSnapshot(data, path);
  } else {
    lc::ontology::Ontology onto(cfg.baseIri);
    std::ofstream out(path, std::ios::binary);
    auto triples = data.triples(std::nullopt);
    out << (format == "ttl" ? lc::rdf::serializeTurtle(triples, onto.prefixes())
                            : lc::rdf::serializeNTriples(triples));
    if (!out) throw std::runtime_error("cannot write " + path);
  }
  std::printf("%zu triples in %zu graphs -> %s\n", data.totalSize(), data.graphNames().size() + 1, path.c_str());
  return kOk;
}

int competency(const Options& o, std::string supplementary) {
  SyncConfig cfg = resolveConfig(o);
  if (supplementary.empty()) {
    if (!cfg.fixtureMode()) throw CLI::ValidationError("--supplementary", "required outside fixture mode");
    supplementary = (cfg.fixtureDir / "supplementary.nt").string();
  }
  lc::ontology::Ontology onto(cfg.baseIri);
  lc::rdf::Store store(loadOrEmpty(cfg));
  auto report = lc::pipeline::runCompetencySuite(store, onto, readAll(supplementary));
  for (const auto& cq : report.outcomes) {
    std::printf("%-4s %s  %zu rows  %.3fs  %s\n", cq.id.c_str(), cq.passed ? "PASS" : "FAIL", cq.actual.size(),
                cq.seconds, cq.question.c_str());
    if (!cq.passed) std::printf("%s", cq.detail.c_str());
  }
  return report.allPassed() ? kOk : kFailed;
}

int ontologyOut(const Options& o, const std::string& path, const std::string& format) {
  SyncConfig cfg = resolveConfig(o);
  lc::ontology::Ontology onto(cfg.baseIri);
  auto triples = onto.ontologyTriples();
  std::string text = format == "ttl" ? lc::rdf::serializeTurtle(triples, onto.prefixes())
                                     : lc::rdf::serializeNTriples(triples);
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path);
  }
  return kOk;
}

int listQueries(bool json) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& q : lc::pipeline::shippedQueries()) {
    if (json) arr.push_back({{"name", q.name}, {"question", q.question}, {"query", q.text}});
    else std::printf("%-9s %s\n", q.name.c_str(), q.question.c_str());
  }
  if (json) std::cout << arr.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LinkClimate: NOAA climate data as a linked knowledge graph"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--fixture-dir", o.fixtureDir, "serve NOAA and geocoder calls from this directory");
  app.add_option("--window-days", o.windowDays, "sliding window length in days")->check(CLI::PositiveNumber);
  app.add_option("--snapshot", o.snapshot, "snapshot file (N-Quads)");
  app.add_option("--base-iri", o.baseIri, "base IRI for minted resources");
  app.add_flag("-v,--verbose", o.verbose, "debug logging");

  auto* ingestCmd = app.add_subcommand("ingest", "fetch one sliding window per schedule tick");
  ingestCmd->add_flag("--once", o.once, "run a single window and exit");
  ingestCmd->add_option("--now", o.now, "window end date (YYYY-MM-DD); default today");

  auto* enrichCmd = app.add_subcommand("enrich", "reverse-geocode stations and link administrative areas");

  std::string wdFile;
  auto* wdCmd = app.add_subcommand("wikidata-import", "load a Wikidata N-Triples extract");
  wdCmd->add_option("file", wdFile, "N-Triples file or -")->required();

  std::string host = "127.0.0.1", staticDir;
  int port = 8080;
  auto* serveCmd = app.add_subcommand("serve", "run the SPARQL, graph store and dereferencing service");
  serveCmd->add_option("--host", host, "bind address");
  serveCmd->add_option("--port", port, "port, 0 for any")->check(CLI::Range(0, 65535));
  serveCmd->add_option("--static-dir", staticDir, "console assets mounted at /console");

  std::string queryFile, queryFormat = "json";
  auto* queryCmd = app.add_subcommand("query", "evaluate a SPARQL query against the snapshot");
  queryCmd->add_option("file", queryFile, "query file or -")->required();
  queryCmd->add_option("--format", queryFormat, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string exportPath, exportFormat = "nq";
  auto* exportCmd = app.add_subcommand("export", "write the store");
  exportCmd->add_option("path", exportPath, "output file")->required();
  exportCmd->add_option("--format", exportFormat, "nq (all graphs), nt or ttl (default graph)")
      ->check(CLI::IsMember({"nq", "nt", "ttl"}));

  std::string supplementary;
  auto* cqCmd = app.add_subcommand("competency", "run the competency question suite");
  cqCmd->add_option("--supplementary", supplementary, "N-Triples loaded for the last question");

  std::string ontoPath, ontoFormat = "nt";
  auto* ontoCmd = app.add_subcommand("ontology", "emit the ontology");
  ontoCmd->add_option("path", ontoPath, "output file, default stdout");
  ontoCmd->add_option("--format", ontoFormat, "nt or ttl")->check(CLI::IsMember({"nt", "ttl"}));

  bool queriesJson = false;
  auto* queriesCmd = app.add_subcommand("queries", "list the shipped competency queries");
  queriesCmd->add_flag("--json", queriesJson, "full text as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  auto logger = spdlog::stderr_color_mt("linkclimate");
  spdlog::set_default_logger(logger);
  spdlog::set_level(o.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*ingestCmd) return ingest(o);
    if (*enrichCmd) return enrich(o);
    if (*wdCmd) return wikidataImport(o, wdFile);
    if (*serveCmd) return serve(o, host, port, staticDir);
    if (*queryCmd) return query(o, queryFile, queryFormat);
    if (*exportCmd) return exportSnapshot(o, exportPath, exportFormat);
    if (*cqCmd) return competency(o, supplementary);
    if (*ontoCmd) return ontologyOut(o, ontoPath, ontoFormat);
    if (*queriesCmd) return listQueries(queriesJson);
  } catch (const lc::pipeline::ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kUsage;
  } catch (const CLI::ValidationError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailed;
  }
  return kUsage;
}
