// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <regex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "linkclimate/geo/geolink.hpp"
#include "linkclimate/net/transport.hpp"
#include "linkclimate/noaa/cdo.hpp"
#include "linkclimate/pipeline/competency.hpp"
#include "linkclimate/pipeline/pipeline.hpp"
#include "linkclimate/rdf/syntax.hpp"
#include "linkclimate/service/service.hpp"
#include "linkclimate/sparql/query.hpp"
#include "support/water_body_oracle.hpp"
#include "support/naive_sparql.hpp"
#include "support/support.hpp"

namespace rdf = linkclimate::rdf;
namespace pl = linkclimate::pipeline;
namespace svc = linkclimate::service;
namespace sparql = linkclimate::sparql;
namespace onto_ns = linkclimate::ontology;
using linkclimate::ontology::Ontology;
using linkclimate::util::Date;
using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

// Failure detail collected while a criterion runs.
struct Failures {
  std::vector<std::string> items;
  void check(bool ok, const std::string& what) {
    if (!ok) items.push_back(what);
  }
};

int failed = 0;

void criterion(const std::string& name, double limitSeconds, const std::function<void(Failures&)>& body) {
  Failures f;
  auto start = Clock::now();
  try {
    body(f);
  } catch (const std::exception& e) {
    f.items.push_back(std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (limitSeconds > 0 && secs > limitSeconds) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "took %.2f s, limit %.0f s", secs, limitSeconds);
    f.items.push_back(buf);
  }
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.2f s", secs);
  std::cout << (f.items.empty() ? "[PASS] " : "[FAIL] ") << name << " (" << timing << ")\n";
  for (std::size_t i = 0; i < f.items.size() && i < 8; ++i) std::cout << "       " << f.items[i] << "\n";
  if (f.items.size() > 8) std::cout << "       ... " << f.items.size() - 8 << " more\n";
  std::cout.flush();
  if (!f.items.empty()) ++failed;
}

pl::SyncConfig fixtureConfig(int window) {
  pl::SyncConfig cfg;
  cfg.fixtureDir = lctest::fixtureDir();
  cfg.windowDays = window;
  return cfg;
}

pl::SyncReport sync(const pl::SyncConfig& cfg, rdf::Store& store, const Ontology& onto, Date now) {
  linkclimate::noaa::FixtureTransport cdo(cfg.cdoFixtures());
  return pl::runSync(cfg, store, cdo, onto, now, [](auto) {});
}

void enrich(rdf::Store& store, const pl::SyncConfig& cfg, const Ontology& onto) {
  linkclimate::geo::FixtureGeocoderTransport nominatim(cfg.geocoderFixtures());
  linkclimate::net::RetryPolicy policy;
  policy.maxRetries = 0;
  linkclimate::geo::Geocoder geocoder(nominatim, policy, [](auto) {});
  pl::enrichAll(store, geocoder, onto);
}

// Stations listed under the configured locations, with raw coordinates.
std::map<std::string, std::pair<double, double>> listedStations(const std::vector<std::string>& locations) {
  auto doc = Json::parse(lctest::readFile(lctest::fixtureDir() / "cdo" / "stations.json"));
  std::set<std::string> listed;
  for (const auto& loc : locations)
    if (doc["filters"]["locationid"].contains(loc))
      for (const auto& id : doc["filters"]["locationid"][loc]) listed.insert(id.get<std::string>());
  std::map<std::string, std::pair<double, double>> out;
  for (const auto& s : doc["results"]) {
    std::string id = s["id"].get<std::string>();
    if (listed.count(id)) out[id] = {s["latitude"].get<double>(), s["longitude"].get<double>()};
  }
  return out;
}

// Spherical law of cosines; a third distance formula, independent of both
// the library and the suite oracle.
double cosineLawKm(double lat1, double lon1, double lat2, double lon2) {
  const double r = std::numbers::pi / 180;
  double c = std::sin(lat1 * r) * std::sin(lat2 * r) + std::cos(lat1 * r) * std::cos(lat2 * r) * std::cos((lon2 - lon1) * r);
  return 6371.0 * std::acos(std::clamp(c, -1.0, 1.0));
}

std::string nt(const std::string& iri) { return "<" + iri + ">"; }

template <typename Rows>
Rows sortedRows(Rows rows) {
  std::sort(rows.begin(), rows.end());
  return rows;
}

// ---------------------------------------------------------------------------

void idempotency(Failures& f) {
  Ontology onto;
  auto cfg = fixtureConfig(lctest::kFullWindowDays);
  const Date end = lctest::fullWindowEnd();
  lctest::TempDir dir;

  rdf::Store store;
  auto first = sync(cfg, store, onto, end);
  pl::saveSnapshot(store.read([](const rdf::Dataset& d) { return pl::parseSnapshot(pl::snapshotText(d)); }),
                   dir / "first.nq");
  auto second = sync(cfg, store, onto, end);
  store.read([&](const rdf::Dataset& d) {
    pl::saveSnapshot(d, dir / "second.nq");
    return 0;
  });
  rdf::Store fresh;
  sync(cfg, fresh, onto, end);
  fresh.read([&](const rdf::Dataset& d) {
    pl::saveSnapshot(d, dir / "fresh.nq");
    return 0;
  });

  const auto a = lctest::readFile(dir / "first.nq");
  f.check(first.triplesNew > 0, "first run added nothing");
  f.check(first.sourcesFailed == 0, "first run had failing sources");
  f.check(second.triplesNew == 0, "second run added " + std::to_string(second.triplesNew) + " triples");
  f.check(a == lctest::readFile(dir / "second.nq"), "snapshot changed after the second run");
  f.check(a == lctest::readFile(dir / "fresh.nq"), "an independent run wrote a different snapshot");
}

void windowOverlap(Failures& f) {
  Ontology onto;
  auto cfg = fixtureConfig(28);
  const Date t{2023, 7, 1};
  rdf::Store store;
  sync(cfg, store, onto, t);
  auto second = sync(cfg, store, onto, t.plusDays(7));

  const std::string first = t.plusDays(-28).str(), last = t.plusDays(7).str();
  const std::size_t oracle = lctest::observationRecordsBetween(first, last, cfg.locations);
  const std::size_t fresh = lctest::observationRecordsBetween(t.plusDays(1).str(), last, cfg.locations);

  auto listed = listedStations(cfg.locations);
  std::set<std::string> expected;
  for (const auto& r : lctest::rawObservations())
    if (r.day >= first && r.day <= last && listed.count(r.station))
      expected.insert(onto.mintResourceIri("observation", r.station + "/" + r.datatype + "/" + r.day + "T00:00:00").str());

  std::set<std::string> stored;
  store.read([&](const rdf::Dataset& d) {
    for (const auto& tr : d.match(std::nullopt, std::nullopt, onto_ns::term::type(), onto.terms().Observation))
      stored.insert(tr.subject.str());
    return 0;
  });
  f.check(oracle > 0, "no fixture records in the span");
  f.check(expected.size() == oracle, "raw key set and partition count disagree");
  f.check(stored.size() == oracle,
          "stored " + std::to_string(stored.size()) + " observations, partition oracle " + std::to_string(oracle));
  for (const auto& e : expected)
    if (!stored.count(e)) f.check(false, "missing " + e);
  for (const auto& s : stored)
    if (!expected.count(s)) f.check(false, "unexpected " + s);
  f.check(second.triplesNew == 7 * fresh,
          "second sync added " + std::to_string(second.triplesNew) + ", expected 7 x " + std::to_string(fresh));
}

void competency(Failures& f) {
  auto dep = lctest::fixtureDeployment();
  rdf::Store store;
  store.write([&](rdf::Dataset& d) {
    d = dep.data;
    return 0;
  });
  pl::CompetencyTargets targets;
  auto report = pl::runCompetencySuite(store, *dep.onto, lctest::readFile(lctest::fixtureDir() / "supplementary.nt"),
                                       targets);
  f.check(report.outcomes.size() == 11, "expected 11 questions, ran " + std::to_string(report.outcomes.size()));
  std::map<std::string, const pl::CqOutcome*> byId;
  for (const auto& o : report.outcomes) {
    byId[o.id] = &o;
    f.check(o.passed, o.id + ": " + o.detail);
  }

  // Geographic answers against the raw station file.
  pl::SyncConfig cfg;
  auto raw = listedStations(cfg.locations);
  auto focus = raw.find(targets.focusStation);
  f.check(focus != raw.end(), "focus station absent from the corpus");
  if (focus == raw.end()) return;
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& [id, ll] : raw)
    if (id != targets.focusStation)
      ranked.emplace_back(cosineLawKm(focus->second.first, focus->second.second, ll.first, ll.second),
                          onto_ns::Ontology().mintResourceIri("station", id).str());
  std::sort(ranked.begin(), ranked.end());
  pl::AnswerSet nearest;
  for (std::size_t i = 0; i < targets.nearestCount && i < ranked.size(); ++i) nearest.push_back({nt(ranked[i].second)});
  if (byId.count("CQ2")) f.check(byId["CQ2"]->actual == nearest, "CQ2 differs from the raw-coordinate ranking");

  pl::AnswerSet boxed;
  for (const auto& [id, ll] : raw)
    if (ll.first >= targets.south && ll.first <= targets.north && ll.second >= targets.west && ll.second <= targets.east)
      boxed.push_back({nt(dep.onto->mintResourceIri("station", id).str())});
  if (byId.count("CQ3"))
    f.check(sortedRows(byId["CQ3"]->actual) == sortedRows(boxed), "CQ3 differs from the raw-coordinate box scan");
  f.check(!boxed.empty(), "box holds no stations");
}

void waterBodies(Failures& f) {
  auto dep = lctest::fixtureDeployment();
  auto want = lctest::waterBodyOracle();
  auto got = pl::toAnswer(sparql::execute(pl::shippedQuery("water_bodies").value().text, dep.data));
  f.check(!got.empty(), "no (station, water body) bindings");
  f.check(got == want, pl::diffAnswers(want, got));
}

void engineOracle(Failures& f) {
  lctest::Rng rng(20240611);
  std::size_t compared = 0, nonEmpty = 0, mismatched = 0;
  for (int s = 0; s < 500; ++s) {
    auto d = lctest::randomJoinStore(rng, 200);
    if (d.totalSize() > 200) f.check(false, "store over 200 triples");
    for (int i = 0; i < 50; ++i) {
      auto q = lctest::randomQuery(rng);
      const std::string text = q.render();
      auto want = lctest::naiveEvaluate(q, d);
      ++compared;
      try {
        auto got = sparql::execute(text, d);
        if (got.vars != want.vars || sortedRows(got.rows) != sortedRows(want.rows)) {
          if (++mismatched <= 3) f.check(false, "mismatch on: " + text);
        }
      } catch (const std::exception& e) {
        if (++mismatched <= 3) f.check(false, std::string(e.what()) + " on: " + text);
      }
      if (!want.rows.empty()) ++nonEmpty;
    }
  }
  f.check(compared == 25000, "compared " + std::to_string(compared));
  f.check(mismatched == 0, std::to_string(mismatched) + " of " + std::to_string(compared) + " queries differ");
  std::cout << "       " << compared << " queries, " << nonEmpty << " with non-empty answers\n";
}

void serialization(Failures& f) {
  lctest::Rng rng(99);
  std::uniform_int_distribution<int> count(0, 40);
  std::size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<rdf::Triple> ts;
    for (int n = count(rng); n > 0; --n) ts.push_back(lctest::randomTriple(rng));
    const std::string text = rdf::serializeNTriples(ts);
    auto back = rdf::parseNTriples(text);
    std::set<std::string> want, got;
    for (const auto& t : ts) want.insert(rdf::serializeNTriples(std::vector<rdf::Triple>{t}));
    for (const auto& t : back) got.insert(rdf::serializeNTriples(std::vector<rdf::Triple>{t}));
    bool ok = want == got && back.size() == want.size() && rdf::serializeNTriples(back) == text;
    if (!ok && ++bad <= 3) f.check(false, "round trip changed set " + std::to_string(i));
  }
  f.check(bad == 0, std::to_string(bad) + " of 1000 N-Triples sets failed");

  lctest::TempDir dir;
  for (int i = 0; i < 50; ++i) {
    auto d = lctest::randomDataset(rng, 150);
    pl::saveSnapshot(d, dir / "a.nq");
    pl::saveSnapshot(pl::loadSnapshot(dir / "a.nq"), dir / "b.nq");
    if (lctest::readFile(dir / "a.nq") != lctest::readFile(dir / "b.nq")) f.check(false, "random snapshot " + std::to_string(i));
  }
  auto dep = lctest::fixtureDeployment();
  pl::saveSnapshot(dep.data, dir / "dep.nq");
  auto loaded = pl::loadSnapshot(dir / "dep.nq");
  f.check(rdf::sameContent(loaded, dep.data), "deployment snapshot lost content");
  pl::saveSnapshot(loaded, dir / "dep2.nq");
  f.check(lctest::readFile(dir / "dep.nq") == lctest::readFile(dir / "dep2.nq"), "deployment snapshot not byte-identical");
}

void httpConformance(Failures& f) {
  auto dep = lctest::fixtureDeployment();
  rdf::Store store(dep.data);
  svc::Service service(store, *dep.onto);
  svc::HttpServer server(service);
  const int port = server.bind("127.0.0.1", 0);
  std::thread thread([&] { server.run(); });
  server.waitUntilReady();
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(10, 0);

  auto triples = [&]() -> long long {
    auto r = cli.Get("/healthz");
    if (!r || r->status != 200) return -1;
    return Json::parse(r->body)["triples"].get<long long>();
  };

  // duplicate elimination on repeated POST
  const std::string body =
      "<http://example.org/s1> <http://example.org/p> \"one\" .\n"
      "<http://example.org/s2> <http://example.org/p> \"two\"@en .\n";
  const std::string graphPath = "/data?graph=" + linkclimate::net::percentEncode("http://example.org/posted");
  const long long before = triples();
  for (const std::string& path : {std::string("/data?default"), graphPath}) {
    auto p1 = cli.Post(path, body, "application/n-triples");
    f.check(p1 && p1->status == 204, "first POST to " + path + " not 204");
    const long long once = triples();
    auto p2 = cli.Post(path, body, "application/n-triples");
    f.check(p2 && p2->status == 204, "second POST to " + path + " not 204");
    f.check(once == triples(), "second POST to " + path + " changed cardinality");
    auto g = cli.Get(path, {{"Accept", "application/n-triples"}});
    f.check(g && g->status == 200 && rdf::parseNTriples(g->body).size() >= 2, "GET " + path);
  }
  f.check(triples() == before + 4, "expected exactly 4 new triples across both graphs");

  // dereferencing the Phoenix Park station
  const std::string station = "http://jresearch.ucd.ie/climate-kg/resource/station/GHCND:EI000003969";
  auto deref = cli.Get("/resource/station/GHCND:EI000003969", {{"Accept", "text/turtle"}});
  f.check(deref && deref->status == 200, "station dereference not 200");
  if (deref && deref->status == 200) {
    f.check(deref->get_header_value("Content-Type").rfind("text/turtle", 0) == 0, "dereference not Turtle");
    auto ts = rdf::parseTurtle(deref->body);
    const auto& t = dep.onto->terms();
    bool name = false, lat = false, lon = false;
    for (const auto& tr : ts) {
      if (tr.subject.str() != station) continue;
      if (tr.predicate == t.name && tr.object.isLiteral() &&
          tr.object.literal().lexical().find("DUBLIN PHOENIX PARK") != std::string::npos)
        name = true;
      if (tr.predicate == t.lat && tr.object.isLiteral() && tr.object.literal().isNumeric()) lat = true;
      if (tr.predicate == t.lon && tr.object.isLiteral() && tr.object.literal().isNumeric()) lon = true;
    }
    f.check(name, "no name statement");
    f.check(lat, "no latitude statement");
    f.check(lon, "no longitude statement");
  }

  // parser positions on 400
  struct Bad {
    std::string query;
    int line, column;
  };
  const std::vector<Bad> bad = {
      {"SELECT * WHERE { ?s ?p ?o }\nLIMIT x", 2, 7},
      {"SELECT ?s\nWHERE {\n  ?s ?p ?o .\n  FILTER ?s\n}", 4, 10},
      {"SELECT ?s WHERE { ?s ?p", 1, 24},
  };
  const std::regex pos(R"(line (\d+), column (\d+))");
  for (const auto& b : bad) {
    std::vector<httplib::Result> responses;
    responses.push_back(cli.Get("/sparql?query=" + linkclimate::net::percentEncode(b.query)));
    responses.push_back(cli.Post("/sparql", b.query, "application/sparql-query"));
    responses.push_back(cli.Post("/sparql", "query=" + linkclimate::net::percentEncode(b.query),
                                 "application/x-www-form-urlencoded"));
    for (auto& r : responses) {
      if (!r || r->status != 400) {
        f.check(false, "malformed query not rejected with 400");
        continue;
      }
      std::smatch m;
      bool found = std::regex_search(r->body, m, pos);
      f.check(found && std::stoi(m[1]) == b.line && std::stoi(m[2]) == b.column,
              "expected line " + std::to_string(b.line) + ", column " + std::to_string(b.column) + ", got: " + r->body);
    }
  }
  server.stop();
  thread.join();
}

void ontologyClosure(Failures& f) {
  Ontology onto;
  auto cfg = fixtureConfig(lctest::kFullWindowDays);
  rdf::Store store;
  sync(cfg, store, onto, lctest::fullWindowEnd());
  enrich(store, cfg, onto);

  std::set<std::string> declared;
  auto tbox = onto.ontologyTriples();
  for (const auto& t : tbox) {
    declared.insert(t.subject.str());
    declared.insert(t.predicate.str());
    if (t.object.isIri()) declared.insert(t.object.iri().str());
  }
  std::set<std::string> used, classes;
  store.read([&](const rdf::Dataset& d) {
    for (const auto& t : d.triples(std::nullopt)) {
      used.insert(t.predicate.str());
      if (t.predicate == onto_ns::term::type() && t.object.isIri()) classes.insert(t.object.iri().str());
    }
    return 0;
  });
  f.check(classes.size() >= 7, "fewer classes than expected in mapper output");
  for (const auto& p : used) f.check(declared.count(p), "predicate not in the ontology: " + p);
  for (const auto& c : classes) f.check(declared.count(c), "class not in the ontology: " + c);

  auto has = [&](const std::string& s, const std::string& p, const std::string& o) {
    return std::any_of(tbox.begin(), tbox.end(), [&](const rdf::Triple& t) {
      return t.subject.str() == s && t.predicate.str() == p && t.object.isIri() && t.object.iri().str() == o;
    });
  };
  const std::string ca = onto.caNamespace();
  const std::string owl = std::string(onto_ns::ns::owl), rdfs = std::string(onto_ns::ns::rdfs);
  const std::string aemet = std::string(onto_ns::ns::aemet), sosa = std::string(onto_ns::ns::sosa);
  f.check(has(ca + "Station", owl + "sameAs", aemet + "WeatherStation"), "ca:Station sameAs aemet:WeatherStation");
  f.check(has(ca + "Location", owl + "sameAs", aemet + "AdministrativeArea"), "ca:Location sameAs aemet:AdministrativeArea");
  f.check(has(ca + "Result", rdfs + "subClassOf", sosa + "Result"), "ca:Result subClassOf sosa:Result");
}

}  // namespace

int main() {
  {
    auto dep = lctest::fixtureDeployment();
    pl::SyncConfig cfg;
    std::cout << "corpus: " << listedStations(cfg.locations).size() << " stations, " << lctest::rawObservations().size()
              << " observation records, " << dep.data.totalSize() << " triples in the deployment\n";
  }
  criterion("ingest idempotency: identical runs give byte-identical snapshots and no new triples", 30, idempotency);
  criterion("window overlap: syncs at t and t+7d capture every record in [t-28d, t+7d] once", 0, windowOverlap);
  criterion("competency suite: 11 questions and geographic oracles", 60, competency);
  criterion("water-body query: non-empty and equal to the hand-traced answer", 0, waterBodies);
  criterion("query engine: 500 random stores x 50 queries equal naive evaluation", 120, engineOracle);
  criterion("serialization: 1000 N-Triples round trips and snapshot byte identity", 0, serialization);
  criterion("http: duplicate POST, station dereference, parser positions", 30, httpConformance);
  criterion("ontology closure and alignment axioms", 0, ontologyClosure);
  std::cout << (failed == 0 ? "all criteria passed\n" : std::to_string(failed) + " criteria failed\n");
  return failed == 0 ? 0 : 1;
}
