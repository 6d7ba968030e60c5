#include "support.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <unistd.h>

#include <json.hpp>

#include "linkclimate/geo/geolink.hpp"
#include "linkclimate/noaa/cdo.hpp"
#include "linkclimate/pipeline/pipeline.hpp"

namespace lctest {

namespace lc = linkclimate;

std::filesystem::path fixtureDir() { return LINKCLIMATE_FIXTURE_DIR; }
std::filesystem::path queryDir() { return LINKCLIMATE_QUERY_DIR; }

std::string readFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("linkclimate-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

lc::util::Date fullWindowEnd() { return {2023, 10, 5}; }

Deployment fixtureDeployment() {
  static std::once_flag once;
  static std::shared_ptr<const lc::ontology::Ontology> onto;
  static std::unique_ptr<rdf::Dataset> built;
  std::call_once(once, [] {
    onto = std::make_shared<const lc::ontology::Ontology>();
    lc::pipeline::SyncConfig cfg;
    cfg.fixtureDir = fixtureDir();
    cfg.windowDays = kFullWindowDays;
    rdf::Store store;
    lc::noaa::FixtureTransport cdo(cfg.cdoFixtures());
    lc::pipeline::runSync(cfg, store, cdo, *onto, fullWindowEnd(), [](auto) {});
    lc::geo::FixtureGeocoderTransport nominatim(cfg.geocoderFixtures());
    lc::net::RetryPolicy policy;
    policy.maxRetries = 0;
    lc::geo::Geocoder geocoder(nominatim, policy, [](auto) {});
    lc::pipeline::enrichAll(store, geocoder, *onto);
    const std::string wd = readFile(fixtureDir() / "wikidata.nt");
    store.write([&](rdf::Dataset& d) { return lc::geo::importWikidataSnapshot(d, wd, *onto); });
    built = std::make_unique<rdf::Dataset>(
        store.read([](const rdf::Dataset& d) { return lc::pipeline::parseSnapshot(lc::pipeline::snapshotText(d)); }));
  });
  return {onto, *built};
}

std::string nastyText(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "a", "Z", " ", "\"", "\\", "\n", "\r", "\t", "'", "<", ">", "^^", "@en", "#", "_:b0",
      "\x01", "\x7f", "\xc3\xa9", "\xe2\x82\xac", "\xf0\x9f\x8c\xa7", "\\u0041", "\\n", ".", "\"\"\"",
      "0", "-1.5e3", "\xe6\x97\xa5\xe6\x9c\xac", "}", "{", ";", ","};
  std::uniform_int_distribution<std::size_t> len(0, 8), pick(0, pieces.size() - 1);
  std::string s;
  for (std::size_t i = len(rng); i > 0; --i) s += pieces[pick(rng)];
  return s;
}

rdf::Term randomTerm(Rng& rng, bool literalAllowed) {
  std::uniform_int_distribution<int> kind(0, literalAllowed ? 5 : 0);
  std::uniform_int_distribution<int> small(0, 40);
  switch (kind(rng)) {
    case 0: {
      static const std::vector<std::string> bases = {"http://example.org/", "https://ex.com/a/b#",
                                                     "urn:x:", "http://x.org/%C3%A9/"};
      return rdf::Iri(bases[small(rng) % bases.size()] + "r" + std::to_string(small(rng)));
    }
    case 1: return rdf::Literal(nastyText(rng));
    case 2: return rdf::Literal::langString(nastyText(rng), small(rng) % 2 ? "en" : "ga-IE");
    case 3: return rdf::integerLiteral(small(rng) - 20);
    case 4: return rdf::doubleLiteral((small(rng) - 20) / 8.0);
    default:
      return rdf::typedLiteral(nastyText(rng), small(rng) % 2 ? "http://example.org/dt" : rdf::xsd::kDate);
  }
}

rdf::Triple randomTriple(Rng& rng) {
  return {randomTerm(rng, false).iri(), randomTerm(rng, false).iri(), randomTerm(rng, true)};
}

rdf::Dataset randomDataset(Rng& rng, std::size_t maxTriples) {
  rdf::Dataset d;
  std::uniform_int_distribution<std::size_t> n(0, maxTriples);
  std::uniform_int_distribution<int> g(0, 3);
  for (std::size_t i = n(rng); i > 0; --i) {
    int which = g(rng);
    std::optional<rdf::Iri> graph;
    if (which > 1) graph = rdf::Iri("http://example.org/graph/" + std::to_string(which));
    d.insert(graph, randomTriple(rng));
  }
  return d;
}

std::vector<RawObservation> rawObservations() {
  auto doc = nlohmann::json::parse(readFile(fixtureDir() / "cdo" / "data.json"));
  std::vector<RawObservation> out;
  for (const auto& r : doc["results"])
    out.push_back({r["station"].get<std::string>(), r["datatype"].get<std::string>(),
                   r["date"].get<std::string>().substr(0, 10), r["value"].get<long long>()});
  return out;
}

std::size_t observationRecordsBetween(const std::string& first, const std::string& last,
                                      const std::vector<std::string>& locations) {
  auto doc = nlohmann::json::parse(readFile(fixtureDir() / "cdo" / "data.json"));
  std::set<std::string> stations;
  for (const auto& loc : locations)
    if (doc["filters"]["locationid"].contains(loc))
      for (const auto& s : doc["filters"]["locationid"][loc]) stations.insert(s.get<std::string>());
  std::set<std::tuple<std::string, std::string, std::string>> keys;
  for (const auto& r : doc["results"]) {
    std::string day = r["date"].get<std::string>().substr(0, 10);
    std::string station = r["station"].get<std::string>();
    if (day >= first && day <= last && stations.count(station))
      keys.emplace(station, r["datatype"].get<std::string>(), day);
  }
  return keys.size();
}

}  // namespace lctest
