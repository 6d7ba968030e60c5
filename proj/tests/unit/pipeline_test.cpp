#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>

#include "linkclimate/noaa/cdo.hpp"
#include "linkclimate/pipeline/pipeline.hpp"
#include "support/support.hpp"

namespace rdf = linkclimate::rdf;
namespace pl = linkclimate::pipeline;
namespace noaa = linkclimate::noaa;
using linkclimate::ontology::Ontology;
using linkclimate::util::Date;

namespace {

pl::SyncConfig fixtureConfig(int window = 28) {
  pl::SyncConfig cfg;
  cfg.fixtureDir = lctest::fixtureDir();
  cfg.windowDays = window;
  return cfg;
}

pl::SyncReport sync(const pl::SyncConfig& cfg, rdf::Store& store, const Ontology& onto, Date now) {
  noaa::FixtureTransport cdo(cfg.cdoFixtures());
  return pl::runSync(cfg, store, cdo, onto, now, [](auto) {});
}

}  // namespace

TEST(Config, ParsesKnownKeysAndRejectsOthers) {
  auto cfg = pl::parseConfig(R"({"datasets":["GHCND"],"locations":["FIPS:EI"],"window_days":14,
                                 "schedule_interval_days":7,"units":"metric","page_limit":500})");
  EXPECT_EQ(cfg.windowDays, 14);
  EXPECT_EQ(cfg.locations, std::vector<std::string>{"FIPS:EI"});
  EXPECT_EQ(cfg.units, std::optional<std::string>("metric"));
  EXPECT_EQ(cfg.pageLimit, 500);
  EXPECT_THROW(pl::parseConfig(R"({"token":"abc"})"), pl::ConfigError);
  EXPECT_THROW(pl::parseConfig(R"({"windowdays":3})"), pl::ConfigError);
  EXPECT_THROW(pl::parseConfig("{"), std::exception);
}

TEST(Config, Validation) {
  pl::SyncConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.scheduleIntervalDays = 29;
  EXPECT_THROW(cfg.validate(), pl::ConfigError);
  cfg = {};
  cfg.windowDays = 0;
  EXPECT_THROW(cfg.validate(), pl::ConfigError);
  cfg = {};
  cfg.locations.clear();
  EXPECT_THROW(cfg.validate(), pl::ConfigError);
  cfg = {};
  cfg.pageLimit = 1001;
  EXPECT_THROW(cfg.validate(), pl::ConfigError);
  cfg = {};
  cfg.baseIri = "http://example.org/no-slash";
  EXPECT_THROW(cfg.validate(), pl::ConfigError);
}

TEST(Config, TokenComesFromEnvironmentAndPathsResolve) {
  lctest::TempDir dir;
  std::ofstream(dir / "c.json") << R"({"fixture_dir":"fx","snapshot_path":"out.nq"})";
  ::setenv(pl::kTokenEnv, "from-env", 1);
  auto cfg = pl::loadConfig(dir / "c.json");
  ::unsetenv(pl::kTokenEnv);
  EXPECT_EQ(cfg.token, "from-env");
  EXPECT_EQ(cfg.fixtureDir, dir.path() / "fx");
  EXPECT_EQ(cfg.snapshotPath, dir.path() / "out.nq");
  EXPECT_EQ(cfg.retryPolicy().minInterval.count(), 0);
}

TEST(Sync, RerunIsIdempotent) {
  Ontology onto;
  rdf::Store store;
  auto cfg = fixtureConfig();
  auto first = sync(cfg, store, onto, {2023, 7, 15});
  EXPECT_GT(first.triplesNew, 0u);
  EXPECT_LE(first.triplesNew, first.triplesEmitted);
  EXPECT_EQ(first.recordsRejected, 0u);
  EXPECT_EQ(first.sourcesFailed, 0u);
  auto text = store.read([](const rdf::Dataset& d) { return pl::snapshotText(d); });
  auto second = sync(cfg, store, onto, {2023, 7, 15});
  EXPECT_EQ(second.triplesNew, 0u);
  EXPECT_EQ(second.triplesEmitted, first.triplesEmitted);
  EXPECT_EQ(store.read([](const rdf::Dataset& d) { return pl::snapshotText(d); }), text);
}

TEST(Sync, OverlappingWindowsAddOnlyNewDays) {
  Ontology onto;
  rdf::Store store;
  auto cfg = fixtureConfig(28);
  const Date t{2023, 7, 1};
  auto first = sync(cfg, store, onto, t);
  const std::size_t firstRecords = lctest::observationRecordsBetween(t.plusDays(-28).str(), t.str(), cfg.locations);
  EXPECT_GE(first.recordsFetched, firstRecords);
  auto second = sync(cfg, store, onto, t.plusDays(7));
  const std::size_t fresh = lctest::observationRecordsBetween(t.plusDays(1).str(), t.plusDays(7).str(), cfg.locations);
  EXPECT_GT(fresh, 0u);
  EXPECT_EQ(second.triplesNew, 7 * fresh);
}

TEST(Sync, EmptyWindowChangesNothing) {
  Ontology onto;
  rdf::Store store;
  auto cfg = fixtureConfig(28);
  sync(cfg, store, onto, {2023, 7, 1});
  auto before = store.read([](const rdf::Dataset& d) { return pl::snapshotText(d); });
  auto report = sync(cfg, store, onto, {2030, 1, 1});
  EXPECT_EQ(report.triplesNew, 0u);
  EXPECT_EQ(store.read([](const rdf::Dataset& d) { return pl::snapshotText(d); }), before);
}

TEST(Sync, MissingCorpusCountsFailedSources) {
  Ontology onto;
  rdf::Store store;
  lctest::TempDir empty;
  pl::SyncConfig cfg;
  cfg.fixtureDir = empty.path();
  noaa::FixtureTransport cdo(cfg.cdoFixtures());
  auto report = pl::runSync(cfg, store, cdo, onto, {2023, 7, 1}, [](auto) {});
  EXPECT_TRUE(report.allFailed());
  // the T-Box is still committed
  EXPECT_EQ(store.read([](const rdf::Dataset& d) { return d.size(std::nullopt); }), onto.ontologyTriples().size());
}

TEST(Enrich, RerunAddsNothing) {
  Ontology onto;
  rdf::Store store;
  auto cfg = fixtureConfig(28);
  sync(cfg, store, onto, {2023, 7, 1});
  linkclimate::geo::FixtureGeocoderTransport nominatim(cfg.geocoderFixtures());
  linkclimate::net::RetryPolicy policy;
  policy.maxRetries = 0;
  linkclimate::geo::Geocoder geocoder(nominatim, policy, [](auto) {});
  auto first = pl::enrichAll(store, geocoder, onto);
  EXPECT_GT(first.enriched, 0u);
  EXPECT_EQ(first.unenriched, 1u);  // the buoy
  EXPECT_EQ(first.failed, 0u);
  EXPECT_EQ(first.stations, first.enriched + first.unenriched + first.failed);
  auto second = pl::enrichAll(store, geocoder, onto);
  EXPECT_EQ(second.triplesNew, 0u);
}

TEST(Snapshot, RoundTripAndByteIdentity) {
  lctest::Rng rng(77);
  lctest::TempDir dir;
  for (int i = 0; i < 30; ++i) {
    auto d = lctest::randomDataset(rng, 120);
    pl::saveSnapshot(d, dir / "a.nq");
    pl::saveSnapshot(d, dir / "b.nq");
    EXPECT_EQ(lctest::readFile(dir / "a.nq"), lctest::readFile(dir / "b.nq"));
    auto back = pl::loadSnapshot(dir / "a.nq");
    ASSERT_TRUE(rdf::sameContent(back, d));
  }
  rdf::Dataset empty;
  pl::saveSnapshot(empty, dir / "e.nq");
  EXPECT_EQ(pl::loadSnapshot(dir / "e.nq").totalSize(), 0u);
  std::ofstream(dir / "bad.nq") << "<http://example.org/a> <http://example.org/p> \"x\" .\nnot a quad\n";
  EXPECT_THROW(pl::loadSnapshot(dir / "bad.nq"), rdf::SyntaxError);
  EXPECT_THROW(pl::loadSnapshot(dir / "missing.nq"), std::runtime_error);
}

TEST(Snapshot, NoTemporaryLeftBehind) {
  lctest::TempDir dir;
  rdf::Dataset d;
  d.insert(std::nullopt, {rdf::Iri("http://example.org/a"), rdf::Iri("http://example.org/p"), rdf::Literal("x")});
  pl::saveSnapshot(d, dir / "s.nq");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 1u);
}
