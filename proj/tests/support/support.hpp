#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "linkclimate/ontology/ontology.hpp"
#include "linkclimate/rdf/dataset.hpp"
#include "linkclimate/rdf/term.hpp"
#include "linkclimate/util/dates.hpp"

namespace lctest {

namespace rdf = linkclimate::rdf;

using Rng = std::mt19937_64;

std::filesystem::path fixtureDir();
std::filesystem::path queryDir();
std::string readFile(const std::filesystem::path& p);

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Window end date that covers every fixture observation with a 130-day window.
inline constexpr int kFullWindowDays = 130;
linkclimate::util::Date fullWindowEnd();

// Fully built fixture deployment: one full-window sync, enrichment and the
// Wikidata extract. Built once per process; callers get a private copy.
struct Deployment {
  std::shared_ptr<const linkclimate::ontology::Ontology> onto;
  rdf::Dataset data;
};
Deployment fixtureDeployment();

// Literal text drawn from a pool heavy on quotes, backslashes, control
// characters, newlines and non-ASCII code points.
std::string nastyText(Rng& rng);
rdf::Term randomTerm(Rng& rng, bool literalAllowed);
rdf::Triple randomTriple(Rng& rng);
rdf::Dataset randomDataset(Rng& rng, std::size_t maxTriples);

// Raw fixture observation records: station, datatype, day (YYYY-MM-DD), value.
struct RawObservation {
  std::string station, datatype, day;
  long long value;
};
std::vector<RawObservation> rawObservations();

// Distinct (station, datatype, day) records with first <= day <= last, read
// straight from the fixture corpus and limited to stations listed under one
// of `locations`.
std::size_t observationRecordsBetween(const std::string& first, const std::string& last,
                                      const std::vector<std::string>& locations);

}  // namespace lctest
