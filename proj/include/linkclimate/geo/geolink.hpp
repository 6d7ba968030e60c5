#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkclimate/net/transport.hpp"
#include "linkclimate/ontology/ontology.hpp"
#include "linkclimate/rdf/dataset.hpp"

namespace linkclimate::geo {

inline constexpr std::string_view kDefaultGeocoderBase = "https://nominatim.openstreetmap.org";

// Administrative levels read from a reverse-geocoding address, finest first.
inline const std::vector<std::string>& levelOrder() {
  static const std::vector<std::string> kLevels = {"suburb", "village", "town", "city",
                                                   "county", "state",   "country"};
  return kLevels;
}

struct GeocodeResult {
  // (level, name), coarsest first: country, state, county, ...
  std::vector<std::pair<std::string, std::string>> address;
  std::string countryCode;
  std::map<std::string, std::string> wikidataIds;  // level -> Q-id
  long long osmId = 0;
  std::string osmType;
  bool unableToGeocode = false;

  bool empty() const noexcept { return address.empty(); }
};

// Parses a Nominatim jsonv2 reverse response. The `wikidata` extra tag is
// attributed to the level named by `addresstype` (falling back to the
// finest present level). Malformed Q-ids are ignored.
GeocodeResult parseReverseResponse(std::string_view body);

bool isQid(std::string_view id);

class Geocoder {
 public:
  // `minInterval` is the spacing between live requests (Nominatim policy: 1 s).
  Geocoder(net::Transport& transport, net::RetryPolicy policy, net::Sleeper sleeper = net::sleepFor);

  // Throws net::HttpError once retries are exhausted.
  GeocodeResult reverse(double lat, double lon);

  static net::RetryPolicy livePolicy();

 private:
  net::Fetcher fetcher_;
};

// Offline geocoder: answers /reverse from `<dir>/reverse_<lat>_<lon>.json`,
// coordinates printed with four decimals. Unknown coordinates get 404.
class FixtureGeocoderTransport : public net::Transport {
 public:
  explicit FixtureGeocoderTransport(std::filesystem::path dir) : dir_(std::move(dir)) {}
  net::Response get(const net::Request& request) override;
  std::vector<net::Request> requestLog() const;

  static std::string fileName(double lat, double lon);

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::vector<net::Request> log_;
};

struct AdminArea {
  rdf::Iri iri;
  std::string level;
  std::string name;
  std::optional<rdf::Iri> wikidata;
};

// Turns geocoder output into CA Location entities linked to a station.
class Enricher {
 public:
  explicit Enricher(const ontology::Ontology& onto) : onto_(onto) {}

  // Identity is (level, country code, name): the same county reached from
  // two stations is one entity.
  AdminArea area(std::string_view level, std::string_view countryCode, std::string_view name,
                 const std::optional<std::string>& qid = std::nullopt) const;

  // For each address level: (A a ca:Location), (A ca:name), optional
  // (A owl:sameAs wd:Q..); then the containment chain station -> finest ->
  // ... -> coarsest via ca:isLocatedIn. Empty address gives no triples.
  std::vector<rdf::Triple> enrichStation(const rdf::Iri& station, const GeocodeResult& g) const;

 private:
  const ontology::Ontology& onto_;
};

// Loads an N-Triples Wikidata extract into the named graph base+"graph/wikidata".
// Subjects must be Wikidata entity IRIs. All-or-nothing; returns the number
// of triples that were new.
std::size_t importWikidataSnapshot(rdf::Dataset& data, std::string_view ntriples,
                                   const ontology::Ontology& onto);

rdf::Iri wikidataGraph(const ontology::Ontology& onto);

}  // namespace linkclimate::geo
