#include "linkclimate/geo/geolink.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "linkclimate/rdf/syntax.hpp"

namespace linkclimate::geo {

using Json = nlohmann::json;

bool isQid(std::string_view id) {
  if (id.size() < 2 || id[0] != 'Q' || id[1] == '0') return false;
  return std::all_of(id.begin() + 1, id.end(), [](char c) { return c >= '0' && c <= '9'; });
}

GeocodeResult parseReverseResponse(std::string_view body) {
  Json doc;
  try {
    doc = Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(std::string("malformed geocoder response: ") + e.what());
  }
  GeocodeResult out;
  if (!doc.is_object() || doc.contains("error")) {
    out.unableToGeocode = true;
    return out;
  }
  const Json address = doc.value("address", Json::object());
  const auto& levels = levelOrder();
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    auto v = address.find(*it);
    if (v != address.end() && v->is_string() && !v->get<std::string>().empty())
      out.address.emplace_back(*it, v->get<std::string>());
  }
  out.countryCode = address.value("country_code", "");
  out.osmType = doc.value("osm_type", "");
  if (auto id = doc.find("osm_id"); id != doc.end() && id->is_number_integer())
    out.osmId = id->get<long long>();
  if (out.address.empty()) {
    out.unableToGeocode = true;
    return out;
  }

  const Json tags = doc.value("extratags", Json::object());
  if (auto q = tags.find("wikidata"); q != tags.end() && q->is_string() && isQid(q->get<std::string>())) {
    std::string level = doc.value("addresstype", "");
    bool present = std::any_of(out.address.begin(), out.address.end(),
                               [&](const auto& kv) { return kv.first == level; });
    if (!present) level = out.address.back().first;
    out.wikidataIds[level] = q->get<std::string>();
  }
  return out;
}

net::RetryPolicy Geocoder::livePolicy() {
  net::RetryPolicy p;
  p.minInterval = std::chrono::milliseconds(1000);
  p.maxRetries = 3;
  return p;
}

Geocoder::Geocoder(net::Transport& transport, net::RetryPolicy policy, net::Sleeper sleeper)
    : fetcher_(transport, policy, std::move(sleeper)) {}

namespace {

std::string coordinate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

GeocodeResult Geocoder::reverse(double lat, double lon) {
  if (lat < -90 || lat > 90 || lon < -180 || lon > 180)
    throw std::invalid_argument("coordinates out of range");
  net::Request req{"/reverse",
                   {{"format", "jsonv2"},
                    {"lat", coordinate(lat)},
                    {"lon", coordinate(lon)},
                    {"extratags", "1"},
                    {"accept-language", "en"}},
                   {{"User-Agent", "linkclimate/1.0"}}};
  return parseReverseResponse(fetcher_.get(req).body);
}

std::string FixtureGeocoderTransport::fileName(double lat, double lon) {
  return "reverse_" + coordinate(lat) + "_" + coordinate(lon) + ".json";
}

net::Response FixtureGeocoderTransport::get(const net::Request& request) {
  std::lock_guard lock(mutex_);
  log_.push_back(request);
  if (request.path != "/reverse") return {404, "{}"};
  auto lat = net::param(request.params, "lat");
  auto lon = net::param(request.params, "lon");
  if (!lat || !lon) return {400, R"({"error":"missing coordinates"})"};
  auto path = dir_ / ("reverse_" + *lat + "_" + *lon + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return {404, R"({"error":"no fixture"})"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return {200, ss.str()};
}

std::vector<net::Request> FixtureGeocoderTransport::requestLog() const {
  std::lock_guard lock(mutex_);
  return log_;
}

AdminArea Enricher::area(std::string_view level, std::string_view countryCode,
                         std::string_view name, const std::optional<std::string>& qid) const {
  std::string id = "osm:";
  id.append(countryCode).append("/").append(level).append("/").append(name);
  AdminArea a{onto_.mintResourceIri("location", id), std::string(level), std::string(name),
              std::nullopt};
  if (qid && isQid(*qid)) a.wikidata = ontology::iri(ontology::ns::wd, *qid);
  return a;
}

std::vector<rdf::Triple> Enricher::enrichStation(const rdf::Iri& station,
                                                 const GeocodeResult& g) const {
  std::vector<rdf::Triple> out;
  if (g.empty()) return out;
  const auto& t = onto_.terms();
  std::vector<AdminArea> chain;  // coarsest first
  for (const auto& [level, name] : g.address) {
    std::optional<std::string> qid;
    if (auto it = g.wikidataIds.find(level); it != g.wikidataIds.end()) qid = it->second;
    AdminArea a = area(level, g.countryCode, name, qid);
    out.push_back({a.iri, ontology::term::type(), t.Location});
    out.push_back({a.iri, t.name, rdf::Literal(a.name)});
    if (a.wikidata) out.push_back({a.iri, ontology::term::sameAs(), *a.wikidata});
    chain.push_back(std::move(a));
  }
  out.push_back({station, t.isLocatedIn, chain.back().iri});
  for (std::size_t i = chain.size() - 1; i > 0; --i)
    out.push_back({chain[i].iri, t.isLocatedIn, chain[i - 1].iri});
  return out;
}

rdf::Iri wikidataGraph(const ontology::Ontology& onto) { return onto.graphIri("wikidata"); }

std::size_t importWikidataSnapshot(rdf::Dataset& data, std::string_view ntriples,
                                   const ontology::Ontology& onto) {
  auto triples = rdf::parseNTriples(ntriples);
  for (const auto& t : triples)
    if (!t.subject.str().starts_with(ontology::ns::wd))
      throw std::invalid_argument("Wikidata snapshot subject is not an entity IRI: <" +
                                  t.subject.str() + ">");
  return data.insertAll(wikidataGraph(onto), triples);
}

}  // namespace linkclimate::geo
