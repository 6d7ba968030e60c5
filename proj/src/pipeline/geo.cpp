#include "linkclimate/pipeline/geo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "linkclimate/sparql/query.hpp"

namespace linkclimate::pipeline {

GeoPoint GeoPoint::make(double lat, double lon) {
  if (!(lat >= -90 && lat <= 90) || !(lon >= -180 && lon <= 180))
    throw std::invalid_argument("coordinate out of range");
  return {lat, lon};
}

double haversineKm(GeoPoint a, GeoPoint b) {
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * rad;
  const double dlon = (b.lon - a.lon) * rad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * rad) * std::cos(b.lat * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2 * kEarthRadiusKm * std::asin(std::sqrt(std::min(1.0, h)));
}

std::vector<StationPoint> stationCoordinates(const rdf::Dataset& data,
                                             const ontology::Ontology& onto) {
  const auto& t = onto.terms();
  const std::string q = "SELECT ?s ?lat ?lon WHERE { ?s a <" + t.Station.str() + "> ; <" +
                        t.lat.str() + "> ?lat ; <" + t.lon.str() + "> ?lon . }";
  auto table = sparql::execute(q, data);
  std::map<rdf::Iri, GeoPoint> best;
  for (const auto& row : table.rows) {
    if (!row[0] || !row[1] || !row[2] || !row[0]->isIri()) continue;
    if (!row[1]->isLiteral() || !row[2]->isLiteral()) continue;
    auto lat = row[1]->literal().numericValue(), lon = row[2]->literal().numericValue();
    if (!lat || !lon || !(*lat >= -90 && *lat <= 90) || !(*lon >= -180 && *lon <= 180)) continue;
    GeoPoint p{*lat, *lon};
    auto [it, fresh] = best.emplace(row[0]->iri(), p);
    if (!fresh && std::pair(p.lat, p.lon) < std::pair(it->second.lat, it->second.lon)) it->second = p;
  }
  std::vector<StationPoint> out;
  out.reserve(best.size());
  for (auto& [iri, p] : best) out.push_back({iri, p});
  return out;
}

std::vector<std::pair<rdf::Iri, double>> nearestStations(GeoPoint p, std::size_t k,
                                                         const std::vector<StationPoint>& stations) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  std::vector<std::pair<rdf::Iri, double>> all;
  all.reserve(stations.size());
  for (const auto& s : stations) all.emplace_back(s.station, haversineKm(p, s.point));
  auto closer = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  };
  const std::size_t n = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), closer);
  all.erase(all.begin() + static_cast<std::ptrdiff_t>(n), all.end());
  return all;
}

std::vector<std::pair<rdf::Iri, double>> nearestStations(GeoPoint p, std::size_t k,
                                                         const rdf::Dataset& data,
                                                         const ontology::Ontology& onto) {
  return nearestStations(p, k, stationCoordinates(data, onto));
}

std::vector<rdf::Iri> stationsInBbox(double south, double north, double west, double east,
                                     const std::vector<StationPoint>& stations) {
  if (south > north) throw std::invalid_argument("south latitude exceeds north latitude");
  std::vector<rdf::Iri> out;
  for (const auto& s : stations) {
    if (s.point.lat < south || s.point.lat > north) continue;
    bool inLon = west <= east ? (s.point.lon >= west && s.point.lon <= east)
                              : (s.point.lon >= west || s.point.lon <= east);
    if (inLon) out.push_back(s.station);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<rdf::Iri> stationsInBbox(double south, double north, double west, double east,
                                     const rdf::Dataset& data, const ontology::Ontology& onto) {
  return stationsInBbox(south, north, west, east, stationCoordinates(data, onto));
}

}  // namespace linkclimate::pipeline
