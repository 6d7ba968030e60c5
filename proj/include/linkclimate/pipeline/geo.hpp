#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "linkclimate/ontology/ontology.hpp"
#include "linkclimate/rdf/dataset.hpp"

namespace linkclimate::pipeline {

inline constexpr double kEarthRadiusKm = 6371.0;

struct GeoPoint {
  double lat = 0;
  double lon = 0;

  // Throws std::invalid_argument outside [-90, 90] x [-180, 180].
  static GeoPoint make(double lat, double lon);
};

// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversineKm(GeoPoint a, GeoPoint b);

struct StationPoint {
  rdf::Iri station;
  GeoPoint point;
};

// Every ca:Station with numeric wgs84 coordinates, read through the query
// engine, in IRI order. A station with several coordinate pairs keeps the
// smallest.
std::vector<StationPoint> stationCoordinates(const rdf::Dataset& data,
                                             const ontology::Ontology& onto);

// The k stations closest to p, nearest first; equal distances are ordered
// by IRI. Throws std::invalid_argument when k < 1.
std::vector<std::pair<rdf::Iri, double>> nearestStations(GeoPoint p, std::size_t k,
                                                         const std::vector<StationPoint>& stations);
std::vector<std::pair<rdf::Iri, double>> nearestStations(GeoPoint p, std::size_t k,
                                                         const rdf::Dataset& data,
                                                         const ontology::Ontology& onto);

// Stations with south <= lat <= north and lon in [west, east]; west > east
// wraps across the antimeridian. Result is in IRI order.
// Throws std::invalid_argument when south > north.
std::vector<rdf::Iri> stationsInBbox(double south, double north, double west, double east,
                                     const std::vector<StationPoint>& stations);
std::vector<rdf::Iri> stationsInBbox(double south, double north, double west, double east,
                                     const rdf::Dataset& data, const ontology::Ontology& onto);

}  // namespace linkclimate::pipeline
