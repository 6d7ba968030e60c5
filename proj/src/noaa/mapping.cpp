#include "linkclimate/noaa/mapping.hpp"

#include "linkclimate/util/dates.hpp"

namespace linkclimate::noaa {

using rdf::Iri;
using rdf::Literal;
using rdf::Triple;

namespace {

std::string observationKey(const ObservationRec& rec) {
  auto date = util::normalizeDateTime(rec.date);
  if (!date) throw RecordError("unparseable observation date \"" + rec.date + "\"");
  return rec.station + "/" + rec.datatype + "/" + *date;
}

}  // namespace

std::optional<std::string_view> metadataKind(std::string_view endpoint) {
  if (endpoint == "/datasets") return "dataset";
  if (endpoint == "/datacategories") return "datacategory";
  if (endpoint == "/datatypes") return "datatype";
  if (endpoint == "/locationcategories") return "locationcategory";
  if (endpoint == "/locations") return "location";
  return std::nullopt;
}

Iri Mapper::stationIri(std::string_view stationId) const {
  return onto_.mintResourceIri("station", stationId);
}

Iri Mapper::observationIri(const ObservationRec& rec) const {
  return onto_.mintResourceIri("observation", observationKey(rec));
}

Iri Mapper::resultIri(const ObservationRec& rec) const {
  return onto_.mintResourceIri("result", observationKey(rec));
}

std::vector<Triple> Mapper::mapStation(const StationRec& rec) const {
  if (rec.id.empty()) throw RecordError("station without id");
  if (rec.latitude < -90 || rec.latitude > 90 || rec.longitude < -180 || rec.longitude > 180)
    throw RecordError("station " + rec.id + ": coordinates out of range");
  const auto& t = onto_.terms();
  Iri s = stationIri(rec.id);
  std::vector<Triple> out{
      {s, ontology::term::type(), t.Station},
      {s, t.name, Literal(rec.name)},
      {s, t.lat, rdf::doubleLiteral(rec.latitude)},
      {s, t.lon, rdf::doubleLiteral(rec.longitude)},
  };
  if (rec.elevation) {
    out.push_back({s, t.elev, rdf::doubleLiteral(*rec.elevation)});
    if (rec.elevationUnit) out.push_back({s, t.elevUnit, Literal(*rec.elevationUnit)});
  }
  return out;
}

std::vector<Triple> Mapper::mapObservation(const ObservationRec& rec) const {
  const auto& t = onto_.terms();
  const std::string key = observationKey(rec);
  const std::string date = key.substr(key.size() - 19);
  Iri obs = onto_.mintResourceIri("observation", key);
  Iri res = onto_.mintResourceIri("result", key);
  return {
      {obs, ontology::term::type(), t.Observation},
      {obs, t.resultTime, rdf::typedLiteral(date, rdf::xsd::kDateTime)},
      {obs, t.sourceStation, stationIri(rec.station)},
      {obs, t.hasResult, res},
      {res, ontology::term::type(), t.Result},
      {res, t.withDataType, onto_.mintResourceIri("datatype", rec.datatype)},
      {res, t.numericValue, rdf::doubleLiteral(rec.value)},
  };
}

std::vector<Triple> Mapper::mapMetadata(const MetadataRec& rec, std::string_view endpoint,
                                        const RequestContext& ctx) const {
  auto kind = metadataKind(endpoint);
  if (!kind) throw ontology::UnknownMapping("not a metadata endpoint: " + std::string(endpoint));
  if (rec.id.empty()) throw RecordError("metadata record without id");
  const auto& t = onto_.terms();
  Iri m = onto_.mintResourceIri(*kind, rec.id);
  std::vector<Triple> out{
      {m, ontology::term::type(), onto_.classForEndpoint(endpoint)},
      {m, t.name, Literal(rec.name)},
  };
  auto date = [&](const std::optional<std::string>& v, const Iri& p) {
    if (v && util::Date::parse(*v)) out.push_back({m, p, rdf::typedLiteral(*v, rdf::xsd::kDate)});
  };
  date(rec.mindate, t.minDate);
  date(rec.maxdate, t.maxDate);
  if (rec.datacoverage) out.push_back({m, t.dataCoverage, rdf::doubleLiteral(*rec.datacoverage)});
  if (*kind == "datatype" && ctx.datacategoryid)
    out.push_back({m, t.inDataCategory, onto_.mintResourceIri("datacategory", *ctx.datacategoryid)});
  if (*kind == "location" && ctx.locationid && *ctx.locationid != rec.id)
    out.push_back({m, t.isLocatedIn, onto_.mintResourceIri("location", *ctx.locationid)});
  return out;
}

Triple Mapper::stationLocation(std::string_view stationId, std::string_view locationId) const {
  return {stationIri(stationId), onto_.terms().isLocatedIn,
          onto_.mintResourceIri("location", locationId)};
}

}  // namespace linkclimate::noaa
