#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkclimate/noaa/cdo.hpp"
#include "linkclimate/ontology/ontology.hpp"
#include "linkclimate/rdf/term.hpp"

namespace linkclimate::noaa {

// Request parameters that carry meaning for the records they returned.
struct RequestContext {
  std::optional<std::string> locationid;      // parent location -> ca:isLocatedIn
  std::optional<std::string> datacategoryid;  // -> ca:inDataCategory on DataTypes
};

// Pure record -> triple mappings. Identical input gives identical output.
class Mapper {
 public:
  explicit Mapper(const ontology::Ontology& onto) : onto_(onto) {}

  rdf::Iri stationIri(std::string_view stationId) const;
  // Observation and result nodes share the composite id station/datatype/date.
  rdf::Iri observationIri(const ObservationRec& rec) const;
  rdf::Iri resultIri(const ObservationRec& rec) const;

  // type, name, lat, long, and elev + elevUnit when an elevation is present.
  // Throws RecordError on out-of-range coordinates.
  std::vector<rdf::Triple> mapStation(const StationRec& rec) const;

  // Seven triples: the sosa:Observation node and its skolemized ca:Result.
  // Throws RecordError on an unparseable date.
  std::vector<rdf::Triple> mapObservation(const ObservationRec& rec) const;

  // Dataset / DataCategory / DataType / LocationCategory / Location records.
  std::vector<rdf::Triple> mapMetadata(const MetadataRec& rec, std::string_view endpoint,
                                       const RequestContext& ctx = {}) const;

  // (station ca:isLocatedIn location) for the locationid a station was
  // requested under.
  rdf::Triple stationLocation(std::string_view stationId, std::string_view locationId) const;

 private:
  const ontology::Ontology& onto_;
};

// "/datatypes" -> "datatype", etc.; nullopt for /stations, /data, unknown.
std::optional<std::string_view> metadataKind(std::string_view endpoint);

}  // namespace linkclimate::noaa
