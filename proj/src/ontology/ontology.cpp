#include "linkclimate/ontology/ontology.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace linkclimate::ontology {

rdf::Iri iri(std::string_view ns, std::string_view local) {
  std::string v;
  v.reserve(ns.size() + local.size());
  v.append(ns).append(local);
  return rdf::Iri(std::move(v));
}

namespace term {
rdf::Iri type() { return iri(ns::rdf, "type"); }
rdf::Iri label() { return iri(ns::rdfs, "label"); }
rdf::Iri subClassOf() { return iri(ns::rdfs, "subClassOf"); }
rdf::Iri sameAs() { return iri(ns::owl, "sameAs"); }
rdf::Iri equivalentProperty() { return iri(ns::owl, "equivalentProperty"); }
rdf::Iri owlClass() { return iri(ns::owl, "Class"); }
rdf::Iri rdfProperty() { return iri(ns::rdf, "Property"); }
}  // namespace term

namespace {

constexpr std::array<std::string_view, 8> kResourceKinds = {
    "dataset", "datacategory", "datatype", "locationcategory",
    "location", "station", "observation", "result"};

std::string normalizeBase(std::string base) {
  if (base.empty()) throw rdf::InvalidTerm("empty base IRI");
  if (base.back() != '/' && base.back() != '#') base += '/';
  if (!rdf::Iri::isValid(base)) throw rdf::InvalidTerm("invalid base IRI: " + base);
  return base;
}

std::string localName(const rdf::Iri& iri) {
  const std::string& v = iri.str();
  auto cut = v.find_last_of("#/");
  return cut == std::string::npos ? v : v.substr(cut + 1);
}

}  // namespace

Ontology::Ontology(std::string base)
    : base_(normalizeBase(std::move(base))),
      caNs_(base_ + "ontology#"),
      terms_{
          .Dataset = iri(caNs_, "Dataset"),
          .DataCategory = iri(caNs_, "DataCategory"),
          .DataType = iri(caNs_, "DataType"),
          .LocationCategory = iri(caNs_, "LocationCategory"),
          .Location = iri(caNs_, "Location"),
          .Station = iri(caNs_, "Station"),
          .Result = iri(caNs_, "Result"),
          .Observation = iri(ns::sosa, "Observation"),
          .name = iri(caNs_, "name"),
          .isLocatedIn = iri(caNs_, "isLocatedIn"),
          .elev = iri(caNs_, "elev"),
          .elevUnit = iri(caNs_, "elevUnit"),
          .inDataCategory = iri(caNs_, "inDataCategory"),
          .sourceStation = iri(caNs_, "sourceStation"),
          .withDataType = iri(caNs_, "withDataType"),
          .minDate = iri(caNs_, "minDate"),
          .maxDate = iri(caNs_, "maxDate"),
          .dataCoverage = iri(caNs_, "dataCoverage"),
          .lat = iri(ns::wgs84, "lat"),
          .lon = iri(ns::wgs84, "long"),
          .resultTime = iri(ns::sosa, "resultTime"),
          .hasResult = iri(ns::sosa, "hasResult"),
          .numericValue = iri(ns::qudt, "numericValue"),
      } {
  const CaTerms& t = terms_;
  classes_ = {
      {"/datasets", t.Dataset},
      {"/datacategories", t.DataCategory},
      {"/datatypes", t.DataType},
      {"/locationcategories", t.LocationCategory},
      {"/locations", t.Location},
      {"/stations", t.Station},
      {"/data", t.Observation},
  };
  using K = ObjectKind;
  properties_ = {
      {"name", t.name, K::LiteralString},
      {"locationid", t.isLocatedIn, K::ResourceRef},
      {"elevation", t.elev, K::LiteralDouble},
      {"latitude", t.lat, K::LiteralDouble},
      {"longitude", t.lon, K::LiteralDouble},
      {"elevationUnit", t.elevUnit, K::LiteralString},
      {"datacategoryid", t.inDataCategory, K::ResourceRef},
      {"station", t.sourceStation, K::ResourceRef},
      {"date", t.resultTime, K::LiteralDateTime},
      {"datatype", t.withDataType, K::ResourceRef},
      {"value", t.numericValue, K::LiteralDouble},
      {"mindate", t.minDate, K::LiteralDate},
      {"maxdate", t.maxDate, K::LiteralDate},
      {"datacoverage", t.dataCoverage, K::LiteralDouble},
  };
  alignment_ = {
      {t.Result, Relation::SubClassOf, iri(ns::sosa, "Result")},
      {t.Location, Relation::SameAs, iri(ns::aemet, "AdministrativeArea")},
      {t.Station, Relation::SameAs, iri(ns::aemet, "WeatherStation")},
      {t.elev, Relation::EquivalentProperty, iri(ns::wgs84, "alt")},
  };
}

const rdf::Iri& Ontology::classForEndpoint(std::string_view endpoint) const {
  for (const auto& m : classes_)
    if (m.endpoint == endpoint) return m.classIri;
  throw UnknownMapping("no CA class for endpoint '" + std::string(endpoint) + "'");
}

const PropertyMapping& Ontology::propertyForField(std::string_view field) const {
  for (const auto& m : properties_)
    if (m.field == field) return m;
  throw UnknownMapping("no CA property for field '" + std::string(field) + "'");
}

std::vector<rdf::Triple> Ontology::ontologyTriples() const {
  std::vector<rdf::Triple> out;
  const auto type = term::type();
  const auto label = term::label();
  auto declare = [&](const rdf::Iri& subject, const rdf::Iri& kind) {
    out.push_back({subject, type, kind});
    out.push_back({subject, label, rdf::Literal(localName(subject))});
  };

  for (const auto& m : classes_) declare(m.classIri, term::owlClass());
  declare(terms_.Result, term::owlClass());

  std::vector<rdf::Iri> props;
  for (const auto& m : properties_) props.push_back(m.property);
  props.push_back(terms_.hasResult);
  props.push_back(type);
  props.push_back(term::sameAs());
  std::sort(props.begin(), props.end());
  props.erase(std::unique(props.begin(), props.end()), props.end());
  for (const auto& p : props) declare(p, term::rdfProperty());

  for (const auto& a : alignment_) {
    rdf::Iri rel = a.relation == Relation::SubClassOf ? term::subClassOf()
                   : a.relation == Relation::SameAs   ? term::sameAs()
                                                      : term::equivalentProperty();
    out.push_back({a.subject, rel, a.object});
  }
  return out;
}

std::string encodeIdSegment(std::string_view id) {
  std::string out;
  out.reserve(id.size());
  for (unsigned char c : id) {
    bool keep = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                c == '-' || c == '.' || c == '_' || c == '~' || c == ':';
    if (keep) {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

rdf::Iri Ontology::mintResourceIri(std::string_view kind, std::string_view id) const {
  if (std::find(kResourceKinds.begin(), kResourceKinds.end(), kind) == kResourceKinds.end())
    throw UnknownMapping("unknown resource kind '" + std::string(kind) + "'");
  if (id.empty()) throw std::invalid_argument("empty id for resource kind '" + std::string(kind) + "'");
  std::string v = base_;
  v.append("resource/").append(kind).append("/").append(encodeIdSegment(id));
  return rdf::Iri(std::move(v));
}

rdf::Iri Ontology::graphIri(std::string_view name) const {
  return rdf::Iri(base_ + "graph/" + encodeIdSegment(name));
}

rdf::PrefixMap Ontology::prefixes() const {
  return {
      {"ca", caNs_},
      {"owl", std::string(ns::owl)},
      {"qudt", std::string(ns::qudt)},
      {"rdf", std::string(ns::rdf)},
      {"rdfs", std::string(ns::rdfs)},
      {"sosa", std::string(ns::sosa)},
      {"wgs84", std::string(ns::wgs84)},
      {"xsd", std::string(ns::xsd)},
      {"aemet", std::string(ns::aemet)},
      {"wd", std::string(ns::wd)},
      {"wdt", std::string(ns::wdt)},
  };
}

}  // namespace linkclimate::ontology
