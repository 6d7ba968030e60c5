#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "linkclimate/rdf/syntax.hpp"
#include "linkclimate/rdf/term.hpp"

namespace linkclimate::ontology {

inline constexpr std::string_view kDefaultBase = "http://jresearch.ucd.ie/climate-kg/";

// External namespaces reused by the CA vocabulary.
namespace ns {
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view owl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view sosa = "http://www.w3.org/ns/sosa/";
inline constexpr std::string_view qudt = "http://qudt.org/schema/qudt/";
inline constexpr std::string_view wgs84 = "http://www.w3.org/2003/01/geo/wgs84_pos#";
inline constexpr std::string_view aemet = "http://aemet.linkeddata.es/ontology/";
inline constexpr std::string_view wd = "http://www.wikidata.org/entity/";
inline constexpr std::string_view wdt = "http://www.wikidata.org/prop/direct/";
}  // namespace ns

rdf::Iri iri(std::string_view ns, std::string_view local);

// Fixed external terms.
namespace term {
rdf::Iri type();
rdf::Iri label();
rdf::Iri subClassOf();
rdf::Iri sameAs();
rdf::Iri equivalentProperty();
rdf::Iri owlClass();
rdf::Iri rdfProperty();
}  // namespace term

class UnknownMapping : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

enum class ObjectKind { LiteralString, LiteralDouble, LiteralDate, LiteralDateTime, ResourceRef };

struct ClassMapping {
  std::string endpoint;
  rdf::Iri classIri;
};

struct PropertyMapping {
  std::string field;  // JSON key, or request parameter name for *id params
  rdf::Iri property;
  ObjectKind kind;
};

enum class Relation { SubClassOf, SameAs, EquivalentProperty };

struct AlignmentAxiom {
  rdf::Iri subject;
  Relation relation;
  rdf::Iri object;
};

// CA terms resolved against a base IRI.
struct CaTerms {
  rdf::Iri Dataset, DataCategory, DataType, LocationCategory, Location, Station, Result;
  rdf::Iri Observation;  // sosa:Observation
  rdf::Iri name, isLocatedIn, elev, elevUnit, inDataCategory, sourceStation, withDataType;
  rdf::Iri minDate, maxDate, dataCoverage;
  rdf::Iri lat, lon;            // wgs84
  rdf::Iri resultTime, hasResult;  // sosa
  rdf::Iri numericValue;        // qudt
};

// The Climate Analysis vocabulary: endpoint and field mappings, T-Box,
// alignment axioms and resource IRI minting. Immutable once built.
class Ontology {
 public:
  explicit Ontology(std::string base = std::string(kDefaultBase));

  const std::string& base() const noexcept { return base_; }
  // base + "ontology#"
  const std::string& caNamespace() const noexcept { return caNs_; }
  const CaTerms& terms() const noexcept { return terms_; }

  const rdf::Iri& classForEndpoint(std::string_view endpoint) const;
  const PropertyMapping& propertyForField(std::string_view field) const;
  std::span<const ClassMapping> classMappings() const noexcept { return classes_; }
  std::span<const PropertyMapping> propertyMappings() const noexcept { return properties_; }
  const std::vector<AlignmentAxiom>& alignmentAxioms() const noexcept { return alignment_; }

  // Every class typed owl:Class and every property typed rdf:Property, all
  // labelled, followed by the alignment axioms.
  std::vector<rdf::Triple> ontologyTriples() const;

  // base + "resource/" + kind + "/" + encoded id. Colons stay literal.
  rdf::Iri mintResourceIri(std::string_view kind, std::string_view id) const;
  // base + "graph/" + name
  rdf::Iri graphIri(std::string_view name) const;

  // Prefixes for Turtle output (ca, sosa, qudt, wgs84, ...).
  rdf::PrefixMap prefixes() const;

 private:
  std::string base_;
  std::string caNs_;
  CaTerms terms_;
  std::vector<ClassMapping> classes_;
  std::vector<PropertyMapping> properties_;
  std::vector<AlignmentAxiom> alignment_;
};

// Percent-encodes everything except RFC 3986 unreserved characters and ':'.
std::string encodeIdSegment(std::string_view id);

}  // namespace linkclimate::ontology
