#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "linkclimate/ontology/ontology.hpp"

namespace rdf = linkclimate::rdf;
namespace onto = linkclimate::ontology;

namespace {

const std::string kCa = "http://jresearch.ucd.ie/climate-kg/ontology#";
const std::string kSosa = "http://www.w3.org/ns/sosa/";

bool contains(const std::vector<rdf::Triple>& ts, const std::string& s, const std::string& p, const std::string& o) {
  rdf::Triple want{rdf::Iri(s), rdf::Iri(p), rdf::Iri(o)};
  return std::find(ts.begin(), ts.end(), want) != ts.end();
}

}  // namespace

TEST(Ontology, EndpointClasses) {
  onto::Ontology o;
  EXPECT_EQ(o.classForEndpoint("/stations").str(), kCa + "Station");
  EXPECT_EQ(o.classForEndpoint("/data").str(), kSosa + "Observation");
  EXPECT_THROW(o.classForEndpoint("/bogus"), onto::UnknownMapping);
  try {
    o.classForEndpoint("/bogus");
  } catch (const onto::UnknownMapping& e) {
    EXPECT_NE(std::string(e.what()).find("/bogus"), std::string::npos);
  }
  std::set<std::string> endpoints, classes;
  for (const auto& m : o.classMappings()) {
    endpoints.insert(m.endpoint);
    classes.insert(m.classIri.str());
  }
  EXPECT_EQ(endpoints.size(), 7u);
  EXPECT_EQ(classes.size(), 7u);
}

TEST(Ontology, FieldProperties) {
  onto::Ontology o;
  const auto& date = o.propertyForField("date");
  EXPECT_EQ(date.property.str(), kSosa + "resultTime");
  EXPECT_EQ(date.kind, onto::ObjectKind::LiteralDateTime);
  const auto& value = o.propertyForField("value");
  EXPECT_EQ(value.property.str(), "http://qudt.org/schema/qudt/numericValue");
  EXPECT_EQ(value.kind, onto::ObjectKind::LiteralDouble);
  const auto& unit = o.propertyForField("elevationUnit");
  EXPECT_EQ(unit.property.str(), kCa + "elevUnit");
  EXPECT_EQ(unit.kind, onto::ObjectKind::LiteralString);
  EXPECT_THROW(o.propertyForField("nope"), onto::UnknownMapping);
  std::set<std::string> fields;
  for (const auto& m : o.propertyMappings()) EXPECT_TRUE(fields.insert(m.field).second) << m.field;
}

TEST(Ontology, TBoxAndAlignment) {
  onto::Ontology o;
  auto ts = o.ontologyTriples();
  const std::string type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
  const std::string owl = "http://www.w3.org/2002/07/owl#";
  EXPECT_TRUE(contains(ts, kCa + "Station", owl + "sameAs", "http://aemet.linkeddata.es/ontology/WeatherStation"));
  EXPECT_TRUE(contains(ts, kCa + "Location", owl + "sameAs", "http://aemet.linkeddata.es/ontology/AdministrativeArea"));
  EXPECT_TRUE(contains(ts, kCa + "Result", "http://www.w3.org/2000/01/rdf-schema#subClassOf", kSosa + "Result"));
  for (const auto& m : o.classMappings())
    EXPECT_TRUE(contains(ts, m.classIri.str(), type, owl + "Class")) << m.classIri.str();
  // every property is typed and labelled
  const rdf::Iri label("http://www.w3.org/2000/01/rdf-schema#label");
  for (const auto& m : o.propertyMappings()) {
    EXPECT_TRUE(contains(ts, m.property.str(), type, "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property"));
    bool labelled = std::any_of(ts.begin(), ts.end(), [&](const rdf::Triple& t) {
      return t.subject == m.property && t.predicate == label && t.object.isLiteral();
    });
    EXPECT_TRUE(labelled) << m.property.str();
  }
  for (const auto& a : o.alignmentAxioms()) {
    EXPECT_EQ(a.subject.str().rfind(kCa, 0), 0u);
    EXPECT_NE(a.object.str().rfind(kCa, 0), 0u);
  }
  EXPECT_EQ(rdf::serializeNTriples(ts), rdf::serializeNTriples(o.ontologyTriples()));
}

TEST(Ontology, CaTermsAreDistinct) {
  onto::Ontology o;
  const auto& t = o.terms();
  std::vector<rdf::Iri> all = {t.Dataset, t.DataCategory, t.DataType, t.LocationCategory, t.Location, t.Station,
                               t.Result, t.Observation, t.name, t.isLocatedIn, t.elev, t.elevUnit,
                               t.inDataCategory, t.sourceStation, t.withDataType, t.minDate, t.maxDate,
                               t.dataCoverage, t.lat, t.lon, t.resultTime, t.hasResult, t.numericValue};
  std::set<rdf::Iri> unique(all.begin(), all.end());
  EXPECT_EQ(unique.size(), all.size());
  EXPECT_EQ(t.lat.str(), "http://www.w3.org/2003/01/geo/wgs84_pos#lat");
}

TEST(Ontology, MintResourceIri) {
  onto::Ontology o;
  EXPECT_EQ(o.mintResourceIri("station", "GHCND:EI000003969").str(),
            "http://jresearch.ucd.ie/climate-kg/resource/station/GHCND:EI000003969");
  EXPECT_EQ(o.mintResourceIri("location", "FIPS:UK").str(),
            "http://jresearch.ucd.ie/climate-kg/resource/location/FIPS:UK");
  EXPECT_EQ(o.mintResourceIri("location", "a/b c"), o.mintResourceIri("location", "a/b c"));
  EXPECT_EQ(o.mintResourceIri("location", "a/b c").str(),
            "http://jresearch.ucd.ie/climate-kg/resource/location/a%2Fb%20c");
  EXPECT_ANY_THROW(o.mintResourceIri("station", ""));
  EXPECT_ANY_THROW(o.mintResourceIri("planet", "x"));
  onto::Ontology other("https://example.org/kg/");
  EXPECT_EQ(other.caNamespace(), "https://example.org/kg/ontology#");
  EXPECT_EQ(other.graphIri("supplementary").str(), "https://example.org/kg/graph/supplementary");
}

TEST(Ontology, EncodeIdSegment) {
  EXPECT_EQ(onto::encodeIdSegment("GHCND:EI000003969"), "GHCND:EI000003969");
  EXPECT_EQ(onto::encodeIdSegment("A-b_c.d~e"), "A-b_c.d~e");
  EXPECT_EQ(onto::encodeIdSegment("\xc3\xa9#?%"), "%C3%A9%23%3F%25");
}
