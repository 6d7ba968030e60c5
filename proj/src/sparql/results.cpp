#include <stdexcept>

#include <json.hpp>

#include "linkclimate/sparql/query.hpp"

namespace linkclimate::sparql {

namespace {

using Json = nlohmann::ordered_json;

Json termJson(const rdf::Term& t) {
  if (t.isIri()) return {{"type", "uri"}, {"value", t.iri().str()}};
  const rdf::Literal& l = t.literal();
  Json j = {{"type", "literal"}, {"value", l.lexical()}};
  if (l.lang()) j["xml:lang"] = *l.lang();
  else if (l.datatype().str() != rdf::xsd::kString) j["datatype"] = l.datatype().str();
  return j;
}

rdf::Term termFromJson(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  std::string value = j.at("value").get<std::string>();
  if (type == "uri") return rdf::Iri(std::move(value));
  if (type != "literal" && type != "typed-literal")
    throw std::runtime_error("unsupported binding type \"" + type + "\"");
  if (auto lang = j.find("xml:lang"); lang != j.end())
    return rdf::Literal::langString(std::move(value), lang->get<std::string>());
  if (auto dt = j.find("datatype"); dt != j.end())
    return rdf::Literal(std::move(value), rdf::Iri(dt->get<std::string>()));
  return rdf::Literal(std::move(value));
}

void csvField(std::string& out, std::string_view v) {
  if (v.find_first_of(",\"\r\n") == std::string_view::npos) {
    out += v;
    return;
  }
  out += '"';
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

}  // namespace

std::string toSparqlJson(const ResultTable& table) {
  Json bindings = Json::array();
  for (const auto& row : table.rows) {
    Json b = Json::object();
    for (std::size_t i = 0; i < table.vars.size(); ++i)
      if (row[i]) b[table.vars[i]] = termJson(*row[i]);
    bindings.push_back(std::move(b));
  }
  Json doc = {{"head", {{"vars", table.vars}}}, {"results", {{"bindings", std::move(bindings)}}}};
  return doc.dump();
}

std::string toCsv(const ResultTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.vars.size(); ++i) {
    if (i) out += ',';
    csvField(out, table.vars[i]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (!row[i]) continue;
      csvField(out, row[i]->isIri() ? row[i]->iri().str() : row[i]->literal().lexical());
    }
    out += "\r\n";
  }
  return out;
}

ResultTable fromSparqlJson(std::string_view body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("malformed results JSON: ") + e.what());
  }
  ResultTable table;
  try {
    table.vars = doc.at("head").at("vars").get<std::vector<std::string>>();
    for (const auto& b : doc.at("results").at("bindings")) {
      std::vector<std::optional<rdf::Term>> row(table.vars.size());
      for (std::size_t i = 0; i < table.vars.size(); ++i)
        if (auto it = b.find(table.vars[i]); it != b.end()) row[i] = termFromJson(*it);
      table.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("not a SPARQL results document: ") + e.what());
  }
  return table;
}

}  // namespace linkclimate::sparql
