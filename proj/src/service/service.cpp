#include "linkclimate/service/service.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "linkclimate/net/transport.hpp"
#include "linkclimate/rdf/syntax.hpp"
#include "linkclimate/sparql/query.hpp"

namespace linkclimate::service {

using rdf::Iri;
using rdf::Term;
using rdf::Triple;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Media type without parameters, lower-cased.
std::string mediaType(std::string_view contentType) {
  return lower(trim(contentType.substr(0, contentType.find(';'))));
}

HttpResponse text(int status, std::string body) {
  return {status, "text/plain; charset=utf-8", std::move(body) + "\n"};
}

constexpr std::string_view kSparqlJson = "application/sparql-results+json";
constexpr std::string_view kNTriples = "application/n-triples";
constexpr std::string_view kTurtle = "text/turtle";

std::vector<Triple> parsePayload(const std::string& type, const std::string& body) {
  if (type == kTurtle) return rdf::parseTurtle(body);
  return rdf::parseNTriples(body);
}

bool isRdfPayload(const std::string& type) {
  return type == kNTriples || type == "text/plain" || type == kTurtle;
}

std::string htmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

bool tripleLess(const Triple& a, const Triple& b) {
  if (a.subject != b.subject) return a.subject.str() < b.subject.str();
  if (a.predicate != b.predicate) return a.predicate.str() < b.predicate.str();
  return rdf::toNTriples(a.object) < rdf::toNTriples(b.object);
}

// All triples matching a pattern across the default and named graphs.
std::vector<Triple> matchAll(const rdf::Dataset& data, const std::optional<Iri>& s,
                             const std::optional<Term>& o) {
  std::vector<Triple> out = data.match(std::nullopt, s, std::nullopt, o);
  for (const auto& g : data.graphNames()) {
    auto more = data.match(g, s, std::nullopt, o);
    out.insert(out.end(), more.begin(), more.end());
  }
  std::sort(out.begin(), out.end(), tripleLess);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

nlohmann::ordered_json termJson(const Term& t) {
  if (t.isIri()) return {{"type", "uri"}, {"value", t.iri().str()}};
  const auto& l = t.literal();
  nlohmann::ordered_json j = {{"type", "literal"}, {"value", l.lexical()}};
  if (l.lang()) j["xml:lang"] = *l.lang();
  else if (l.datatype().str() != rdf::xsd::kString) j["datatype"] = l.datatype().str();
  return j;
}

}  // namespace

std::optional<std::string> HttpRequest::param(std::string_view name) const {
  for (const auto& [k, v] : params)
    if (k == name) return v;
  return std::nullopt;
}

bool HttpRequest::hasParam(std::string_view name) const { return param(name).has_value(); }

std::optional<std::string> HttpRequest::header(std::string_view name) const {
  const std::string want = lower(name);
  for (const auto& [k, v] : headers)
    if (lower(k) == want) return v;
  return std::nullopt;
}

std::optional<std::size_t> negotiate(std::string_view accept,
                                     const std::vector<std::string_view>& offered) {
  if (offered.empty()) return std::nullopt;
  if (trim(accept).empty()) return 0;
  struct Range {
    std::string type;
    double q;
  };
  std::vector<Range> ranges;
  std::size_t start = 0;
  while (start <= accept.size()) {
    std::size_t end = accept.find(',', start);
    if (end == std::string_view::npos) end = accept.size();
    std::string_view item = accept.substr(start, end - start);
    start = end + 1;
    Range r{mediaType(item), 1.0};
    if (r.type.empty()) continue;
    for (std::size_t p = item.find(';'); p != std::string_view::npos;) {
      std::size_t next = item.find(';', p + 1);
      std::string_view kv = trim(item.substr(p + 1, next == std::string_view::npos ? next : next - p - 1));
      if (kv.size() > 2 && (kv[0] == 'q' || kv[0] == 'Q') && kv[1] == '=') {
        double q = 1.0;
        auto [ptr, ec] = std::from_chars(kv.data() + 2, kv.data() + kv.size(), q);
        if (ec == std::errc()) r.q = std::clamp(q, 0.0, 1.0);
      }
      p = next;
    }
    ranges.push_back(std::move(r));
  }

  std::optional<std::size_t> best;
  double bestQ = 0;
  for (std::size_t i = 0; i < offered.size(); ++i) {
    const std::string type = lower(offered[i]);
    const std::string major = type.substr(0, type.find('/'));
    int specificity = -1;
    double q = 0;
    for (const auto& r : ranges) {
      int s = r.type == type ? 3 : r.type == major + "/*" ? 2 : r.type == "*/*" ? 1 : -1;
      if (s > specificity) specificity = s, q = r.q;
    }
    if (specificity >= 0 && q > bestQ) best = i, bestQ = q;
  }
  return best;
}

std::vector<std::pair<std::string, std::string>> parseForm(std::string_view body) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t start = 0;
  while (start < body.size()) {
    std::size_t end = body.find('&', start);
    if (end == std::string_view::npos) end = body.size();
    std::string_view kv = body.substr(start, end - start);
    start = end + 1;
    if (kv.empty()) continue;
    std::size_t eq = kv.find('=');
    auto decode = [](std::string_view s) {
      std::string plus(s);
      std::replace(plus.begin(), plus.end(), '+', ' ');
      return net::percentDecode(plus);
    };
    out.emplace_back(decode(kv.substr(0, eq)),
                     eq == std::string_view::npos ? std::string() : decode(kv.substr(eq + 1)));
  }
  return out;
}

Service::Service(rdf::Store& store, const ontology::Ontology& onto, ServiceConfig config,
                 MutationHook onMutation)
    : store_(store), onto_(onto), config_(std::move(config)), onMutation_(std::move(onMutation)) {}

HttpResponse Service::handle(const HttpRequest& req) {
  try {
    if (req.path == "/sparql") return sparql(req);
    if (req.path == "/data") return graphStore(req);
    if (req.path.starts_with("/resource/")) return dereference(req);
    if (req.path == "/healthz") return health(req);
    return text(404, "not found");
  } catch (const std::exception& e) {
    spdlog::error("{} {} failed: {}", req.method, req.path, e.what());
    return text(500, "internal error");
  }
}

HttpResponse Service::sparql(const HttpRequest& req) {
  std::optional<std::string> query;
  if (req.method == "GET") {
    query = req.param("query");
  } else if (req.method == "POST") {
    const std::string type = mediaType(req.header("Content-Type").value_or(""));
    if (type == "application/x-www-form-urlencoded") {
      for (const auto& [k, v] : parseForm(req.body))
        if (k == "query") query = v;
    } else if (type == "application/sparql-query") {
      query = req.body;
    } else {
      return text(415, "unsupported content type for a SPARQL query");
    }
  } else {
    return text(405, "method not allowed");
  }
  if (!query) return text(400, "missing 'query' parameter");

  static const std::vector<std::string_view> kOffers = {kSparqlJson, "application/json",
                                                        "text/csv"};
  auto pick = negotiate(req.header("Accept").value_or(""), kOffers);
  if (!pick) return text(406, "acceptable formats: application/sparql-results+json, text/csv");

  sparql::Query parsed;
  try {
    parsed = sparql::parseQuery(*query);
  } catch (const sparql::QuerySyntaxError& e) {
    return text(400, std::string("syntax error: ") + e.what());
  }
  auto table = store_.read([&](const rdf::Dataset& d) { return sparql::evaluate(parsed, d); });
  if (*pick == 2) return {200, "text/csv; charset=utf-8", sparql::toCsv(table)};
  return {200, std::string(kOffers[*pick]), sparql::toSparqlJson(table)};
}

HttpResponse Service::graphStore(const HttpRequest& req) {
  const bool isDefault = req.hasParam("default");
  const auto graphParam = req.param("graph");
  if (isDefault == graphParam.has_value())
    return text(400, "exactly one of ?default or ?graph=<iri> is required");
  rdf::Dataset::GraphName graph;
  if (graphParam) {
    auto iri = Iri::tryMake(*graphParam);
    if (!iri) return text(400, "graph parameter is not an absolute IRI");
    graph = *iri;
  }

  if (req.method == "GET") {
    auto body = store_.read([&](const rdf::Dataset& d) -> std::optional<std::string> {
      if (!d.hasGraph(graph)) return std::nullopt;
      auto triples = d.triples(graph);
      return rdf::serializeNTriples(triples);
    });
    if (!body) return text(404, "no such graph");
    return {200, std::string(kNTriples), std::move(*body)};
  }

  if (req.method == "PUT" || req.method == "POST") {
    const std::string type = mediaType(req.header("Content-Type").value_or(std::string(kNTriples)));
    if (!isRdfPayload(type)) return text(415, "expected application/n-triples or text/turtle");
    std::vector<Triple> triples;
    try {
      triples = parsePayload(type, req.body);
    } catch (const rdf::SyntaxError& e) {
      return text(400, std::string("parse error: ") + e.what());
    } catch (const rdf::InvalidTerm& e) {
      return text(400, std::string("invalid term: ") + e.what());
    }
    int status = 204;
    store_.write([&](rdf::Dataset& d) {
      if (req.method == "PUT") {
        if (graph && !d.hasGraph(graph)) status = 201;
        d.replaceGraph(graph, triples);
      } else {
        d.insertAll(graph, triples);
      }
    });
    if (onMutation_) onMutation_();
    return {status, "text/plain; charset=utf-8", ""};
  }

  if (req.method == "DELETE") {
    bool dropped = store_.write([&](rdf::Dataset& d) { return d.dropGraph(graph); });
    if (!dropped) return text(404, "no such graph");
    if (onMutation_) onMutation_();
    return {204, "text/plain; charset=utf-8", ""};
  }
  return text(405, "method not allowed");
}

HttpResponse Service::health(const HttpRequest&) {
  auto [triples, graphs] = store_.read([](const rdf::Dataset& d) {
    return std::pair{d.totalSize(), d.graphNames().size()};
  });
  nlohmann::ordered_json j = {{"status", "ok"}, {"triples", triples}, {"namedGraphs", graphs}};
  return {200, "application/json", j.dump()};
}

HttpResponse Service::dereference(const HttpRequest& req) {
  if (req.method != "GET" && req.method != "HEAD") return text(405, "method not allowed");
  std::string_view rest = std::string_view(req.path).substr(std::string_view("/resource/").size());
  std::size_t slash = rest.find('/');
  if (slash == std::string_view::npos || slash + 1 >= rest.size()) return text(404, "not found");
  Iri focus = [&] {
    try {
      return onto_.mintResourceIri(rest.substr(0, slash), rest.substr(slash + 1));
    } catch (const std::invalid_argument&) {
      return Iri(onto_.base() + "resource/");
    }
  }();

  static const std::vector<std::string_view> kOffers = {"text/html", kTurtle, "application/json",
                                                        kNTriples};
  auto pick = negotiate(req.header("Accept").value_or(""), kOffers);
  if (!pick) return text(406, "acceptable formats: text/html, text/turtle, application/json");

  Description d = store_.read(
      [&](const rdf::Dataset& data) { return describe(data, onto_, focus, config_.incomingCap); });
  if (d.outgoing.empty()) return text(404, "no description for <" + focus.str() + ">");

  switch (*pick) {
    case 1: return {200, "text/turtle; charset=utf-8", rdf::serializeTurtle(d.all(), onto_.prefixes())};
    case 2: return {200, "application/json", describeJson(d)};
    case 3: {
      auto all = d.all();
      return {200, std::string(kNTriples), rdf::serializeNTriples(all)};
    }
    default: return {200, "text/html; charset=utf-8", describeHtml(d, onto_)};
  }
}

std::vector<Triple> Description::all() const {
  std::vector<Triple> out = outgoing;
  out.insert(out.end(), expanded.begin(), expanded.end());
  out.insert(out.end(), incoming.begin(), incoming.end());
  return out;
}

Description describe(const rdf::Dataset& data, const ontology::Ontology& onto, const Iri& focus,
                     std::size_t incomingCap) {
  Description d{focus, {}, {}, {}, false};
  d.outgoing = matchAll(data, focus, std::nullopt);
  const std::string resultPrefix = onto.base() + "resource/result/";
  std::set<Iri> hopped;
  for (const auto& t : d.outgoing) {
    const Iri* o = t.object.asIri();
    if (!o || !o->str().starts_with(resultPrefix) || *o == focus || !hopped.insert(*o).second)
      continue;
    auto more = matchAll(data, *o, std::nullopt);
    d.expanded.insert(d.expanded.end(), more.begin(), more.end());
  }
  std::sort(d.expanded.begin(), d.expanded.end(), tripleLess);
  d.incoming = matchAll(data, std::nullopt, Term(focus));
  std::erase_if(d.incoming, [&](const Triple& t) { return t.subject == focus; });
  if (d.incoming.size() > incomingCap) {
    d.incoming.erase(d.incoming.begin() + static_cast<std::ptrdiff_t>(incomingCap), d.incoming.end());
    d.incomingTruncated = true;
  }
  return d;
}

std::string describeJson(const Description& d) {
  using Json = nlohmann::ordered_json;
  std::map<Iri, std::vector<const Triple*>> bySubject;
  for (const auto& t : d.expanded) bySubject[t.subject].push_back(&t);
  Json outgoing = Json::array();
  for (const auto& t : d.outgoing) {
    Json o = termJson(t.object);
    if (const Iri* iri = t.object.asIri(); iri && bySubject.count(*iri)) {
      Json nested = Json::array();
      for (const Triple* e : bySubject[*iri])
        nested.push_back({{"p", e->predicate.str()}, {"o", termJson(e->object)}});
      o["outgoing"] = std::move(nested);
    }
    outgoing.push_back({{"p", t.predicate.str()}, {"o", std::move(o)}});
  }
  Json incoming = Json::array();
  for (const auto& t : d.incoming)
    incoming.push_back({{"s", t.subject.str()}, {"p", t.predicate.str()}});
  Json doc = {{"iri", d.focus.str()}, {"outgoing", std::move(outgoing)},
              {"incoming", std::move(incoming)}, {"incomingTruncated", d.incomingTruncated}};
  return doc.dump();
}

namespace {

std::string link(const Iri& iri, const ontology::Ontology& onto) {
  const std::string local = onto.base() + "resource/";
  std::string href = iri.str().starts_with(local) ? iri.str().substr(onto.base().size() - 1)
                                                  : iri.str();
  return "<a href=\"" + htmlEscape(href) + "\">" + htmlEscape(iri.str()) + "</a>";
}

std::string cell(const Term& t, const ontology::Ontology& onto) {
  if (t.isIri()) return link(t.iri(), onto);
  const auto& l = t.literal();
  std::string s = htmlEscape(l.lexical());
  if (l.lang()) s += " <small>@" + htmlEscape(*l.lang()) + "</small>";
  else if (l.datatype().str() != rdf::xsd::kString)
    s += " <small>" + htmlEscape(l.datatype().str()) + "</small>";
  return s;
}

}  // namespace

std::string describeHtml(const Description& d, const ontology::Ontology& onto) {
  std::string title = d.focus.str();
  for (const auto& t : d.outgoing)
    if (t.predicate == onto.terms().name && t.object.isLiteral()) title = t.object.literal().lexical();

  std::string h = "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" + htmlEscape(title) +
                  "</title></head>\n<body>\n<h1>" + htmlEscape(title) + "</h1>\n<p>" +
                  htmlEscape(d.focus.str()) + "</p>\n";
  auto table = [&](const char* heading, const std::vector<Triple>& rows, bool showSubject) {
    if (rows.empty()) return;
    h += std::string("<h2>") + heading + "</h2>\n<table>\n";
    for (const auto& t : rows) {
      h += "<tr>";
      if (showSubject) h += "<td>" + link(t.subject, onto) + "</td>";
      h += "<td>" + link(t.predicate, onto) + "</td>";
      if (!showSubject || &rows != &d.incoming) h += "<td>" + cell(t.object, onto) + "</td>";
      h += "</tr>\n";
    }
    h += "</table>\n";
  };
  table("Properties", d.outgoing, false);
  table("Related", d.expanded, true);
  table("Referenced by", d.incoming, true);
  h += "</body></html>\n";
  return h;
}

}  // namespace linkclimate::service
