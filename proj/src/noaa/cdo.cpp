#include "linkclimate/noaa/cdo.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>


namespace linkclimate::noaa {

namespace {

constexpr std::array<std::string_view, 7> kEndpoints = {
    "/datasets", "/datacategories", "/datatypes", "/locationcategories",
    "/locations", "/stations", "/data"};

std::string requireString(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get_ref<const std::string&>().empty())
    throw RecordError(std::string("missing or empty \"") + key + "\"");
  return it->get<std::string>();
}

std::optional<std::string> optString(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

std::optional<double> optNumber(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

double requireNumber(const Json& j, const char* key) {
  auto v = optNumber(j, key);
  if (!v) throw RecordError(std::string("missing numeric \"") + key + "\"");
  return *v;
}

std::string readFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

StationRec StationRec::fromJson(const Json& j) {
  if (!j.is_object()) throw RecordError("station record is not an object");
  StationRec r;
  r.id = requireString(j, "id");
  r.name = optString(j, "name").value_or("");
  r.latitude = requireNumber(j, "latitude");
  r.longitude = requireNumber(j, "longitude");
  if (r.latitude < -90 || r.latitude > 90)
    throw RecordError("station " + r.id + ": latitude out of range");
  if (r.longitude < -180 || r.longitude > 180)
    throw RecordError("station " + r.id + ": longitude out of range");
  r.elevation = optNumber(j, "elevation");
  r.elevationUnit = optString(j, "elevationUnit");
  r.mindate = optString(j, "mindate");
  r.maxdate = optString(j, "maxdate");
  r.datacoverage = optNumber(j, "datacoverage");
  return r;
}

ObservationRec ObservationRec::fromJson(const Json& j) {
  if (!j.is_object()) throw RecordError("observation record is not an object");
  ObservationRec r;
  r.date = requireString(j, "date");
  r.datatype = requireString(j, "datatype");
  r.station = requireString(j, "station");
  r.value = requireNumber(j, "value");
  r.attributes = optString(j, "attributes");
  return r;
}

MetadataRec MetadataRec::fromJson(const Json& j) {
  if (!j.is_object()) throw RecordError("metadata record is not an object");
  MetadataRec r;
  r.id = requireString(j, "id");
  r.name = optString(j, "name").value_or("");
  r.mindate = optString(j, "mindate");
  r.maxdate = optString(j, "maxdate");
  r.datacoverage = optNumber(j, "datacoverage");
  return r;
}

Envelope Envelope::parse(std::string_view body) {
  Json doc;
  try {
    doc = Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw MalformedResponse(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw MalformedResponse("CDO response is not a JSON object", 0);
  Envelope env;
  if (doc.empty()) return env;
  auto results = doc.find("results");
  if (results == doc.end() || !results->is_array())
    throw MalformedResponse("CDO response lacks a \"results\" array", 0);
  env.results.assign(results->begin(), results->end());
  const Json* rs = nullptr;
  if (auto meta = doc.find("metadata"); meta != doc.end() && meta->is_object())
    if (auto it = meta->find("resultset"); it != meta->end() && it->is_object()) rs = &*it;
  if (!rs) throw MalformedResponse("CDO response lacks metadata.resultset", 0);
  env.resultset.offset = rs->value("offset", 1L);
  env.resultset.count = rs->value("count", 0L);
  env.resultset.limit = rs->value("limit", static_cast<long>(env.results.size()));
  const auto n = static_cast<long>(env.results.size());
  if (env.resultset.limit < 1 || env.resultset.limit > 1000 || n > env.resultset.limit)
    throw MalformedResponse("resultset limit inconsistent with results", 0);
  if (env.resultset.count > 0 && env.resultset.offset + n - 1 > env.resultset.count)
    throw MalformedResponse("resultset offset/count inconsistent with results", 0);
  return env;
}

bool isCdoEndpoint(std::string_view endpoint) {
  return std::find(kEndpoints.begin(), kEndpoints.end(), endpoint) != kEndpoints.end();
}

std::vector<Json> fetchAll(const FetchPlan& plan, net::Fetcher& fetcher) {
  if (!isCdoEndpoint(plan.endpoint))
    throw std::invalid_argument("not a CDO endpoint: " + plan.endpoint);
  if (plan.limit < 1 || plan.limit > 1000)
    throw std::invalid_argument("limit must be in [1, 1000]");
  auto start = net::param(plan.params, "startdate");
  auto end = net::param(plan.params, "enddate");
  if (start && end && *end < *start)
    throw std::invalid_argument("startdate after enddate in plan for " + plan.endpoint);

  std::vector<Json> out;
  long offset = 1;
  for (;;) {
    net::Request req{plan.endpoint, {}, {}};
    for (const auto& kv : plan.params)
      if (kv.first != "limit" && kv.first != "offset") req.params.push_back(kv);
    req.params.emplace_back("limit", std::to_string(plan.limit));
    req.params.emplace_back("offset", std::to_string(offset));
    if (!plan.token.empty()) req.headers.emplace_back("token", plan.token);

    net::Response resp = fetcher.get(req);
    Envelope env;
    try {
      env = Envelope::parse(resp.body);
    } catch (const MalformedResponse& e) {
      throw MalformedResponse(net::describe(req) + ": " + e.what(), e.byteOffset());
    }
    if (env.results.empty()) break;
    for (auto& r : env.results) out.push_back(std::move(r));
    offset += plan.limit;
    if (offset > env.resultset.count) break;
  }
  return out;
}

FixtureTransport::FixtureTransport(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::vector<net::Request> FixtureTransport::requestLog() const {
  std::lock_guard lock(mutex_);
  return log_;
}

const FixtureTransport::Corpus* FixtureTransport::corpus(const std::string& endpoint) {
  if (auto it = corpora_.find(endpoint); it != corpora_.end()) return &it->second;
  auto path = dir_ / (endpoint.substr(1) + ".json");
  if (!std::filesystem::exists(path)) return nullptr;
  Json doc = Json::parse(readFile(path));
  Corpus c;
  if (auto it = doc.find("results"); it != doc.end()) c.results.assign(it->begin(), it->end());
  c.filters = doc.value("filters", Json::object());
  return &corpora_.emplace(endpoint, std::move(c)).first->second;
}

net::Response FixtureTransport::get(const net::Request& request) {
  std::lock_guard lock(mutex_);
  log_.push_back(request);
  if (!isCdoEndpoint(request.path))
    return {404, R"({"status":"404","message":"unknown endpoint"})"};

  std::string query = net::canonicalQuery(request.params);
  auto exact = dir_ / "exact" / request.path.substr(1) / ((query.empty() ? "_" : query) + ".json");
  if (std::filesystem::exists(exact)) return {200, readFile(exact)};

  const Corpus* c = corpus(request.path);
  if (!c) return {404, R"({"status":"404","message":"no fixture corpus"})"};

  long limit = 25, offset = 1;
  std::optional<std::string> start, end;
  std::vector<std::pair<std::string, std::set<std::string>>> filters;
  for (const auto& [k, v] : request.params) {
    if (k == "limit" || k == "offset") {
      long n = 0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
      if (ec != std::errc() || ptr != v.data() + v.size())
        return {400, R"({"status":"400","message":"non-numeric limit or offset"})"};
      (k == "limit" ? limit : offset) = n;
    } else if (k == "startdate") {
      start = v;
    } else if (k == "enddate") {
      end = v;
    } else if (c->filters.contains(k)) {
      std::set<std::string> ids;
      if (auto vals = c->filters[k].find(v); vals != c->filters[k].end())
        for (const auto& id : *vals) ids.insert(id.get<std::string>());
      filters.emplace_back(k, std::move(ids));
    }
  }
  if (limit < 1 || limit > 1000 || offset < 1)
    return {400, R"({"status":"400","message":"invalid limit or offset"})"};

  const char* key = request.path == "/data" ? "station" : "id";
  std::vector<const Json*> hits;
  for (const auto& rec : c->results) {
    std::string id = rec.value(key, "");
    bool keep = std::all_of(filters.begin(), filters.end(),
                            [&](const auto& f) { return f.second.contains(id); });
    if (keep && (start || end) && rec.contains("date")) {
      std::string day = rec["date"].get<std::string>().substr(0, 10);
      if (start && day < *start) keep = false;
      if (end && day > *end) keep = false;
    }
    if (keep) hits.push_back(&rec);
  }
  if (hits.empty()) return {200, "{}"};
  Json page = Json::array();
  for (long i = offset - 1; i < static_cast<long>(hits.size()) && i < offset - 1 + limit; ++i)
    page.push_back(*hits[i]);
  Json body = {{"metadata",
                {{"resultset",
                  {{"offset", offset}, {"count", static_cast<long>(hits.size())}, {"limit", limit}}}}},
               {"results", std::move(page)}};
  return {200, body.dump()};
}

}  // namespace linkclimate::noaa
