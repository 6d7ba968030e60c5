#include "water_body_oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "support.hpp"

namespace lctest {

namespace {

using Json = nlohmann::json;

const std::vector<std::string> kFinestFirst = {"suburb", "village", "town", "city",
                                               "county", "state",   "country"};
const std::string kWd = "http://www.wikidata.org/entity/";
const std::string kP206 = "<http://www.wikidata.org/prop/direct/P206>";
const std::string kLabel = "<http://www.w3.org/2000/01/rdf-schema#label>";

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// (country code, level, name)
using AreaKey = std::tuple<std::string, std::string, std::string>;

struct Place {
  std::vector<AreaKey> finestFirst;
  std::optional<std::pair<AreaKey, std::string>> tagged;  // addresstype area -> Q-id
};

std::optional<Place> readPlace(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) return std::nullopt;
  auto doc = Json::parse(readFile(file));
  if (doc.contains("error")) return std::nullopt;
  const auto& addr = doc["address"];
  std::string cc = addr.value("country_code", "");
  Place p;
  for (const auto& level : kFinestFirst)
    if (addr.contains(level)) p.finestFirst.emplace_back(cc, level, addr[level].get<std::string>());
  if (p.finestFirst.empty()) return std::nullopt;
  if (doc.contains("extratags") && doc["extratags"].contains("wikidata")) {
    std::string type = doc.value("addresstype", "");
    for (const auto& k : p.finestFirst)
      if (std::get<1>(k) == type) p.tagged = {{k, doc["extratags"]["wikidata"].get<std::string>()}};
    if (!p.tagged) p.tagged = {{p.finestFirst.front(), doc["extratags"]["wikidata"].get<std::string>()}};
  }
  return p;
}

// Minimal line reader for the extract: every line is "<s> <p> object ."
std::multimap<std::pair<std::string, std::string>, std::string> readWikidata() {
  std::multimap<std::pair<std::string, std::string>, std::string> out;
  std::string text = readFile(fixtureDir() / "wikidata.nt");
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? text.size() : eol + 1;
    if (line.empty() || line[0] == '#') continue;
    std::size_t s1 = line.find(' ');
    std::size_t s2 = line.find(' ', s1 + 1);
    std::size_t end = line.rfind(" .");
    out.emplace(std::pair{line.substr(0, s1), line.substr(s1 + 1, s2 - s1 - 1)}, line.substr(s2 + 1, end - s2 - 1));
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> waterBodyOracle() {
  auto stations = Json::parse(readFile(fixtureDir() / "cdo" / "stations.json"));
  std::set<std::string> listed;
  for (const auto& [loc, ids] : stations["filters"]["locationid"].items())
    for (const auto& id : ids) listed.insert(id.get<std::string>());

  std::map<std::string, Place> places;  // station id -> place
  std::map<AreaKey, std::set<std::string>> qids;
  for (const auto& s : stations["results"]) {
    std::string id = s["id"].get<std::string>();
    if (!listed.count(id)) continue;
    auto place = readPlace(fixtureDir() / "nominatim" /
                           ("reverse_" + coord(s["latitude"].get<double>()) + "_" +
                            coord(s["longitude"].get<double>()) + ".json"));
    if (!place) continue;
    if (place->tagged) qids[place->tagged->first].insert(place->tagged->second);
    places.emplace(id, *place);
  }

  auto wd = readWikidata();
  // (station iri, water body iri, label cell)
  std::set<std::tuple<std::string, std::string, std::string>> rows;
  for (const auto& [id, place] : places) {
    if (place.finestFirst.size() < 2) continue;
    auto q = qids.find(place.finestFirst[1]);
    if (q == qids.end()) continue;
    const std::string station = "http://jresearch.ucd.ie/climate-kg/resource/station/" + id;
    for (const auto& qid : q->second) {
      auto [b, e] = wd.equal_range({"<" + kWd + qid + ">", kP206});
      for (auto it = b; it != e; ++it) {
        std::string wb = it->second.substr(1, it->second.size() - 2);
        auto [lb, le] = wd.equal_range({it->second, kLabel});
        if (lb == le) rows.emplace(station, wb, "");
        for (auto l = lb; l != le; ++l) rows.emplace(station, wb, l->second);
      }
    }
  }
  std::vector<std::vector<std::string>> out;
  for (const auto& [s, wb, label] : rows) out.push_back({"<" + s + ">", "<" + wb + ">", label});
  return out;
}

}  // namespace lctest
