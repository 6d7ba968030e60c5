#include "linkclimate/pipeline/competency.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "linkclimate/pipeline/geo.hpp"
#include "linkclimate/rdf/syntax.hpp"
#include "linkclimate/util/dates.hpp"

namespace linkclimate::pipeline {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& embeddedQueries();
}

using rdf::Iri;
using rdf::Term;
using rdf::Triple;

const std::vector<ShippedQuery>& shippedQueries() {
  static const std::vector<ShippedQuery> kQueries = [] {
    std::vector<ShippedQuery> out;
    for (auto [name, text] : detail::embeddedQueries()) {
      std::string question;
      if (text.starts_with("# ")) question = std::string(text.substr(2, text.find('\n') - 2));
      out.push_back({std::string(name), std::move(question), std::string(text)});
    }
    return out;
  }();
  return kQueries;
}

std::optional<ShippedQuery> shippedQuery(std::string_view name) {
  for (const auto& q : shippedQueries())
    if (q.name == name) return q;
  return std::nullopt;
}

bool CompetencyReport::allPassed() const {
  return !outcomes.empty() &&
         std::all_of(outcomes.begin(), outcomes.end(), [](const CqOutcome& o) { return o.passed; });
}

AnswerSet toAnswer(const sparql::ResultTable& table) {
  AnswerSet out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    std::vector<std::string> cells;
    for (const auto& cell : row) cells.push_back(cell ? rdf::toNTriples(*cell) : "");
    out.push_back(std::move(cells));
  }
  return out;
}

std::string diffAnswers(const AnswerSet& expected, const AnswerSet& actual, std::size_t limit) {
  std::multiset<std::vector<std::string>> want(expected.begin(), expected.end());
  std::vector<std::vector<std::string>> extra;
  for (const auto& row : actual) {
    if (auto it = want.find(row); it != want.end()) want.erase(it);
    else extra.push_back(row);
  }
  auto line = [](const std::vector<std::string>& row) {
    std::string s;
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? " | " : "") + (row[i].empty() ? "-" : row[i]);
    return s;
  };
  std::ostringstream out;
  out << "expected " << expected.size() << " rows, got " << actual.size() << "\n";
  std::size_t n = 0;
  for (const auto& row : want) {
    if (n++ == limit) break;
    out << "  - " << line(row) << "\n";
  }
  n = 0;
  for (const auto& row : extra) {
    if (n++ == limit) break;
    out << "  + " << line(row) << "\n";
  }
  if (want.empty() && extra.empty()) out << "  same rows, different order\n";
  return out.str();
}

namespace {

std::string nt(const Term& t) { return rdf::toNTriples(t); }

AnswerSet sorted(AnswerSet a) {
  std::sort(a.begin(), a.end());
  return a;
}

// Index walks used by the oracles.
class Walk {
 public:
  Walk(const rdf::Dataset& d, const ontology::Ontology& onto) : d_(d), t_(onto.terms()) {}

  std::vector<Triple> match(const std::optional<Iri>& s, const Iri& p,
                            const std::optional<Term>& o = std::nullopt) const {
    std::vector<Triple> out;
    auto add = [&](const std::optional<Iri>& g) {
      auto m = d_.match(g, s, p, o);
      out.insert(out.end(), m.begin(), m.end());
    };
    add(std::nullopt);
    for (const auto& g : d_.graphNames()) add(g);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<Term> objects(const Iri& s, const Iri& p) const {
    std::vector<Term> out;
    for (auto& tr : match(s, p)) out.push_back(tr.object);
    return out;
  }

  std::vector<Iri> stations() const {
    std::vector<Iri> out;
    for (auto& tr : match(std::nullopt, ontology::term::type(), Term(t_.Station))) out.push_back(tr.subject);
    return out;
  }

  // (observation, result, resultTime, value) for a station and datatype.
  struct Obs {
    std::string time;
    std::optional<Term> timeTerm;
    std::vector<Term> values;
  };
  std::vector<Obs> observations(const Iri& station, const Iri& datatype) const {
    std::vector<Obs> out;
    for (auto& o : match(std::nullopt, t_.sourceStation, Term(station))) {
      for (auto& r : objects(o.subject, t_.hasResult)) {
        if (!r.isIri()) continue;
        auto dts = objects(r.iri(), t_.withDataType);
        if (std::find(dts.begin(), dts.end(), Term(datatype)) == dts.end()) continue;
        for (auto& time : objects(o.subject, t_.resultTime)) {
          Obs ob{time.isLiteral() ? time.literal().lexical() : "", time, objects(r.iri(), t_.numericValue)};
          out.push_back(std::move(ob));
        }
      }
    }
    return out;
  }

  const rdf::Dataset& d_;
  const ontology::CaTerms& t_;
};

std::optional<double> number(const std::optional<Term>& t) {
  if (!t || !t->isLiteral() || !t->literal().isNumeric()) return std::nullopt;
  return t->literal().numericValue();
}

// Second haversine form (atan2), kept apart from the library helper.
double greatCircleKm(double lat1, double lon1, double lat2, double lon2) {
  const double r = std::numbers::pi / 180;
  const double a = std::pow(std::sin((lat2 - lat1) * r / 2), 2) +
                   std::cos(lat1 * r) * std::cos(lat2 * r) * std::pow(std::sin((lon2 - lon1) * r / 2), 2);
  return 2 * 6371.0 * std::atan2(std::sqrt(a), std::sqrt(1 - a));
}

struct Context {
  rdf::Store& store;
  const ontology::Ontology& onto;
  const CompetencyTargets& targets;
  std::string_view supplementary;

  Iri station(const std::string& id) const { return onto.mintResourceIri("station", id); }
  Iri datatype(const std::string& id) const { return onto.mintResourceIri("datatype", id); }

  sparql::ResultTable run(const std::string& name) const {
    auto q = shippedQuery(name);
    if (!q) throw std::runtime_error("query " + name + " is not shipped");
    return store.read([&](const rdf::Dataset& d) { return sparql::execute(q->text, d); });
  }
};

struct Check {
  AnswerSet actual, expected;
  bool ordered = false;
  std::string note = {};  // extra failure text
};

// Stations contained in the region within four isLocatedIn hops.
Check cq1(const Context& c) {
  Check out{toAnswer(c.run("cq01")), {}};
  out.actual = sorted(out.actual);
  c.store.read([&](const rdf::Dataset& d) {
    Walk w(d, c.onto);
    const auto& t = c.onto.terms();
    std::set<Iri> regions;
    for (auto& tr : w.match(std::nullopt, t.name, Term(rdf::Literal(c.targets.regionName)))) {
      auto types = w.objects(tr.subject, ontology::term::type());
      if (std::find(types.begin(), types.end(), Term(t.Location)) != types.end()) regions.insert(tr.subject);
    }
    for (const auto& s : w.stations()) {
      std::set<Iri> frontier{s}, reached;
      for (int hop = 0; hop < 4; ++hop) {
        std::set<Iri> next;
        for (const auto& f : frontier)
          for (auto& o : w.objects(f, t.isLocatedIn))
            if (o.isIri()) next.insert(o.iri());
        reached.insert(next.begin(), next.end());
        frontier = std::move(next);
      }
      bool inside = std::any_of(regions.begin(), regions.end(),
                                [&](const Iri& r) { return reached.contains(r); });
      if (!inside) continue;
      for (auto& name : w.objects(s, t.name)) out.expected.push_back({nt(s), nt(name)});
    }
  });
  out.expected = sorted(out.expected);
  return out;
}

std::vector<StationPoint> pointsFrom(const sparql::ResultTable& table) {
  std::map<Iri, GeoPoint> best;
  for (const auto& row : table.rows) {
    if (!row[0] || !row[0]->isIri()) continue;
    auto lat = number(row[1]), lon = number(row[2]);
    if (!lat || !lon) continue;
    auto [it, fresh] = best.emplace(row[0]->iri(), GeoPoint{*lat, *lon});
    if (!fresh && std::pair(*lat, *lon) < std::pair(it->second.lat, it->second.lon))
      it->second = GeoPoint{*lat, *lon};
  }
  std::vector<StationPoint> out;
  for (auto& [iri, p] : best) out.push_back({iri, p});
  return out;
}

// Linear-scan coordinates straight from the indexes.
std::map<Iri, std::pair<double, double>> scanCoordinates(const Walk& w, const ontology::CaTerms& t) {
  std::map<Iri, std::pair<double, double>> out;
  for (const auto& s : w.stations()) {
    for (auto& la : w.objects(s, t.lat))
      for (auto& lo : w.objects(s, t.lon)) {
        auto a = number(la), b = number(lo);
        if (!a || !b) continue;
        auto [it, fresh] = out.emplace(s, std::pair(*a, *b));
        if (!fresh && std::pair(*a, *b) < it->second) it->second = {*a, *b};
      }
  }
  return out;
}

Check cq2(const Context& c) {
  Check out;
  const Iri focus = c.station(c.targets.focusStation);
  auto points = pointsFrom(c.run("cq02"));
  auto self = std::find_if(points.begin(), points.end(), [&](const auto& p) { return p.station == focus; });
  std::vector<std::pair<Iri, double>> got;
  if (self != points.end())
    for (auto& [iri, km] : nearestStations(self->point, c.targets.nearestCount + 1, points))
      if (iri != focus && got.size() < c.targets.nearestCount) got.emplace_back(iri, km);
  for (auto& [iri, km] : got) out.actual.push_back({nt(iri)});

  std::vector<std::pair<double, Iri>> ranked;
  c.store.read([&](const rdf::Dataset& d) {
    Walk w(d, c.onto);
    auto coords = scanCoordinates(w, c.onto.terms());
    auto it = coords.find(focus);
    if (it == coords.end()) return;
    for (auto& [iri, ll] : coords)
      if (iri != focus)
        ranked.emplace_back(greatCircleKm(it->second.first, it->second.second, ll.first, ll.second), iri);
  });
  std::sort(ranked.begin(), ranked.end());
  for (std::size_t i = 0; i < ranked.size() && i < c.targets.nearestCount; ++i) {
    out.expected.push_back({nt(ranked[i].second)});
    if (i < got.size() && std::abs(got[i].second - ranked[i].first) > 1e-6)
      out.note += "distance to " + ranked[i].second.str() + " differs\n";
  }
  out.ordered = true;
  return out;
}

Check cq3(const Context& c) {
  Check out;
  const auto& tg = c.targets;
  auto table = c.run("cq03");
  std::set<Iri> fromQuery;
  for (const auto& row : table.rows)
    if (row[0] && row[0]->isIri()) fromQuery.insert(row[0]->iri());
  for (const auto& s : fromQuery) out.actual.push_back({nt(s)});

  auto helper = stationsInBbox(tg.south, tg.north, tg.west, tg.east, pointsFrom(c.run("cq02")));
  if (!std::equal(helper.begin(), helper.end(), fromQuery.begin(), fromQuery.end()))
    out.note += "geo helper and query disagree on the box\n";

  c.store.read([&](const rdf::Dataset& d) {
    Walk w(d, c.onto);
    for (auto& [iri, ll] : scanCoordinates(w, c.onto.terms())) {
      auto [lat, lon] = ll;
      if (lat >= tg.south && lat <= tg.north && lon >= tg.west && lon <= tg.east)
        out.expected.push_back({nt(iri)});
    }
  });
  return out;
}

// datatype -> stations with at least one observation of it.
std::map<Term, std::set<Term>> stationsByDatatype(const Walk& w, const ontology::CaTerms& t) {
  std::map<Term, std::set<Term>> out;
  for (auto& link : w.match(std::nullopt, t.withDataType)) {
    for (auto& obs : w.match(std::nullopt, t.hasResult, Term(link.subject)))
      for (auto& s : w.objects(obs.subject, t.sourceStation)) out[link.object].insert(s);
  }
  return out;
}

Check cq4(const Context& c) {
  Check out{sorted(toAnswer(c.run("cq04"))), {}};
  c.store.read([&](const rdf::Dataset& d) {
    Walk w(d, c.onto);
    for (auto& [dt, stations] : stationsByDatatype(w, c.onto.terms()))
      out.expected.push_back({nt(dt), nt(rdf::integerLiteral(static_cast<long long>(stations.size())))});
  });
  out.expected = sorted(out.expected);
  return out;
}

Check cq5(const Context& c) {
  Check out{sorted(toAnswer(c.run("cq05"))), {}};
  const Term station(c.station(c.targets.variableStation));
  c.store.read([&](const rdf::Dataset& d) {
    Walk w(d, c.onto);
    for (auto& [dt, stations] : stationsByDatatype(w, c.onto.terms()))
      if (stations.contains(station)) out.expected.push_back({nt(dt)});
  });
  out.expected = sorted(out.expected);
  return out;
}

std::string durationDays(const std::string& firstNt, const std::string& lastNt,
                         const std::optional<Term>& first, const std::optional<Term>& last) {
  if (firstNt.empty() || lastNt.empty() || !first || !last || !first->isLiteral() || !last->isLiteral())
    return "";
  auto a = util::datePart(first->literal().lexical()), b = util::datePart(last->literal().lexical());
  if (!a || !b) return "";
  return nt(rdf::integerLiteral(b->daysSinceEpoch() - a->daysSinceEpoch()));
}

Check cq6(const Context& c) {
  Check out;
  auto table = c.run("cq06");
  for (const auto& row : table.rows) {
    auto cells = toAnswer({table.vars, {row}})[0];
    cells.push_back(durationDays(cells[0], cells[1], row[0], row[1]));
    out.actual.push_back(std::move(cells));
  }
  c.store.read([&](const rdf::Dataset& d) {
    Walk w(d, c.onto);
    auto obs = w.observations(c.station(c.targets.focusStation), c.datatype("TMAX"));
    if (obs.empty()) {
      out.expected.push_back({"", "", nt(rdf::integerLiteral(0)), ""});
      return;
    }
    auto [lo, hi] = std::minmax_element(obs.begin(), obs.end(),
                                        [](const auto& a, const auto& b) { return a.time < b.time; });
    std::vector<std::string> row{nt(*lo->timeTerm), nt(*hi->timeTerm),
                                 nt(rdf::integerLiteral(static_cast<long long>(obs.size())))};
    row.push_back(durationDays(row[0], row[1], lo->timeTerm, hi->timeTerm));
    out.expected.push_back(std::move(row));
  });
  return out;
}

Check cq7(const Context& c) {
  Check out{toAnswer(c.run("cq07")), {}, true};
  c.store.read([&](const rdf::Dataset& d) {
    Walk w(d, c.onto);
    auto obs = w.observations(c.station(c.targets.focusStation), c.datatype("PRCP"));
    std::stable_sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
    for (auto& o : obs)
      for (auto& v : o.values) out.expected.push_back({nt(*o.timeTerm), nt(v)});
  });
  return out;
}

Check cq8(const Context& c) {
  Check out{toAnswer(c.run("cq08")), {}, true};
  c.store.read([&](const rdf::Dataset& d) {
    Walk w(d, c.onto);
    const Iri station = c.station(c.targets.focusStation);
    std::map<std::string, std::vector<Term>> tmin, prcp;
    for (auto& o : w.observations(station, c.datatype("TMIN"))) tmin[o.time] = o.values;
    for (auto& o : w.observations(station, c.datatype("PRCP"))) prcp[o.time] = o.values;
    auto tmax = w.observations(station, c.datatype("TMAX"));
    std::stable_sort(tmax.begin(), tmax.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
    auto or1 = [](const std::map<std::string, std::vector<Term>>& m, const std::string& k) {
      std::vector<std::string> v;
      if (auto it = m.find(k); it != m.end())
        for (auto& t : it->second) v.push_back(nt(t));
      if (v.empty()) v.push_back("");
      return v;
    };
    for (auto& o : tmax)
      for (auto& hi : o.values)
        for (auto& lo : or1(tmin, o.time))
          for (auto& p : or1(prcp, o.time)) out.expected.push_back({nt(*o.timeTerm), nt(hi), lo, p});
  });
  return out;
}

Check cq9(const Context& c) {
  Check out{toAnswer(c.run("cq09")), {}, true};
  c.store.read([&](const rdf::Dataset& d) {
    Walk w(d, c.onto);
    std::map<std::pair<int, unsigned>, std::vector<double>> months;
    for (auto& o : w.observations(c.station(c.targets.focusStation), c.datatype("TMAX"))) {
      auto day = util::datePart(o.time);
      if (!day) continue;
      for (auto& v : o.values)
        if (auto n = number(v)) months[{day->year, day->month}].push_back(*n);
    }
    for (auto& [ym, values] : months) {
      double sum = 0;
      for (double v : values) sum += v;
      out.expected.push_back({nt(rdf::integerLiteral(ym.first)), nt(rdf::integerLiteral(ym.second)),
                              nt(rdf::doubleLiteral(sum / static_cast<double>(values.size()))),
                              nt(rdf::integerLiteral(static_cast<long long>(values.size())))});
    }
  });
  return out;
}

Check cq10(const Context& c) {
  Check out{sorted(toAnswer(c.run("cq10"))), {}};
  c.store.read([&](const rdf::Dataset& d) {
    Walk w(d, c.onto);
    const auto& t = c.onto.terms();
    const Iri s = c.station(c.targets.focusStation);
    auto elevs = w.objects(s, t.elev);
    std::vector<std::string> elev;
    for (auto& e : elevs) elev.push_back(nt(e));
    if (elev.empty()) elev.push_back("");
    for (auto& lat : w.objects(s, t.lat))
      for (auto& lon : w.objects(s, t.lon))
        for (auto& area : w.objects(s, t.isLocatedIn)) {
          if (!area.isIri()) continue;
          std::vector<std::string> same;
          for (auto& q : w.objects(area.iri(), ontology::term::sameAs())) same.push_back(nt(q));
          if (same.empty()) same.push_back("");
          for (auto& name : w.objects(area.iri(), t.name))
            for (auto& e : elev)
              for (auto& q : same) out.expected.push_back({nt(lat), nt(lon), e, nt(area), nt(name), q});
        }
  });
  out.expected = sorted(out.expected);
  return out;
}

Check cq11(const Context& c) {
  Check out;
  const Iri graph = c.onto.graphIri(c.targets.supplementaryGraph);
  auto before = c.run("cq11");
  if (!before.rows.empty())
    out.note += "supplementary graph already answered before loading (" +
                std::to_string(before.rows.size()) + " rows)\n";

  auto triples = rdf::parseNTriples(c.supplementary);
  c.store.write([&](rdf::Dataset& d) { return d.insertAll(graph, triples); });
  out.actual = sorted(toAnswer(c.run("cq11")));

  std::map<Iri, std::vector<Term>> pm25, cover;
  for (const auto& tr : triples) {
    if (tr.predicate.str() == c.targets.supplementaryNs + "annualMeanPm25") pm25[tr.subject].push_back(tr.object);
    if (tr.predicate.str() == c.targets.supplementaryNs + "landCover") cover[tr.subject].push_back(tr.object);
  }
  c.store.read([&](const rdf::Dataset& d) {
    Walk w(d, c.onto);
    for (const auto& s : w.stations()) {
      if (!pm25.contains(s) || !cover.contains(s)) continue;
      for (auto& name : w.objects(s, c.onto.terms().name))
        for (auto& p : pm25[s])
          for (auto& lc : cover[s]) out.expected.push_back({nt(s), nt(name), nt(p), nt(lc)});
    }
  });
  out.expected = sorted(out.expected);
  if (out.expected.empty()) out.note += "supplementary document matched no station\n";
  return out;
}

}  // namespace

CompetencyReport runCompetencySuite(rdf::Store& store, const ontology::Ontology& onto,
                                    std::string_view supplementaryNt, const CompetencyTargets& targets) {
  const Context ctx{store, onto, targets, supplementaryNt};
  const std::vector<std::pair<std::string, std::function<Check(const Context&)>>> cqs = {
      {"cq01", cq1}, {"cq02", cq2}, {"cq03", cq3}, {"cq04", cq4}, {"cq05", cq5},  {"cq06", cq6},
      {"cq07", cq7}, {"cq08", cq8}, {"cq09", cq9}, {"cq10", cq10}, {"cq11", cq11}};

  CompetencyReport report;
  for (std::size_t i = 0; i < cqs.size(); ++i) {
    CqOutcome o;
    o.id = "CQ" + std::to_string(i + 1);
    if (auto q = shippedQuery(cqs[i].first)) o.question = q->question;
    const auto started = std::chrono::steady_clock::now();
    try {
      Check chk = cqs[i].second(ctx);
      o.actual = std::move(chk.actual);
      o.expected = std::move(chk.expected);
      o.passed = chk.note.empty() && o.actual == o.expected && !o.expected.empty();
      if (!o.passed) {
        o.detail = chk.note;
        if (o.expected.empty()) o.detail += "oracle produced no rows\n";
        if (o.actual != o.expected) o.detail += diffAnswers(o.expected, o.actual);
      }
    } catch (const std::exception& e) {
      o.detail = e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    report.outcomes.push_back(std::move(o));
  }
  return report;
}

}  // namespace linkclimate::pipeline
