#include "linkclimate/rdf/dataset.hpp"

#include <algorithm>

namespace linkclimate::rdf {

TermId TermDictionary::intern(const Term& term) {
  if (auto it = ids_.find(term); it != ids_.end()) return it->second;
  terms_.push_back(term);
  auto id = static_cast<TermId>(terms_.size());
  ids_.emplace(term, id);
  return id;
}

std::optional<TermId> TermDictionary::find(const Term& term) const {
  if (auto it = ids_.find(term); it != ids_.end()) return it->second;
  return std::nullopt;
}

bool Graph::insert(const IdTriple& t) {
  if (!spo_.insert({t.s, t.p, t.o}).second) return false;
  pos_.insert({t.p, t.o, t.s});
  osp_.insert({t.o, t.s, t.p});
  return true;
}

bool Graph::erase(const IdTriple& t) {
  if (spo_.erase({t.s, t.p, t.o}) == 0) return false;
  pos_.erase({t.p, t.o, t.s});
  osp_.erase({t.o, t.s, t.p});
  return true;
}

bool Graph::contains(const IdTriple& t) const { return spo_.contains({t.s, t.p, t.o}); }

void Graph::clear() {
  spo_.clear();
  pos_.clear();
  osp_.clear();
}

namespace {

// Walks keys of `index` whose first `prefixLen` components equal `prefix`.
template <typename Fn>
void scanPrefix(const std::set<std::array<TermId, 3>>& index,
                const std::array<TermId, 3>& prefix, int prefixLen, Fn&& fn) {
  if (prefixLen == 0) {
    for (const auto& k : index)
      if (!fn(k)) return;
    return;
  }
  std::array<TermId, 3> lo{0, 0, 0};
  for (int i = 0; i < prefixLen; ++i) lo[i] = prefix[i];
  for (auto it = index.lower_bound(lo); it != index.end(); ++it) {
    for (int i = 0; i < prefixLen; ++i)
      if ((*it)[i] != prefix[i]) return;
    if (!fn(*it)) return;
  }
}

}  // namespace

void Graph::forEachMatch(TermId s, TermId p, TermId o, const Visitor& visit) const {
  const bool bs = s != kNoTerm, bp = p != kNoTerm, bo = o != kNoTerm;
  if (bs && bp && bo) {
    if (spo_.contains({s, p, o})) visit({s, p, o});
    return;
  }
  if (bs && !bo) {  // s, sp
    scanPrefix(spo_, {s, p, 0}, bp ? 2 : 1,
               [&](const auto& k) { return visit({k[0], k[1], k[2]}); });
  } else if (bp) {  // p, po
    scanPrefix(pos_, {p, o, 0}, bo ? 2 : 1,
               [&](const auto& k) { return visit({k[2], k[0], k[1]}); });
  } else if (bo) {  // o, os
    scanPrefix(osp_, {o, s, 0}, bs ? 2 : 1,
               [&](const auto& k) { return visit({k[1], k[2], k[0]}); });
  } else {
    scanPrefix(spo_, {0, 0, 0}, 0,
               [&](const auto& k) { return visit({k[0], k[1], k[2]}); });
  }
}

std::size_t Graph::estimate(TermId s, TermId p, TermId o, std::size_t cap) const {
  if (s == kNoTerm && p == kNoTerm && o == kNoTerm) return std::min(spo_.size(), cap);
  std::size_t n = 0;
  forEachMatch(s, p, o, [&](const IdTriple&) { return ++n < cap; });
  return n;
}

IdTriple Dataset::intern(const Triple& t) {
  return {dict_.intern(t.subject), dict_.intern(t.predicate), dict_.intern(t.object)};
}

Triple Dataset::resolve(const IdTriple& t) const {
  return Triple{dict_.term(t.s).iri(), dict_.term(t.p).iri(), dict_.term(t.o)};
}

Graph* Dataset::graphFor(const GraphName& graph, bool create) {
  if (!graph) return &default_;
  auto it = named_.find(*graph);
  if (it != named_.end()) return &it->second;
  if (!create) return nullptr;
  return &named_[*graph];
}

const Graph* Dataset::graphFor(const GraphName& graph) const {
  if (!graph) return &default_;
  return namedGraph(*graph);
}

const Graph* Dataset::namedGraph(const Iri& name) const {
  auto it = named_.find(name);
  return it == named_.end() ? nullptr : &it->second;
}

bool Dataset::insert(const GraphName& graph, const Triple& t) {
  return graphFor(graph, true)->insert(intern(t));
}

std::size_t Dataset::insertAll(const GraphName& graph, const std::vector<Triple>& triples) {
  Graph* g = graphFor(graph, true);
  std::size_t added = 0;
  for (const auto& t : triples) added += g->insert(intern(t)) ? 1 : 0;
  return added;
}

bool Dataset::erase(const GraphName& graph, const Triple& t) {
  Graph* g = graphFor(graph, false);
  if (!g) return false;
  auto s = dict_.find(t.subject), p = dict_.find(t.predicate), o = dict_.find(t.object);
  if (!s || !p || !o) return false;
  return g->erase({*s, *p, *o});
}

std::vector<Triple> Dataset::match(const GraphName& graph, const std::optional<Iri>& s,
                                   const std::optional<Iri>& p,
                                   const std::optional<Term>& o) const {
  std::vector<Triple> out;
  const Graph* g = graphFor(graph);
  if (!g) return out;
  auto lookup = [&](const auto& term, TermId& id) {
    if (!term) return true;
    auto found = dict_.find(*term);
    if (!found) return false;
    id = *found;
    return true;
  };
  TermId sid = kNoTerm, pid = kNoTerm, oid = kNoTerm;
  if (!lookup(s, sid) || !lookup(p, pid) || !lookup(o, oid)) return out;
  g->forEachMatch(sid, pid, oid, [&](const IdTriple& t) {
    out.push_back(resolve(t));
    return true;
  });
  return out;
}

std::size_t Dataset::replaceGraph(const GraphName& graph, const std::vector<Triple>& triples) {
  Graph fresh;
  for (const auto& t : triples) fresh.insert(intern(t));
  Graph* g = graphFor(graph, true);
  *g = std::move(fresh);
  return g->size();
}

bool Dataset::dropGraph(const GraphName& graph) {
  if (!graph) {
    default_.clear();
    return true;
  }
  return named_.erase(*graph) > 0;
}

bool Dataset::hasGraph(const GraphName& graph) const { return graphFor(graph) != nullptr; }

std::size_t Dataset::size(const GraphName& graph) const {
  const Graph* g = graphFor(graph);
  return g ? g->size() : 0;
}

std::size_t Dataset::totalSize() const {
  std::size_t n = default_.size();
  for (const auto& [name, g] : named_) n += g.size();
  return n;
}

std::vector<Iri> Dataset::graphNames() const {
  std::vector<Iri> names;
  names.reserve(named_.size());
  for (const auto& [name, g] : named_) names.push_back(name);
  return names;
}

std::vector<Triple> Dataset::triples(const GraphName& graph) const {
  return match(graph, std::nullopt, std::nullopt, std::nullopt);
}

bool sameContent(const Dataset& a, const Dataset& b) {
  auto asSet = [](const Dataset& d, const Dataset::GraphName& g) {
    auto ts = d.triples(g);
    std::sort(ts.begin(), ts.end());
    return ts;
  };
  if (a.graphNames() != b.graphNames()) return false;
  if (asSet(a, std::nullopt) != asSet(b, std::nullopt)) return false;
  for (const auto& name : a.graphNames())
    if (asSet(a, name) != asSet(b, name)) return false;
  return true;
}

}  // namespace linkclimate::rdf
