#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "linkclimate/rdf/term.hpp"

namespace linkclimate::rdf {

using TermId = std::uint32_t;
// Id 0 never names a term; the query engine uses it for "unbound".
inline constexpr TermId kNoTerm = 0;

// Interns terms to dense ids. Shared by every graph of a dataset.
class TermDictionary {
 public:
  TermId intern(const Term& term);
  std::optional<TermId> find(const Term& term) const;
  const Term& term(TermId id) const { return terms_[id - 1]; }
  std::size_t size() const noexcept { return terms_.size(); }

 private:
  std::deque<Term> terms_;
  std::unordered_map<Term, TermId> ids_;
};

struct IdTriple {
  TermId s = kNoTerm, p = kNoTerm, o = kNoTerm;
  friend bool operator==(const IdTriple&, const IdTriple&) = default;
};

// One triple set with subject-, predicate- and object-first indexes.
class Graph {
 public:
  using Visitor = std::function<bool(const IdTriple&)>;  // return false to stop

  bool insert(const IdTriple& t);
  bool erase(const IdTriple& t);
  bool contains(const IdTriple& t) const;
  void clear();
  std::size_t size() const noexcept { return spo_.size(); }
  bool empty() const noexcept { return spo_.empty(); }

  // Visits triples agreeing with every bound position (kNoTerm = wildcard),
  // scanning whichever index has the bound position(s) as its key prefix.
  void forEachMatch(TermId s, TermId p, TermId o, const Visitor& visit) const;

  // Number of matches, counting no further than `cap`.
  std::size_t estimate(TermId s, TermId p, TermId o, std::size_t cap) const;

  // Sizes of the three indexes; equal unless something is badly wrong.
  std::array<std::size_t, 3> indexSizes() const noexcept {
    return {spo_.size(), pos_.size(), osp_.size()};
  }

 private:
  using Key = std::array<TermId, 3>;
  std::set<Key> spo_, pos_, osp_;
};

// Default graph plus IRI-named graphs over one term dictionary.
// Not synchronized; see Store for the reader/writer wrapper.
class Dataset {
 public:
  using GraphName = std::optional<Iri>;  // nullopt = default graph

  bool insert(const GraphName& graph, const Triple& t);
  // Inserts a batch; returns how many were new.
  std::size_t insertAll(const GraphName& graph, const std::vector<Triple>& triples);
  bool erase(const GraphName& graph, const Triple& t);

  std::vector<Triple> match(const GraphName& graph, const std::optional<Iri>& s,
                            const std::optional<Iri>& p,
                            const std::optional<Term>& o) const;

  // Replaces a graph's content with the deduplicated input. Returns the
  // resulting cardinality.
  std::size_t replaceGraph(const GraphName& graph, const std::vector<Triple>& triples);

  // Removes a named graph entirely, or empties the default graph. Returns
  // false when a named graph did not exist.
  bool dropGraph(const GraphName& graph);

  bool hasGraph(const GraphName& graph) const;
  std::size_t size(const GraphName& graph) const;
  std::size_t totalSize() const;
  std::vector<Iri> graphNames() const;
  std::vector<Triple> triples(const GraphName& graph) const;

  // Id-level access for the query engine.
  const TermDictionary& dictionary() const noexcept { return dict_; }
  const Graph& defaultGraph() const noexcept { return default_; }
  const Graph* namedGraph(const Iri& name) const;
  std::optional<TermId> idOf(const Term& term) const { return dict_.find(term); }
  Triple resolve(const IdTriple& t) const;

 private:
  Graph* graphFor(const GraphName& graph, bool create);
  const Graph* graphFor(const GraphName& graph) const;
  IdTriple intern(const Triple& t);

  TermDictionary dict_;
  Graph default_;
  std::map<Iri, Graph> named_;
};

// Per-graph set equality of two datasets (dictionary ids may differ).
bool sameContent(const Dataset& a, const Dataset& b);

// Dataset behind a reader/writer lock: many concurrent readers or one
// writer. Readers never observe a half-applied write.
class Store {
 public:
  Store() = default;
  explicit Store(Dataset data) : data_(std::move(data)) {}

  template <typename F>
  decltype(auto) read(F&& fn) const {
    std::shared_lock lock(mutex_);
    return std::forward<F>(fn)(static_cast<const Dataset&>(data_));
  }

  template <typename F>
  decltype(auto) write(F&& fn) {
    std::unique_lock lock(mutex_);
    return std::forward<F>(fn)(data_);
  }

 private:
  mutable std::shared_mutex mutex_;
  Dataset data_;
};

}  // namespace linkclimate::rdf
