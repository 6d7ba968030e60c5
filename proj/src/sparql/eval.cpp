#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <regex>
#include <set>
#include <unordered_map>

#include "linkclimate/ontology/ontology.hpp"
#include "linkclimate/sparql/query.hpp"

namespace linkclimate::sparql {

using rdf::Graph;
using rdf::IdTriple;
using rdf::Literal;
using rdf::Term;
using rdf::TermId;

namespace {

using Row = std::vector<TermId>;
using Value = std::optional<Term>;  // nullopt = unbound or evaluation error

// Dataset dictionary plus terms computed during evaluation. A term that
// exists in the dataset always keeps its dataset id, so id equality is term
// equality across both halves.
class TermTable {
 public:
  explicit TermTable(const rdf::TermDictionary& dict) : dict_(dict), base_(dict.size()) {}

  const Term& get(TermId id) const {
    return id <= base_ ? dict_.term(id) : local_[id - base_ - 1];
  }

  std::optional<TermId> find(const Term& t) const { return dict_.find(t); }

  TermId intern(const Term& t) {
    if (auto id = dict_.find(t)) return *id;
    if (auto it = ids_.find(t); it != ids_.end()) return it->second;
    local_.push_back(t);
    auto id = static_cast<TermId>(base_ + local_.size());
    ids_.emplace(t, id);
    return id;
  }

  TermId intern(const Value& v) { return v ? intern(*v) : rdf::kNoTerm; }

  Value value(TermId id) const {
    if (id == rdf::kNoTerm) return std::nullopt;
    return get(id);
  }

 private:
  const rdf::TermDictionary& dict_;
  std::size_t base_;
  std::deque<Term> local_;
  std::unordered_map<Term, TermId> ids_;
};

using Scope = std::vector<const Graph*>;

// --- numeric helpers ---------------------------------------------------

enum class NumKind { Integer, Decimal, Double };

struct Num {
  NumKind kind;
  double value;
  long long integer = 0;  // exact value when kind == Integer
};

std::optional<Num> numeric(const Value& v) {
  if (!v || !v->isLiteral() || !v->literal().isNumeric()) return std::nullopt;
  const Literal& l = v->literal();
  const std::string& dt = l.datatype().str();
  auto d = rdf::parseNumber(l.lexical());
  if (!d) return std::nullopt;
  if (dt == rdf::xsd::kDouble || dt == rdf::xsd::kFloat) return Num{NumKind::Double, *d};
  if (dt == rdf::xsd::kDecimal) return Num{NumKind::Decimal, *d};
  std::string_view lex = l.lexical();
  if (!lex.empty() && lex.front() == '+') lex.remove_prefix(1);
  long long i = 0;
  auto [p, ec] = std::from_chars(lex.data(), lex.data() + lex.size(), i);
  if (ec != std::errc() || p != lex.data() + lex.size()) return Num{NumKind::Double, *d};
  return Num{NumKind::Integer, *d, i};
}

std::string formatDecimal(double v) {
  char buf[512];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  std::string s(buf, p);
  if (s.find('.') == std::string::npos) s += ".0";
  return s;
}

Value makeNumber(NumKind kind, double v, long long i = 0) {
  if (kind == NumKind::Integer) return Term(rdf::integerLiteral(i));
  if (!std::isfinite(v)) return std::nullopt;
  if (kind == NumKind::Decimal) return Term(rdf::typedLiteral(formatDecimal(v), rdf::xsd::kDecimal));
  return Term(rdf::doubleLiteral(v));
}

NumKind widen(NumKind a, NumKind b) { return std::max(a, b); }

bool isStringLiteral(const Value& v) {
  return v && v->isLiteral() && v->literal().datatype().str() == rdf::xsd::kString;
}

bool isTextual(const Value& v) {
  return v && v->isLiteral() &&
         (v->literal().datatype().str() == rdf::xsd::kString ||
          v->literal().datatype().str() == rdf::kLangString);
}

Value boolean(bool b) { return Term(rdf::booleanLiteral(b)); }

std::optional<bool> ebv(const Value& v) {
  if (!v || !v->isLiteral()) return std::nullopt;
  const Literal& l = v->literal();
  const std::string& dt = l.datatype().str();
  if (dt == rdf::xsd::kBoolean) return l.lexical() == "true" || l.lexical() == "1";
  if (auto n = numeric(v)) return !(n->value == 0 || std::isnan(n->value));
  if (isTextual(v)) return !l.lexical().empty();
  return std::nullopt;
}

// RDFterm equality with numeric value comparison.
std::optional<bool> equals(const Value& a, const Value& b) {
  if (!a || !b) return std::nullopt;
  auto na = numeric(a), nb = numeric(b);
  if (na && nb) return na->value == nb->value;
  return *a == *b;
}

// -1/0/1, or nullopt when the operands are not comparable.
std::optional<int> order(const Value& a, const Value& b) {
  if (!a || !b) return std::nullopt;
  auto na = numeric(a), nb = numeric(b);
  if (na && nb) {
    if (std::isnan(na->value) || std::isnan(nb->value)) return std::nullopt;
    return na->value < nb->value ? -1 : na->value > nb->value ? 1 : 0;
  }
  if (!a->isLiteral() || !b->isLiteral()) return std::nullopt;
  const Literal &la = a->literal(), &lb = b->literal();
  const std::string& dt = la.datatype().str();
  if (dt != lb.datatype().str()) return std::nullopt;
  if (dt != rdf::xsd::kString && dt != rdf::xsd::kDate && dt != rdf::xsd::kDateTime &&
      dt != rdf::xsd::kBoolean)
    return std::nullopt;
  int c = la.lexical().compare(lb.lexical());
  return c < 0 ? -1 : c > 0 ? 1 : 0;
}

std::optional<int> datePart(const Value& v, int which) {
  if (!v || !v->isLiteral()) return std::nullopt;
  const std::string& dt = v->literal().datatype().str();
  if (dt != rdf::xsd::kDate && dt != rdf::xsd::kDateTime) return std::nullopt;
  const std::string& s = v->literal().lexical();
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  const std::size_t off[] = {0, 5, 8}, len[] = {4, 2, 2};
  int out = 0;
  auto [p, ec] = std::from_chars(s.data() + off[which], s.data() + off[which] + len[which], out);
  if (ec != std::errc() || p != s.data() + off[which] + len[which]) return std::nullopt;
  return out;
}

class Evaluator {
 public:
  Evaluator(const Query& q, const rdf::Dataset& data)
      : q_(q), data_(data), terms_(data.dictionary()) {
    all_.push_back(&data.defaultGraph());
    for (const auto& name : data.graphNames()) all_.push_back(data.namedGraph(name));
  }

  ResultTable run();

 private:
  // --- WHERE ---

  static bool triplesOnly(const GroupPattern& g) {
    return std::all_of(g.elements.begin(), g.elements.end(),
                       [](const Element& e) { return std::holds_alternative<TriplePattern>(e); });
  }

  static bool triplesAndFilters(const GroupPattern& g) {
    return std::all_of(g.elements.begin(), g.elements.end(), [](const Element& e) {
      return std::holds_alternative<TriplePattern>(e) || std::holds_alternative<FilterElement>(e);
    });
  }

  std::vector<Row> evalGroup(const GroupPattern& g, const Scope& scope, bool applyFilters = true);
  std::vector<Row> joinBgp(std::vector<Row> input, const std::vector<const TriplePattern*>& bgp,
                           const Scope& scope, const std::vector<ExprPtr>* filters,
                           bool keepUnmatched);
  std::vector<Row> evalGraph(const std::vector<Row>& input, const GraphElement& el);
  void matchScope(const Scope& scope, TermId s, TermId p, TermId o,
                  const std::function<void(const IdTriple&)>& visit) const;
  Row emptyRow() const { return Row(q_.vars.size(), rdf::kNoTerm); }

  static bool compatible(const Row& a, const Row& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != rdf::kNoTerm && b[i] != rdf::kNoTerm && a[i] != b[i]) return false;
    return true;
  }
  static Row merge(Row a, const Row& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] == rdf::kNoTerm) a[i] = b[i];
    return a;
  }

  bool passes(const std::vector<ExprPtr>& filters, const Row& row) {
    for (const auto& f : filters)
      if (ebv(eval(*f, row, nullptr)) != true) return false;
    return true;
  }

  // --- expressions ---

  Value eval(const Expr& e, const Row& row, const std::vector<const Row*>* group);
  Value call(const Expr& e, const Row& row, const std::vector<const Row*>* group);
  Value aggregate(const Expr& e, const std::vector<const Row*>& group);
  const std::regex* regex(const std::string& pattern, const std::string& flags);

  const Query& q_;
  const rdf::Dataset& data_;
  TermTable terms_;
  Scope all_;
  std::map<std::pair<std::string, std::string>, std::optional<std::regex>> regexCache_;
};

void Evaluator::matchScope(const Scope& scope, TermId s, TermId p, TermId o,
                           const std::function<void(const IdTriple&)>& visit) const {
  if (scope.size() == 1) {
    scope[0]->forEachMatch(s, p, o, [&](const IdTriple& t) {
      visit(t);
      return true;
    });
    return;
  }
  // The union of several graphs is a set: collect and drop duplicates.
  std::vector<IdTriple> hits;
  std::size_t contributing = 0;
  for (const Graph* g : scope) {
    std::size_t before = hits.size();
    g->forEachMatch(s, p, o, [&](const IdTriple& t) {
      hits.push_back(t);
      return true;
    });
    if (hits.size() > before) ++contributing;
  }
  if (contributing > 1) {
    auto key = [](const IdTriple& t) { return std::tie(t.s, t.p, t.o); };
    std::sort(hits.begin(), hits.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  }
  for (const auto& t : hits) visit(t);
}

std::vector<Row> Evaluator::joinBgp(std::vector<Row> input,
                                    const std::vector<const TriplePattern*>& bgp,
                                    const Scope& scope, const std::vector<ExprPtr>* filters,
                                    bool keepUnmatched) {
  struct Slot {
    bool isVar;
    std::size_t var;
    TermId id;  // constant id; kNoTerm when the constant is not in the data
  };
  struct Compiled {
    Slot pos[3];
    bool impossible = false;
  };
  std::vector<Compiled> pats;
  bool impossible = false;
  for (const TriplePattern* tp : bgp) {
    Compiled c;
    const PatternTerm* src[3] = {&tp->s, &tp->p, &tp->o};
    for (int i = 0; i < 3; ++i) {
      if (auto* v = std::get_if<Var>(src[i])) {
        c.pos[i] = {true, v->slot, rdf::kNoTerm};
      } else {
        auto id = terms_.find(std::get<Term>(*src[i]));
        c.pos[i] = {false, 0, id.value_or(rdf::kNoTerm)};
        if (!id) impossible = true;
      }
    }
    pats.push_back(c);
  }

  // Greedy order: cheapest pattern first, then repeatedly the cheapest
  // remaining one, treating variables bound so far as selective.
  std::vector<bool> bound(q_.vars.size(), false);
  if (!input.empty())
    for (std::size_t v = 0; v < bound.size(); ++v)
      bound[v] = std::all_of(input.begin(), input.end(),
                             [&](const Row& r) { return r[v] != rdf::kNoTerm; });
  std::vector<std::size_t> order;
  std::vector<bool> used(pats.size(), false);
  if (!impossible) {
    std::vector<double> base(pats.size());
    for (std::size_t k = 0; k < pats.size(); ++k) {
      const auto& c = pats[k];
      std::size_t n = 0;
      for (const Graph* g : scope)
        n += g->estimate(c.pos[0].isVar ? rdf::kNoTerm : c.pos[0].id,
                         c.pos[1].isVar ? rdf::kNoTerm : c.pos[1].id,
                         c.pos[2].isVar ? rdf::kNoTerm : c.pos[2].id, 100000);
      base[k] = static_cast<double>(n);
    }
    for (std::size_t step = 0; step < pats.size(); ++step) {
      std::size_t best = pats.size();
      double bestCost = 0;
      for (std::size_t k = 0; k < pats.size(); ++k) {
        if (used[k]) continue;
        double cost = base[k];
        for (const auto& s : pats[k].pos)
          if (s.isVar && bound[s.var]) cost /= 1000.0;
        if (best == pats.size() || cost < bestCost) best = k, bestCost = cost;
      }
      used[best] = true;
      order.push_back(best);
      for (const auto& s : pats[best].pos)
        if (s.isVar) bound[s.var] = true;
    }
  }

  std::vector<Row> out;
  std::vector<Row> produced;
  std::function<void(std::size_t, Row&)> step = [&](std::size_t k, Row& row) {
    if (k == order.size()) {
      produced.push_back(row);
      return;
    }
    const Compiled& c = pats[order[k]];
    TermId ids[3];
    for (int i = 0; i < 3; ++i) ids[i] = c.pos[i].isVar ? row[c.pos[i].var] : c.pos[i].id;
    matchScope(scope, ids[0], ids[1], ids[2], [&](const IdTriple& t) {
      const TermId got[3] = {t.s, t.p, t.o};
      std::size_t newly[3];
      int n = 0;
      bool ok = true;
      for (int i = 0; i < 3 && ok; ++i) {
        if (!c.pos[i].isVar) continue;
        TermId& slot = row[c.pos[i].var];
        if (slot == rdf::kNoTerm) {
          slot = got[i];
          newly[n++] = c.pos[i].var;
        } else if (slot != got[i]) {
          ok = false;
        }
      }
      if (ok) step(k + 1, row);
      for (int i = 0; i < n; ++i) row[newly[i]] = rdf::kNoTerm;
    });
  };

  for (Row& row : input) {
    produced.clear();
    if (!impossible) step(0, row);
    bool any = false;
    for (Row& r : produced) {
      if (filters && !passes(*filters, r)) continue;
      any = true;
      out.push_back(std::move(r));
    }
    if (!any && keepUnmatched) out.push_back(std::move(row));
  }
  return out;
}

std::vector<Row> Evaluator::evalGraph(const std::vector<Row>& input, const GraphElement& el) {
  // Candidate (graph, name id) pairs.
  std::vector<std::pair<const Graph*, TermId>> graphs;
  const Var* gv = std::get_if<Var>(&el.graph);
  if (!gv) {
    const Term& name = std::get<Term>(el.graph);
    if (const Graph* g = name.isIri() ? data_.namedGraph(name.iri()) : nullptr)
      graphs.emplace_back(g, rdf::kNoTerm);
  } else {
    for (const auto& name : data_.graphNames())
      graphs.emplace_back(data_.namedGraph(name), terms_.intern(Term(name)));
  }

  std::vector<Row> out;
  if (triplesOnly(*el.group)) {
    std::vector<const TriplePattern*> bgp;
    for (const auto& e : el.group->elements) bgp.push_back(&std::get<TriplePattern>(e));
    for (const auto& [g, nameId] : graphs) {
      std::vector<Row> seeds;
      for (const Row& r : input) {
        if (!gv) {
          seeds.push_back(r);
        } else if (r[gv->slot] == rdf::kNoTerm || r[gv->slot] == nameId) {
          Row seeded = r;
          seeded[gv->slot] = nameId;
          seeds.push_back(std::move(seeded));
        }
      }
      if (seeds.empty()) continue;
      for (Row& r : joinBgp(std::move(seeds), bgp, {g}, nullptr, false)) out.push_back(std::move(r));
    }
    return out;
  }

  std::vector<Row> inner;
  for (const auto& [g, nameId] : graphs) {
    for (Row& r : evalGroup(*el.group, {g})) {
      if (gv) {
        if (r[gv->slot] != rdf::kNoTerm && r[gv->slot] != nameId) continue;
        r[gv->slot] = nameId;
      }
      inner.push_back(std::move(r));
    }
  }
  for (const Row& a : input)
    for (const Row& b : inner)
      if (compatible(a, b)) out.push_back(merge(a, b));
  return out;
}

std::vector<Row> Evaluator::evalGroup(const GroupPattern& g, const Scope& scope, bool applyFilters) {
  std::vector<Row> current{emptyRow()};
  std::vector<ExprPtr> filters;
  std::vector<const TriplePattern*> bgp;

  auto flush = [&] {
    if (bgp.empty()) return;
    current = joinBgp(std::move(current), bgp, scope, nullptr, false);
    bgp.clear();
  };

  for (const Element& el : g.elements) {
    if (auto* tp = std::get_if<TriplePattern>(&el)) {
      bgp.push_back(tp);
      continue;
    }
    if (auto* f = std::get_if<FilterElement>(&el)) {
      filters.push_back(f->expr);
      continue;
    }
    flush();
    if (auto* opt = std::get_if<OptionalElement>(&el)) {
      const GroupPattern& inner = *opt->group;
      std::vector<ExprPtr> innerFilters;
      for (const auto& e : inner.elements)
        if (auto* f = std::get_if<FilterElement>(&e)) innerFilters.push_back(f->expr);
      if (triplesAndFilters(inner)) {
        std::vector<const TriplePattern*> innerBgp;
        for (const auto& e : inner.elements)
          if (auto* t = std::get_if<TriplePattern>(&e)) innerBgp.push_back(t);
        current = joinBgp(std::move(current), innerBgp, scope, &innerFilters, true);
      } else {
        // Left join against the independently evaluated group; its own
        // top-level filters become the join condition.
        std::vector<Row> right = evalGroup(inner, scope, false);
        std::vector<Row> next;
        for (Row& a : current) {
          bool any = false;
          for (const Row& b : right) {
            if (!compatible(a, b)) continue;
            Row m = merge(a, b);
            if (!passes(innerFilters, m)) continue;
            any = true;
            next.push_back(std::move(m));
          }
          if (!any) next.push_back(std::move(a));
        }
        current = std::move(next);
      }
    } else if (auto* gr = std::get_if<GraphElement>(&el)) {
      current = evalGraph(current, *gr);
    } else if (auto* sub = std::get_if<SubGroupElement>(&el)) {
      if (triplesOnly(*sub->group)) {
        for (const auto& e : sub->group->elements) bgp.push_back(&std::get<TriplePattern>(e));
        flush();
      } else {
        std::vector<Row> right = evalGroup(*sub->group, scope);
        std::vector<Row> next;
        for (const Row& a : current)
          for (const Row& b : right)
            if (compatible(a, b)) next.push_back(merge(a, b));
        current = std::move(next);
      }
    }
  }
  flush();
  if (applyFilters && !filters.empty()) {
    std::vector<Row> kept;
    for (Row& r : current)
      if (passes(filters, r)) kept.push_back(std::move(r));
    current = std::move(kept);
  }
  return current;
}

// --- expressions ---------------------------------------------------------

const std::regex* Evaluator::regex(const std::string& pattern, const std::string& flags) {
  auto key = std::make_pair(pattern, flags);
  auto it = regexCache_.find(key);
  if (it == regexCache_.end()) {
    std::optional<std::regex> re;
    try {
      auto f = std::regex::ECMAScript;
      if (flags.find('i') != std::string::npos) f |= std::regex::icase;
      re.emplace(pattern, f);
    } catch (const std::regex_error&) {
    }
    it = regexCache_.emplace(std::move(key), std::move(re)).first;
  }
  return it->second ? &*it->second : nullptr;
}

Value Evaluator::call(const Expr& e, const Row& row, const std::vector<const Row*>* group) {
  const std::string& fn = e.name;
  if (fn == "BOUND") return boolean(row[e.args[0]->slot] != rdf::kNoTerm);
  Value a = eval(*e.args[0], row, group);
  if (!a) return std::nullopt;
  if (fn == "STR") {
    return Term(Literal(a->isIri() ? a->iri().str() : a->literal().lexical()));
  }
  if (fn == "LANG") {
    if (!a->isLiteral()) return std::nullopt;
    return Term(Literal(a->literal().lang().value_or("")));
  }
  if (fn == "DATATYPE") {
    if (!a->isLiteral()) return std::nullopt;
    return Term(a->literal().datatype());
  }
  if (fn == "YEAR" || fn == "MONTH" || fn == "DAY") {
    auto v = datePart(a, fn == "YEAR" ? 0 : fn == "MONTH" ? 1 : 2);
    if (!v) return std::nullopt;
    return Term(rdf::integerLiteral(*v));
  }
  if (fn == "REGEX") {
    if (!isTextual(a)) return std::nullopt;
    Value pat = eval(*e.args[1], row, group);
    if (!isStringLiteral(pat)) return std::nullopt;
    std::string flags;
    if (e.args.size() == 3) {
      Value f = eval(*e.args[2], row, group);
      if (!isStringLiteral(f)) return std::nullopt;
      flags = f->literal().lexical();
    }
    const std::regex* re = regex(pat->literal().lexical(), flags);
    if (!re) return std::nullopt;
    return boolean(std::regex_search(a->literal().lexical(), *re));
  }
  return std::nullopt;
}

Value Evaluator::aggregate(const Expr& e, const std::vector<const Row*>& group) {
  if (e.star) {
    if (!e.distinct) return Term(rdf::integerLiteral(static_cast<long long>(group.size())));
    std::set<Row> seen;
    for (const Row* r : group) seen.insert(*r);
    return Term(rdf::integerLiteral(static_cast<long long>(seen.size())));
  }
  // Unbound and erroring members are skipped.
  std::vector<Term> values;
  std::set<TermId> seen;
  for (const Row* r : group) {
    Value v = eval(*e.args[0], *r, nullptr);
    if (!v) continue;
    if (e.distinct && !seen.insert(terms_.intern(*v)).second) continue;
    values.push_back(std::move(*v));
  }
  if (e.name == "COUNT") return Term(rdf::integerLiteral(static_cast<long long>(values.size())));
  if (e.name == "MIN" || e.name == "MAX") {
    if (values.empty()) return std::nullopt;
    const bool min = e.name == "MIN";
    const Term* best = &values[0];
    for (const Term& t : values) {
      int c = compareTerms(t, *best);
      if (min ? c < 0 : c > 0) best = &t;
    }
    return *best;
  }
  // SUM / AVG: any non-numeric member leaves the aggregate unbound.
  NumKind kind = NumKind::Integer;
  double sum = 0;
  long long isum = 0;
  bool intOverflow = false;
  for (const Term& t : values) {
    auto n = numeric(t);
    if (!n) return std::nullopt;
    kind = widen(kind, n->kind);
    sum += n->value;
    if (n->kind == NumKind::Integer && __builtin_add_overflow(isum, n->integer, &isum))
      intOverflow = true;
  }
  if (e.name == "SUM") {
    if (kind == NumKind::Integer && !intOverflow) return makeNumber(kind, sum, isum);
    return makeNumber(kind == NumKind::Integer ? NumKind::Decimal : kind, sum);
  }
  if (values.empty()) return Term(rdf::integerLiteral(0));
  double avg = (kind == NumKind::Integer && !intOverflow ? static_cast<double>(isum) : sum) /
               static_cast<double>(values.size());
  return makeNumber(kind == NumKind::Double ? NumKind::Double : NumKind::Decimal, avg);
}

Value Evaluator::eval(const Expr& e, const Row& row, const std::vector<const Row*>* group) {
  using Op = Expr::Op;
  switch (e.op) {
    case Op::Const: return e.value;
    case Op::Var: return terms_.value(row[e.slot]);
    case Op::Aggregate:
      if (!group) return std::nullopt;
      return aggregate(e, *group);
    case Op::Call: return call(e, row, group);
    case Op::Or: {
      auto a = ebv(eval(*e.args[0], row, group)), b = ebv(eval(*e.args[1], row, group));
      if (a == true || b == true) return boolean(true);
      if (a == false && b == false) return boolean(false);
      return std::nullopt;
    }
    case Op::And: {
      auto a = ebv(eval(*e.args[0], row, group)), b = ebv(eval(*e.args[1], row, group));
      if (a == false || b == false) return boolean(false);
      if (a == true && b == true) return boolean(true);
      return std::nullopt;
    }
    case Op::Not: {
      auto a = ebv(eval(*e.args[0], row, group));
      if (!a) return std::nullopt;
      return boolean(!*a);
    }
    case Op::Eq:
    case Op::Ne: {
      auto r = equals(eval(*e.args[0], row, group), eval(*e.args[1], row, group));
      if (!r) return std::nullopt;
      return boolean(e.op == Op::Eq ? *r : !*r);
    }
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: {
      auto c = order(eval(*e.args[0], row, group), eval(*e.args[1], row, group));
      if (!c) return std::nullopt;
      switch (e.op) {
        case Op::Lt: return boolean(*c < 0);
        case Op::Le: return boolean(*c <= 0);
        case Op::Gt: return boolean(*c > 0);
        default: return boolean(*c >= 0);
      }
    }
    case Op::Neg:
    case Op::Plus: {
      auto n = numeric(eval(*e.args[0], row, group));
      if (!n) return std::nullopt;
      if (e.op == Op::Plus) return makeNumber(n->kind, n->value, n->integer);
      if (n->kind == NumKind::Integer && n->integer == std::numeric_limits<long long>::min())
        return std::nullopt;
      return makeNumber(n->kind, -n->value, -n->integer);
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      auto a = numeric(eval(*e.args[0], row, group));
      auto b = numeric(eval(*e.args[1], row, group));
      if (!a || !b) return std::nullopt;
      NumKind kind = widen(a->kind, b->kind);
      if (kind == NumKind::Integer && e.op != Op::Div) {
        long long r = 0;
        bool overflow = e.op == Op::Add   ? __builtin_add_overflow(a->integer, b->integer, &r)
                        : e.op == Op::Sub ? __builtin_sub_overflow(a->integer, b->integer, &r)
                                          : __builtin_mul_overflow(a->integer, b->integer, &r);
        if (overflow) return std::nullopt;
        return makeNumber(kind, static_cast<double>(r), r);
      }
      if (e.op == Op::Div) {
        if (b->value == 0) return std::nullopt;
        if (kind == NumKind::Integer) kind = NumKind::Decimal;
      }
      double r = e.op == Op::Add   ? a->value + b->value
                 : e.op == Op::Sub ? a->value - b->value
                 : e.op == Op::Mul ? a->value * b->value
                                   : a->value / b->value;
      return makeNumber(kind, r);
    }
  }
  return std::nullopt;
}

// --- solution modifiers --------------------------------------------------

ResultTable Evaluator::run() {
  std::vector<Row> rows = evalGroup(q_.where, all_);

  std::vector<Row> out;                     // full-width rows after grouping/extension
  std::vector<std::vector<TermId>> keys;    // ORDER BY values per output row

  if (q_.aggregating) {
    std::vector<std::vector<TermId>> groupKeys;
    std::vector<std::vector<const Row*>> groups;
    std::map<std::vector<TermId>, std::size_t> index;
    for (const Row& r : rows) {
      std::vector<TermId> key;
      for (const auto& k : q_.groupBy) key.push_back(terms_.intern(eval(*k.expr, r, nullptr)));
      auto [it, fresh] = index.emplace(key, groups.size());
      if (fresh) {
        groupKeys.push_back(std::move(key));
        groups.emplace_back();
      }
      groups[it->second].push_back(&r);
    }
    if (q_.groupBy.empty() && groups.empty()) {
      groupKeys.emplace_back();
      groups.emplace_back();
    }
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      Row row = emptyRow();
      for (std::size_t k = 0; k < q_.groupBy.size(); ++k) {
        const auto& key = q_.groupBy[k];
        if (key.alias) row[*key.alias] = groupKeys[gi][k];
        else if (key.expr->op == Expr::Op::Var) row[key.expr->slot] = groupKeys[gi][k];
      }
      for (const auto& item : q_.select)
        if (item.expr) row[item.slot] = terms_.intern(eval(*item.expr, row, &groups[gi]));
      bool keep = true;
      for (const auto& h : q_.having)
        if (ebv(eval(*h, row, &groups[gi])) != true) keep = false;
      if (!keep) continue;
      std::vector<TermId> k;
      for (const auto& o : q_.orderBy) k.push_back(terms_.intern(eval(*o.expr, row, &groups[gi])));
      keys.push_back(std::move(k));
      out.push_back(std::move(row));
    }
  } else {
    for (Row& r : rows) {
      for (const auto& item : q_.select)
        if (item.expr) r[item.slot] = terms_.intern(eval(*item.expr, r, nullptr));
      std::vector<TermId> k;
      for (const auto& o : q_.orderBy) k.push_back(terms_.intern(eval(*o.expr, r, nullptr)));
      keys.push_back(std::move(k));
      out.push_back(std::move(r));
    }
  }

  std::vector<std::size_t> idx(out.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  if (!q_.orderBy.empty()) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      for (std::size_t k = 0; k < q_.orderBy.size(); ++k) {
        int c = compareTerms(terms_.value(keys[a][k]), terms_.value(keys[b][k]));
        if (c != 0) return q_.orderBy[k].descending ? c > 0 : c < 0;
      }
      return false;
    });
  }

  ResultTable table;
  for (const auto& item : q_.select) table.vars.push_back(q_.vars[item.slot]);
  std::set<std::vector<TermId>> seen;
  std::size_t skipped = 0;
  for (std::size_t i : idx) {
    if (q_.limit && table.rows.size() >= *q_.limit) break;
    std::vector<TermId> projected;
    for (const auto& item : q_.select) projected.push_back(out[i][item.slot]);
    if (q_.distinct && !seen.insert(projected).second) continue;
    if (skipped < q_.offset) {
      ++skipped;
      continue;
    }
    std::vector<std::optional<Term>> values;
    for (TermId id : projected) values.push_back(terms_.value(id));
    table.rows.push_back(std::move(values));
  }
  return table;
}

int rank(const std::optional<Term>& t) {
  if (!t) return 0;
  if (t->isIri()) return 1;
  return t->literal().isNumeric() && rdf::parseNumber(t->literal().lexical()) ? 2 : 3;
}

int cmp(const std::string& a, const std::string& b) {
  int c = a.compare(b);
  return c < 0 ? -1 : c > 0 ? 1 : 0;
}

}  // namespace

int compareTerms(const std::optional<Term>& a, const std::optional<Term>& b) {
  int ra = rank(a), rb = rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (ra == 0) return 0;
  if (ra == 1) return cmp(a->iri().str(), b->iri().str());
  const Literal &la = a->literal(), &lb = b->literal();
  if (ra == 2) {
    double x = *rdf::parseNumber(la.lexical()), y = *rdf::parseNumber(lb.lexical());
    // NaN sorts after every number.
    bool nx = std::isnan(x), ny = std::isnan(y);
    if (nx != ny) return nx ? 1 : -1;
    if (!nx && x != y) return x < y ? -1 : 1;
  }
  if (int c = cmp(la.lexical(), lb.lexical())) return c;
  if (int c = cmp(la.datatype().str(), lb.datatype().str())) return c;
  return cmp(la.lang().value_or(""), lb.lang().value_or(""));
}

std::optional<std::size_t> ResultTable::column(std::string_view var) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == var) return i;
  return std::nullopt;
}

ResultTable evaluate(const Query& query, const rdf::Dataset& data) {
  return Evaluator(query, data).run();
}

ResultTable execute(std::string_view text, const rdf::Dataset& data) {
  return evaluate(parseQuery(text), data);
}

}  // namespace linkclimate::sparql
