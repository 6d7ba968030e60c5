#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "linkclimate/rdf/dataset.hpp"
#include "linkclimate/rdf/syntax.hpp"
#include "linkclimate/rdf/term.hpp"

namespace linkclimate::sparql {

// Query text error; position is 1-based and points at the offending token.
class QuerySyntaxError : public rdf::SyntaxError {
 public:
  using rdf::SyntaxError::SyntaxError;
};

// A variable is an index into Query::vars.
struct Var {
  std::size_t slot = 0;
  friend bool operator==(const Var&, const Var&) = default;
};

using PatternTerm = std::variant<Var, rdf::Term>;

struct TriplePattern {
  PatternTerm s, p, o;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op {
    Var, Const,
    Or, And, Not,
    Eq, Ne, Lt, Le, Gt, Ge,
    Add, Sub, Mul, Div, Neg, Plus,
    Call,       // name = REGEX, STR, LANG, DATATYPE, BOUND, YEAR, MONTH, DAY
    Aggregate,  // name = COUNT, SUM, AVG, MIN, MAX
  };
  Op op = Op::Const;
  std::size_t slot = 0;             // Var
  std::optional<rdf::Term> value;   // Const
  std::string name;                 // Call / Aggregate
  std::vector<ExprPtr> args;
  bool distinct = false;            // COUNT(DISTINCT ...)
  bool star = false;                // COUNT(*)
};

struct GroupPattern;
using GroupPtr = std::shared_ptr<const GroupPattern>;

struct FilterElement {
  ExprPtr expr;
};
struct OptionalElement {
  GroupPtr group;
};
struct GraphElement {
  PatternTerm graph;  // Var or IRI
  GroupPtr group;
};
struct SubGroupElement {
  GroupPtr group;
};

using Element =
    std::variant<TriplePattern, FilterElement, OptionalElement, GraphElement, SubGroupElement>;

struct GroupPattern {
  std::vector<Element> elements;  // source order
};

struct SelectItem {
  std::size_t slot = 0;
  ExprPtr expr;  // null for a plain variable
};

struct GroupKey {
  ExprPtr expr;
  std::optional<std::size_t> alias;  // GROUP BY (expr AS ?v)
};

struct OrderKey {
  ExprPtr expr;
  bool descending = false;
};

struct Query {
  std::vector<std::pair<std::string, std::string>> prefixes;
  std::vector<std::string> vars;  // slot -> name (without '?')
  bool selectAll = false;
  bool distinct = false;
  std::vector<SelectItem> select;  // resolved for SELECT * too
  GroupPattern where;
  std::vector<GroupKey> groupBy;
  std::vector<ExprPtr> having;
  std::vector<OrderKey> orderBy;
  std::optional<std::size_t> limit;
  std::size_t offset = 0;

  // True when grouping applies (GROUP BY present or aggregates used).
  bool aggregating = false;

  std::size_t tripleCount() const;
};

Query parseQuery(std::string_view text);

// Variable bindings in projection order; nullopt = unbound.
struct ResultTable {
  std::vector<std::string> vars;
  std::vector<std::vector<std::optional<rdf::Term>>> rows;

  std::optional<std::size_t> column(std::string_view var) const;
};

ResultTable evaluate(const Query& query, const rdf::Dataset& data);

// Parse and evaluate in one step.
ResultTable execute(std::string_view text, const rdf::Dataset& data);

// Total order used by ORDER BY, MIN and MAX: unbound < IRIs < numeric
// literals (by value) < other literals (lexical, then datatype, then tag).
int compareTerms(const std::optional<rdf::Term>& a, const std::optional<rdf::Term>& b);

// SPARQL 1.1 results formats.
std::string toSparqlJson(const ResultTable& table);
std::string toCsv(const ResultTable& table);
// Throws std::runtime_error on a document that is not a results object.
ResultTable fromSparqlJson(std::string_view body);

}  // namespace linkclimate::sparql
