#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace linkclimate::rdf {

// Thrown when a value cannot be represented as a well-formed RDF term.
class InvalidTerm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Absolute IRI. Construction validates: non-empty, "scheme://" or "urn:"
// form, and none of the characters N-Triples forbids inside <...>.
class Iri {
 public:
  explicit Iri(std::string value);

  // Returns nullopt instead of throwing.
  static std::optional<Iri> tryMake(std::string value);
  static bool isValid(std::string_view value);

  const std::string& str() const noexcept { return value_; }

  friend bool operator==(const Iri&, const Iri&) = default;
  friend auto operator<=>(const Iri&, const Iri&) = default;

 private:
  struct Unchecked {};
  Iri(std::string value, Unchecked) : value_(std::move(value)) {}
  std::string value_;
};

namespace xsd {
inline constexpr std::string_view kNs = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kString = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kBoolean = "http://www.w3.org/2001/XMLSchema#boolean";
inline constexpr std::string_view kInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kDouble = "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view kFloat = "http://www.w3.org/2001/XMLSchema#float";
inline constexpr std::string_view kDate = "http://www.w3.org/2001/XMLSchema#date";
inline constexpr std::string_view kDateTime = "http://www.w3.org/2001/XMLSchema#dateTime";
}  // namespace xsd

inline constexpr std::string_view kLangString =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

// True for xsd:integer, xsd:decimal, xsd:double, xsd:float and the derived
// integer types.
bool isNumericDatatype(std::string_view datatype);

// Parses a numeric lexical form ("12", "-3.5", "1e3", "INF", "NaN").
std::optional<double> parseNumber(std::string_view lexical);

class Literal {
 public:
  // Plain xsd:string literal.
  explicit Literal(std::string lexical);
  Literal(std::string lexical, Iri datatype);
  static Literal langString(std::string lexical, std::string lang);

  const std::string& lexical() const noexcept { return lexical_; }
  const Iri& datatype() const noexcept { return datatype_; }
  const std::optional<std::string>& lang() const noexcept { return lang_; }

  bool isNumeric() const { return isNumericDatatype(datatype_.str()); }
  std::optional<double> numericValue() const;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;

 private:
  Literal(std::string lexical, Iri datatype, std::optional<std::string> lang);

  std::string lexical_;
  Iri datatype_;
  std::optional<std::string> lang_;
};

// Convenience constructors used throughout the mappers.
Literal typedLiteral(std::string lexical, std::string_view datatype);
Literal doubleLiteral(double value);
Literal integerLiteral(long long value);
Literal booleanLiteral(bool value);

// Shortest lexical form that round-trips the double ("48.8", "0", "-6.35").
std::string formatDouble(double value);

// An RDF term. Blank nodes do not exist in this system.
class Term {
 public:
  Term(Iri iri) : value_(std::move(iri)) {}          // NOLINT(implicit)
  Term(Literal literal) : value_(std::move(literal)) {}  // NOLINT(implicit)

  bool isIri() const noexcept { return std::holds_alternative<Iri>(value_); }
  bool isLiteral() const noexcept { return std::holds_alternative<Literal>(value_); }
  const Iri& iri() const { return std::get<Iri>(value_); }
  const Literal& literal() const { return std::get<Literal>(value_); }
  const Iri* asIri() const noexcept { return std::get_if<Iri>(&value_); }
  const Literal* asLiteral() const noexcept { return std::get_if<Literal>(&value_); }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;

 private:
  std::variant<Iri, Literal> value_;
};

// N-Triples surface form of a term: <iri> or "lex"@lang / "lex"^^<dt>.
// xsd:string literals are written without a datatype.
std::string toNTriples(const Term& term);
std::string escapeLiteral(std::string_view lexical);

struct Triple {
  Iri subject;
  Iri predicate;
  Term object;

  // Builds a triple from arbitrary terms; throws InvalidTerm when a literal
  // lands in subject or predicate position.
  static Triple make(const Term& s, const Term& p, Term o);

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

}  // namespace linkclimate::rdf

template <>
struct std::hash<linkclimate::rdf::Iri> {
  std::size_t operator()(const linkclimate::rdf::Iri& iri) const noexcept {
    return std::hash<std::string>{}(iri.str());
  }
};

template <>
struct std::hash<linkclimate::rdf::Term> {
  std::size_t operator()(const linkclimate::rdf::Term& t) const noexcept;
};

template <>
struct std::hash<linkclimate::rdf::Triple> {
  std::size_t operator()(const linkclimate::rdf::Triple& t) const noexcept;
};
