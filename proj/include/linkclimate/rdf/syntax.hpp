#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkclimate/rdf/dataset.hpp"
#include "linkclimate/rdf/term.hpp"

namespace linkclimate::rdf {

// Parse failure with a 1-based position.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

struct Quad {
  std::optional<Iri> graph;  // nullopt = default graph
  Triple triple;
};

using PrefixMap = std::vector<std::pair<std::string, std::string>>;  // prefix -> namespace

// All parsers are all-or-nothing: they return every statement or throw.
std::vector<Triple> parseNTriples(std::string_view text);
// N-Triples lines optionally carrying a fourth graph IRI.
std::vector<Quad> parseNQuads(std::string_view text);
// N-Triples plus @prefix/PREFIX, prefixed names, `a`, `;` and `,` lists,
// and bare numeric/boolean literals. No blank nodes or collections.
std::vector<Triple> parseTurtle(std::string_view text);

// Canonical N-Triples: deduplicated, sorted by (subject, predicate, object
// serialization), one " .\n"-terminated line per triple.
std::string serializeNTriples(std::span<const Triple> triples);

// Default graph lines first, then each named graph (sorted by name) as
// graph-labelled lines; each section canonically ordered.
std::string serializeNQuads(const Dataset& data);

// Prefixed, subject-grouped Turtle. Readable back with parseTurtle.
std::string serializeTurtle(std::span<const Triple> triples, const PrefixMap& prefixes);

}  // namespace linkclimate::rdf
