#include "linkclimate/rdf/term.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace linkclimate::rdf {

namespace {

bool forbiddenIriChar(unsigned char c) {
  if (c <= 0x20) return true;
  switch (c) {
    case '<': case '>': case '"': case '{': case '}':
    case '|': case '^': case '`': case '\\':
      return true;
    default:
      return false;
  }
}

bool isIntegerLexical(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

bool isDecimalLexical(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  bool digits = false, dot = false;
  for (char c : s) {
    if (c >= '0' && c <= '9') {
      digits = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      return false;
    }
  }
  return digits;
}

constexpr std::array<std::string_view, 13> kIntegerTypes = {
    "integer", "int", "long", "short", "byte",
    "nonNegativeInteger", "nonPositiveInteger", "positiveInteger",
    "negativeInteger", "unsignedInt", "unsignedLong", "unsignedShort",
    "unsignedByte"};

bool isIntegerDatatype(std::string_view dt) {
  if (!dt.starts_with(xsd::kNs)) return false;
  dt.remove_prefix(xsd::kNs.size());
  for (auto t : kIntegerTypes)
    if (dt == t) return true;
  return false;
}

bool lexicalMatchesDatatype(std::string_view lexical, std::string_view dt) {
  if (isIntegerDatatype(dt)) return isIntegerLexical(lexical);
  if (dt == xsd::kDecimal) return isDecimalLexical(lexical);
  if (dt == xsd::kDouble || dt == xsd::kFloat) return parseNumber(lexical).has_value();
  return true;
}

}  // namespace

Iri::Iri(std::string value) : value_(std::move(value)) {
  if (!isValid(value_)) throw InvalidTerm("invalid IRI: <" + value_ + ">");
}

std::optional<Iri> Iri::tryMake(std::string value) {
  if (!isValid(value)) return std::nullopt;
  return Iri(std::move(value), Unchecked{});
}

bool Iri::isValid(std::string_view value) {
  if (value.empty()) return false;
  for (unsigned char c : value)
    if (forbiddenIriChar(c)) return false;
  auto colon = value.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  for (std::size_t i = 0; i < colon; ++i) {
    char c = value[i];
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (i > 0 && ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.'));
    if (!ok) return false;
  }
  if (value.substr(colon).starts_with("://")) return value.size() > colon + 3;
  if (value.substr(0, colon) == "urn") {
    auto rest = value.substr(colon + 1);
    auto nssColon = rest.find(':');
    return nssColon != std::string_view::npos && nssColon > 0 && nssColon + 1 < rest.size();
  }
  return false;
}

bool isNumericDatatype(std::string_view datatype) {
  return isIntegerDatatype(datatype) || datatype == xsd::kDecimal ||
         datatype == xsd::kDouble || datatype == xsd::kFloat;
}

std::optional<double> parseNumber(std::string_view s) {
  if (s == "INF" || s == "+INF") return HUGE_VAL;
  if (s == "-INF") return -HUGE_VAL;
  if (s == "NaN") return std::nan("");
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  // from_chars would accept "inf"/"nan" spellings that XSD does not.
  for (char c : s) {
    bool ok = (c >= '0' && c <= '9') || c == '.' || c == 'e' || c == 'E' ||
              c == '-' || c == '+';
    if (!ok) return std::nullopt;
  }
  double out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return out;
}

Literal::Literal(std::string lexical)
    : lexical_(std::move(lexical)), datatype_(std::string(xsd::kString)) {}

Literal::Literal(std::string lexical, Iri datatype)
    : Literal(std::move(lexical), std::move(datatype), std::nullopt) {}

Literal::Literal(std::string lexical, Iri datatype, std::optional<std::string> lang)
    : lexical_(std::move(lexical)), datatype_(std::move(datatype)), lang_(std::move(lang)) {
  bool isLangString = datatype_.str() == kLangString;
  if (lang_.has_value() != isLangString)
    throw InvalidTerm("language tag requires rdf:langString and vice versa");
  if (lang_ && lang_->empty()) throw InvalidTerm("empty language tag");
  if (!lexicalMatchesDatatype(lexical_, datatype_.str()))
    throw InvalidTerm("lexical form \"" + lexical_ + "\" is not valid for <" +
                      datatype_.str() + ">");
}

Literal Literal::langString(std::string lexical, std::string lang) {
  return Literal(std::move(lexical), Iri(std::string(kLangString)), std::move(lang));
}

std::optional<double> Literal::numericValue() const {
  if (!isNumeric()) return std::nullopt;
  return parseNumber(lexical_);
}

Literal typedLiteral(std::string lexical, std::string_view datatype) {
  return Literal(std::move(lexical), Iri(std::string(datatype)));
}

std::string formatDouble(double value) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "INF" : "-INF";
  if (value == 0) return "0";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

Literal doubleLiteral(double value) { return typedLiteral(formatDouble(value), xsd::kDouble); }

Literal integerLiteral(long long value) {
  return typedLiteral(std::to_string(value), xsd::kInteger);
}

Literal booleanLiteral(bool value) {
  return typedLiteral(value ? "true" : "false", xsd::kBoolean);
}

std::string escapeLiteral(std::string_view lexical) {
  std::string out;
  out.reserve(lexical.size() + 2);
  for (unsigned char c : lexical) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04X", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string toNTriples(const Term& term) {
  if (const Iri* iri = term.asIri()) return "<" + iri->str() + ">";
  const Literal& lit = term.literal();
  std::string out = "\"" + escapeLiteral(lit.lexical()) + "\"";
  if (lit.lang()) {
    out += "@" + *lit.lang();
  } else if (lit.datatype().str() != xsd::kString) {
    out += "^^<" + lit.datatype().str() + ">";
  }
  return out;
}

Triple Triple::make(const Term& s, const Term& p, Term o) {
  if (!s.isIri()) throw InvalidTerm("literal in subject position");
  if (!p.isIri()) throw InvalidTerm("literal in predicate position");
  return Triple{s.iri(), p.iri(), std::move(o)};
}

}  // namespace linkclimate::rdf

std::size_t std::hash<linkclimate::rdf::Term>::operator()(
    const linkclimate::rdf::Term& t) const noexcept {
  std::hash<std::string> h;
  if (const auto* iri = t.asIri()) return h(iri->str());
  const auto& lit = t.literal();
  std::size_t seed = h(lit.lexical()) ^ 0x9e3779b97f4a7c15ULL;
  seed ^= h(lit.datatype().str()) + 0x9e3779b9 + (seed << 6) + (seed >> 2);
  if (lit.lang()) seed ^= h(*lit.lang()) + 0x9e3779b9 + (seed << 6) + (seed >> 2);
  return seed;
}

std::size_t std::hash<linkclimate::rdf::Triple>::operator()(
    const linkclimate::rdf::Triple& t) const noexcept {
  std::size_t seed = std::hash<linkclimate::rdf::Iri>{}(t.subject);
  seed ^= std::hash<linkclimate::rdf::Iri>{}(t.predicate) + 0x9e3779b9 + (seed << 6) + (seed >> 2);
  seed ^= std::hash<linkclimate::rdf::Term>{}(t.object) + 0x9e3779b9 + (seed << 6) + (seed >> 2);
  return seed;
}
