#include <cctype>
#include <map>

#include "linkclimate/rdf/syntax.hpp"

namespace linkclimate::rdf {

SyntaxError::SyntaxError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

enum class Dialect { NTriples, NQuads, Turtle };

constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

void appendUtf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool isPnChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         static_cast<unsigned char>(c) >= 0x80;
}

class Reader {
 public:
  Reader(std::string_view text, Dialect dialect) : text_(text), dialect_(dialect) {}

  std::vector<Quad> run() {
    std::vector<Quad> out;
    for (;;) {
      skipSpace(dialect_ == Dialect::Turtle);
      if (atEnd()) break;
      if (peek() == '\n' || peek() == '\r') {
        advance();
        continue;
      }
      if (dialect_ == Dialect::Turtle && tryDirective()) continue;
      statement(out);
    }
    return out;
  }

 private:
  bool atEnd() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  void advance() {
    if (atEnd()) return;
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(line_, col_, what); }
  [[noreturn]] void failAt(std::size_t line, std::size_t col, const std::string& what) const {
    throw SyntaxError(line, col, what);
  }

  std::string describeHere() const {
    if (atEnd()) return "end of input";
    char c = peek();
    if (c == '\n') return "end of line";
    return std::string("'") + c + "'";
  }

  // Skips blanks and comments. Newlines are only skipped when `lines` is set.
  void skipSpace(bool lines) {
    while (!atEnd()) {
      char c = peek();
      if (c == ' ' || c == '\t' || (lines && (c == '\n' || c == '\r'))) {
        advance();
      } else if (c == '#') {
        while (!atEnd() && peek() != '\n') advance();
      } else {
        return;
      }
    }
  }

  void expect(char c) {
    if (peek() != c || atEnd()) fail(std::string("expected '") + c + "', found " + describeHere());
    advance();
  }

  bool tryDirective() {
    bool at = peek() == '@';
    auto word = [&](std::string_view w) {
      for (std::size_t i = 0; i < w.size(); ++i)
        if (std::toupper(static_cast<unsigned char>(peek(i))) != w[i]) return false;
      return true;
    };
    if (at) {
      if (text_.substr(pos_, 7) != "@prefix") fail("unknown directive");
      for (int i = 0; i < 7; ++i) advance();
    } else if (word("PREFIX") && !isPnChar(peek(6)) && peek(6) != ':') {
      for (int i = 0; i < 6; ++i) advance();
    } else {
      return false;
    }
    skipSpace(true);
    std::string prefix;
    while (!atEnd() && (isPnChar(peek()) || peek() == '.')) {
      prefix += peek();
      advance();
    }
    expect(':');
    skipSpace(true);
    std::string ns = iriRef().str();
    prefixes_[prefix] = ns;
    skipSpace(true);
    if (at) expect('.');
    return true;
  }

  void statement(std::vector<Quad>& out) {
    const bool turtle = dialect_ == Dialect::Turtle;
    Term subject = resourceTerm("subject");
    skipSpace(turtle);
    for (;;) {
      Term predicate = predicateTerm();
      skipSpace(turtle);
      for (;;) {
        std::size_t oline = line_, ocol = col_;
        Term object = objectTerm();
        skipSpace(turtle);
        std::optional<Iri> graph;
        if (dialect_ == Dialect::NQuads && peek() == '<') {
          graph = iriRef();
          skipSpace(false);
        }
        try {
          out.push_back(Quad{std::move(graph), Triple::make(subject, predicate, std::move(object))});
        } catch (const InvalidTerm& e) {
          failAt(oline, ocol, e.what());
        }
        if (turtle && peek() == ',') {
          advance();
          skipSpace(true);
          continue;
        }
        break;
      }
      if (turtle && peek() == ';') {
        while (peek() == ';') {
          advance();
          skipSpace(true);
        }
        if (peek() == '.') break;
        continue;
      }
      break;
    }
    if (peek() != '.' || atEnd())
      fail("expected '.' to end the statement, found " + describeHere());
    advance();
    if (!turtle) {
      skipSpace(false);
      if (!atEnd() && peek() != '\n' && peek() != '\r')
        fail("unexpected " + describeHere() + " after statement");
    }
  }

  Term resourceTerm(const char* role) {
    char c = peek();
    if (c == '<') return iriRef();
    if (c == '_' && peek(1) == ':') fail("blank nodes are not supported");
    if (dialect_ == Dialect::Turtle && (isPnChar(c) || c == ':')) return prefixedName();
    fail(std::string("expected IRI in ") + role + " position, found " + describeHere());
  }

  Term predicateTerm() {
    if (dialect_ == Dialect::Turtle && peek() == 'a' &&
        (peek(1) == ' ' || peek(1) == '\t' || peek(1) == '\n' || peek(1) == '<' ||
         peek(1) == '"')) {
      advance();
      return Iri(std::string(kRdfType));
    }
    if (peek() == '"') fail("literal in predicate position");
    return resourceTerm("predicate");
  }

  Term objectTerm() {
    char c = peek();
    if (c == '"') return literal();
    if (dialect_ == Dialect::Turtle) {
      if (c == '+' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c)))
        return bareNumber();
      if (text_.substr(pos_, 4) == "true" && !isPnChar(peek(4)) && peek(4) != ':') {
        for (int i = 0; i < 4; ++i) advance();
        return booleanLiteral(true);
      }
      if (text_.substr(pos_, 5) == "false" && !isPnChar(peek(5)) && peek(5) != ':') {
        for (int i = 0; i < 5; ++i) advance();
        return booleanLiteral(false);
      }
    }
    return resourceTerm("object");
  }

  char32_t hexEscape(int digits) {
    char32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      char c = peek();
      int v;
      if (c >= '0' && c <= '9') v = c - '0';
      else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
      else fail("invalid hex digit in unicode escape");
      cp = cp * 16 + static_cast<char32_t>(v);
      advance();
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("invalid code point in escape");
    return cp;
  }

  Iri iriRef() {
    std::size_t line = line_, col = col_;
    expect('<');
    std::string value;
    for (;;) {
      if (atEnd() || peek() == '\n') failAt(line, col, "unterminated IRI");
      char c = peek();
      if (c == '>') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        char kind = peek();
        if (kind != 'u' && kind != 'U') fail("invalid escape in IRI");
        advance();
        appendUtf8(value, hexEscape(kind == 'u' ? 4 : 8));
        continue;
      }
      value += c;
      advance();
    }
    auto iri = Iri::tryMake(value);
    if (!iri) failAt(line, col, "invalid IRI <" + value + ">");
    return *iri;
  }

  Iri prefixedName() {
    std::size_t line = line_, col = col_;
    std::string prefix;
    while (!atEnd() && (isPnChar(peek()) || peek() == '.')) {
      prefix += peek();
      advance();
    }
    if (peek() != ':') failAt(line, col, "expected prefixed name, found '" + prefix + "'");
    advance();
    std::string local;
    while (!atEnd()) {
      char c = peek();
      if (isPnChar(c) || c == ':' || c == '%') {
        local += c;
        advance();
      } else if (c == '.' && (isPnChar(peek(1)) || peek(1) == ':')) {
        local += c;
        advance();
      } else {
        break;
      }
    }
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) failAt(line, col, "undeclared prefix '" + prefix + ":'");
    auto iri = Iri::tryMake(it->second + local);
    if (!iri) failAt(line, col, "invalid IRI from prefixed name");
    return *iri;
  }

  Term literal() {
    std::size_t line = line_, col = col_;
    expect('"');
    std::string lexical;
    for (;;) {
      if (atEnd() || peek() == '\n' || peek() == '\r') failAt(line, col, "unterminated string literal");
      char c = peek();
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        char e = peek();
        advance();
        switch (e) {
          case 't': lexical += '\t'; break;
          case 'b': lexical += '\b'; break;
          case 'n': lexical += '\n'; break;
          case 'r': lexical += '\r'; break;
          case 'f': lexical += '\f'; break;
          case '"': lexical += '"'; break;
          case '\'': lexical += '\''; break;
          case '\\': lexical += '\\'; break;
          case 'u': appendUtf8(lexical, hexEscape(4)); break;
          case 'U': appendUtf8(lexical, hexEscape(8)); break;
          default: fail(std::string("invalid escape '\\") + e + "'");
        }
        continue;
      }
      lexical += c;
      advance();
    }
    try {
      if (peek() == '@') {
        advance();
        std::string lang;
        while (!atEnd() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) {
          lang += peek();
          advance();
        }
        if (lang.empty() || !std::isalpha(static_cast<unsigned char>(lang[0])) ||
            lang.back() == '-')
          failAt(line, col, "invalid language tag");
        return Literal::langString(std::move(lexical), std::move(lang));
      }
      if (peek() == '^' && peek(1) == '^') {
        advance();
        advance();
        Iri dt = (peek() == '<' || dialect_ != Dialect::Turtle) ? iriRef() : prefixedName();
        return Literal(std::move(lexical), std::move(dt));
      }
    } catch (const InvalidTerm& e) {
      failAt(line, col, e.what());
    }
    return Literal(std::move(lexical));
  }

  Term bareNumber() {
    std::size_t line = line_, col = col_;
    std::string lex;
    while (!atEnd()) {
      char c = peek();
      bool numeric = std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
                     c == 'e' || c == 'E';
      if (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) numeric = true;
      if (!numeric) break;
      lex += c;
      advance();
    }
    if (!parseNumber(lex)) failAt(line, col, "invalid number '" + lex + "'");
    std::string_view dt = xsd::kInteger;
    if (lex.find_first_of("eE") != std::string::npos) dt = xsd::kDouble;
    else if (lex.find('.') != std::string::npos) dt = xsd::kDecimal;
    try {
      return typedLiteral(lex, dt);
    } catch (const InvalidTerm& e) {
      failAt(line, col, e.what());
    }
  }

  std::string_view text_;
  Dialect dialect_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
  std::map<std::string, std::string> prefixes_;
};

std::vector<Triple> triplesOnly(std::vector<Quad> quads) {
  std::vector<Triple> out;
  out.reserve(quads.size());
  for (auto& q : quads) out.push_back(std::move(q.triple));
  return out;
}

}  // namespace

std::vector<Triple> parseNTriples(std::string_view text) {
  return triplesOnly(Reader(text, Dialect::NTriples).run());
}

std::vector<Quad> parseNQuads(std::string_view text) {
  return Reader(text, Dialect::NQuads).run();
}

std::vector<Triple> parseTurtle(std::string_view text) {
  return triplesOnly(Reader(text, Dialect::Turtle).run());
}

}  // namespace linkclimate::rdf
