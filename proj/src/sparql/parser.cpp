#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include "linkclimate/ontology/ontology.hpp"
#include "linkclimate/sparql/query.hpp"

namespace linkclimate::sparql {

namespace {

enum class Tok { Iri, PName, Var, String, LangTag, Integer, Decimal, Double, Word, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;   // decoded value: IRI body, string content, var name, word, punct
  std::string local;  // PName local part (text holds the prefix)
  std::size_t line = 1, column = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Iri: return "<" + t.text + ">";
    case Tok::PName: return t.text + ":" + t.local;
    case Tok::Var: return "?" + t.text;
    case Tok::String: return "\"" + t.text + "\"";
    case Tok::LangTag: return "@" + t.text;
    default: return "'" + t.text + "'";
  }
}

bool isNameStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

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

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skipSpace();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      scan(t);
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t line, std::size_t col) {
    throw QuerySyntaxError(line, col, msg);
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance(std::size_t n = 1) {
    for (; n > 0 && pos_ < text_.size(); --n) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
        ++column_;
      }
      ++pos_;
    }
  }

  void skipSpace() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  void scan(Token& t) {
    const char c = peek();
    if (c == '<' && tryIri(t)) return;
    if ((c == '?' || c == '$') && isNameChar(peek(1))) {
      advance();
      t.kind = Tok::Var;
      while (isNameChar(peek())) t.text += peek(), advance();
      return;
    }
    if (c == '"' || c == '\'') return string(t);
    if (c == '@' && std::isalpha(static_cast<unsigned char>(peek(1)))) {
      advance();
      t.kind = Tok::LangTag;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-') t.text += peek(), advance();
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))))
      return number(t);
    if (isNameStart(c) || c == ':') return name(t);

    static const char* kTwo[] = {"!=", "<=", ">=", "&&", "||", "^^"};
    for (const char* p : kTwo) {
      if (c == p[0] && peek(1) == p[1]) {
        t.kind = Tok::Punct;
        t.text = p;
        advance(2);
        return;
      }
    }
    if (std::string_view("{}().;,*=<>!+-/").find(c) != std::string_view::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      advance();
      return;
    }
    fail(std::string("unexpected character '") + c + "'", line_, column_);
  }

  bool tryIri(Token& t) {
    std::size_t end = pos_ + 1;
    while (end < text_.size()) {
      unsigned char ch = static_cast<unsigned char>(text_[end]);
      if (ch == '>') break;
      if (ch <= 0x20 || std::string_view("<\"{}|^`\\").find(static_cast<char>(ch)) != std::string_view::npos)
        return false;
      ++end;
    }
    if (end >= text_.size()) return false;
    t.kind = Tok::Iri;
    t.text = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
    advance(end - pos_ + 1);
    return true;
  }

  void string(Token& t) {
    const char quote = peek();
    const bool longForm = peek(1) == quote && peek(2) == quote;
    const std::size_t line = line_, col = column_;
    advance(longForm ? 3 : 1);
    t.kind = Tok::String;
    for (;;) {
      if (pos_ >= text_.size()) fail("unterminated string literal", line, col);
      char ch = peek();
      if (longForm && ch == quote && peek(1) == quote && peek(2) == quote) {
        advance(3);
        return;
      }
      if (!longForm && ch == quote) {
        advance();
        return;
      }
      if (!longForm && (ch == '\n' || ch == '\r')) fail("newline in string literal", line_, column_);
      if (ch != '\\') {
        t.text += ch;
        advance();
        continue;
      }
      const std::size_t eline = line_, ecol = column_;
      advance();
      char e = peek();
      advance();
      switch (e) {
        case 't': t.text += '\t'; break;
        case 'n': t.text += '\n'; break;
        case 'r': t.text += '\r'; break;
        case 'b': t.text += '\b'; break;
        case 'f': t.text += '\f'; break;
        case '"': t.text += '"'; break;
        case '\'': t.text += '\''; break;
        case '\\': t.text += '\\'; break;
        case 'u':
        case 'U': {
          std::size_t n = e == 'u' ? 4 : 8;
          if (pos_ + n > text_.size()) fail("truncated unicode escape", eline, ecol);
          unsigned cp = 0;
          auto hex = text_.substr(pos_, n);
          auto [p, ec] = std::from_chars(hex.data(), hex.data() + n, cp, 16);
          if (ec != std::errc() || p != hex.data() + n || cp > 0x10FFFF)
            fail("invalid unicode escape", eline, ecol);
          appendUtf8(t.text, cp);
          advance(n);
          break;
        }
        default: fail("invalid escape sequence", eline, ecol);
      }
    }
  }

  void number(Token& t) {
    auto digits = [&] {
      while (std::isdigit(static_cast<unsigned char>(peek()))) t.text += peek(), advance();
    };
    t.kind = Tok::Integer;
    digits();
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      t.kind = Tok::Decimal;
      t.text += '.';
      advance();
      digits();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(peek(1))) ||
         ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
      t.kind = Tok::Double;
      t.text += peek();
      advance();
      if (peek() == '+' || peek() == '-') t.text += peek(), advance();
      digits();
    }
  }

  void name(Token& t) {
    std::string word;
    while (isNameChar(peek()) || (peek() == '.' && isNameChar(peek(1)) && !word.empty()))
      word += peek(), advance();
    if (peek() != ':') {
      t.kind = Tok::Word;
      t.text = std::move(word);
      return;
    }
    advance();
    t.kind = Tok::PName;
    t.text = std::move(word);
    auto localChar = [](char ch) { return isNameChar(ch) || ch == ':' || ch == '%'; };
    while (localChar(peek()) || (peek() == '.' && localChar(peek(1)))) t.local += peek(), advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0, line_ = 1, column_ = 1;
};

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool isAggregateName(std::string_view n) {
  return n == "COUNT" || n == "SUM" || n == "AVG" || n == "MIN" || n == "MAX";
}

// Built-in function name -> accepted argument counts (min, max).
std::optional<std::pair<int, int>> builtinArity(std::string_view n) {
  if (n == "REGEX") return std::pair{2, 3};
  if (n == "STR" || n == "LANG" || n == "DATATYPE" || n == "BOUND" || n == "YEAR" ||
      n == "MONTH" || n == "DAY")
    return std::pair{1, 1};
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

  Query run() {
    prologue();
    expectWord("SELECT");
    if (acceptWord("DISTINCT")) q_.distinct = true;
    else if (acceptWord("REDUCED")) {}
    selectClause();
    acceptWord("WHERE");
    inWhere_ = true;
    q_.where = *groupPattern();
    inWhere_ = false;
    modifiers();
    if (cur().kind != Tok::End) fail("expected end of query");
    finish();
    return std::move(q_);
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  const Token& next() const { return toks_[std::min(i_ + 1, toks_.size() - 1)]; }
  void bump() {
    if (i_ + 1 < toks_.size()) ++i_;
  }

  [[noreturn]] void fail(const std::string& msg) const { failAt(cur(), msg); }
  [[noreturn]] static void failAt(const Token& t, const std::string& msg) {
    throw QuerySyntaxError(t.line, t.column, msg + " but found " + describe(t));
  }

  bool isWord(std::string_view w) const { return cur().kind == Tok::Word && upper(cur().text) == w; }
  bool acceptWord(std::string_view w) {
    if (!isWord(w)) return false;
    bump();
    return true;
  }
  void expectWord(std::string_view w) {
    if (!acceptWord(w)) fail("expected " + std::string(w));
  }
  bool isPunct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool accept(std::string_view p) {
    if (!isPunct(p)) return false;
    bump();
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }

  // --- prologue -----------------------------------------------------------

  void prologue() {
    for (;;) {
      if (acceptWord("PREFIX")) {
        if (cur().kind != Tok::PName || !cur().local.empty()) fail("expected prefix name");
        std::string prefix = cur().text;
        bump();
        if (cur().kind != Tok::Iri) fail("expected IRI");
        std::string ns = resolveRelative(cur().text);
        bump();
        prefixes_[prefix] = ns;
        q_.prefixes.emplace_back(prefix, ns);
      } else if (acceptWord("BASE")) {
        if (cur().kind != Tok::Iri) fail("expected IRI");
        base_ = cur().text;
        bump();
      } else {
        return;
      }
    }
  }

  std::string resolveRelative(const std::string& iri) const {
    if (base_.empty() || rdf::Iri::isValid(iri)) return iri;
    return base_ + iri;
  }

  rdf::Iri makeIri(const Token& at, const std::string& value) const {
    auto iri = rdf::Iri::tryMake(value);
    if (!iri) failAt(at, "invalid IRI <" + value + ">,");
    return *iri;
  }

  // Current token as an IRI (IRIREF or prefixed name); consumes it.
  std::optional<rdf::Iri> iri() {
    const Token& t = cur();
    if (t.kind == Tok::Iri) {
      auto v = makeIri(t, resolveRelative(t.text));
      bump();
      return v;
    }
    if (t.kind == Tok::PName) {
      auto it = prefixes_.find(t.text);
      if (it == prefixes_.end()) failAt(t, "undeclared prefix '" + t.text + ":',");
      auto v = makeIri(t, it->second + t.local);
      bump();
      return v;
    }
    return std::nullopt;
  }

  // --- variables ----------------------------------------------------------

  std::size_t slotFor(const std::string& name) {
    auto it = slots_.find(name);
    std::size_t slot;
    if (it != slots_.end()) {
      slot = it->second;
    } else {
      slot = q_.vars.size();
      q_.vars.push_back(name);
      slots_.emplace(name, slot);
    }
    if (inWhere_ && whereSeen_.insert(slot).second) whereOrder_.push_back(slot);
    return slot;
  }

  Var var() {
    if (cur().kind != Tok::Var) fail("expected variable");
    Var v{slotFor(cur().text)};
    bump();
    return v;
  }

  // --- SELECT -------------------------------------------------------------

  void selectClause() {
    if (accept("*")) {
      q_.selectAll = true;
      return;
    }
    while (cur().kind == Tok::Var || isPunct("(")) {
      if (cur().kind == Tok::Var) {
        q_.select.push_back({var().slot, nullptr});
        continue;
      }
      bump();
      allowAggregates_ = true;
      ExprPtr e = expression();
      allowAggregates_ = false;
      expectWord("AS");
      const Token& at = cur();
      std::size_t slot = var().slot;
      for (const auto& item : q_.select)
        if (item.slot == slot) failAt(at, "variable already projected,");
      aliasTokens_.emplace_back(slot, at);
      q_.select.push_back({slot, std::move(e)});
      expect(")");
    }
    if (q_.select.empty()) fail("expected variable, '(' or '*' in SELECT");
  }

  // --- patterns -----------------------------------------------------------

  GroupPtr groupPattern() {
    expect("{");
    auto g = std::make_shared<GroupPattern>();
    for (;;) {
      if (accept("}")) return g;
      if (accept(".")) continue;
      if (acceptWord("FILTER")) {
        // Filter-only variables are not in scope for SELECT *.
        inWhere_ = false;
        g->elements.push_back(FilterElement{constraint()});
        inWhere_ = true;
      } else if (acceptWord("OPTIONAL")) {
        g->elements.push_back(OptionalElement{groupPattern()});
      } else if (acceptWord("GRAPH")) {
        PatternTerm name = Var{};
        if (cur().kind == Tok::Var) name = var();
        else if (auto i = iri()) name = rdf::Term(*i);
        else fail("expected variable or IRI after GRAPH");
        g->elements.push_back(GraphElement{std::move(name), groupPattern()});
      } else if (isPunct("{")) {
        g->elements.push_back(SubGroupElement{groupPattern()});
      } else if (cur().kind == Tok::End) {
        fail("expected '}' to close group");
      } else {
        triplesSameSubject(*g);
        if (accept(".") || isPunct("}") || isPunct("{") || isWord("FILTER") ||
            isWord("OPTIONAL") || isWord("GRAPH"))
          continue;
        if (cur().kind == Tok::End) fail("expected '}' to close group");
        fail("expected '.'");
      }
    }
  }

  void triplesSameSubject(GroupPattern& g) {
    PatternTerm s = term("subject");
    for (;;) {
      PatternTerm p = verb();
      for (;;) {
        g.elements.push_back(TriplePattern{s, p, term("object")});
        if (!accept(",")) break;
      }
      if (!accept(";")) return;
      while (accept(";")) {}
      if (isPunct(".") || isPunct("}")) return;
    }
  }

  PatternTerm verb() {
    if (cur().kind == Tok::Word && cur().text == "a") {
      bump();
      return rdf::Term(ontology::term::type());
    }
    if (cur().kind == Tok::Var) return var();
    if (auto i = iri()) return rdf::Term(*i);
    fail("expected predicate");
  }

  PatternTerm term(const char* role) {
    if (cur().kind == Tok::Var) return var();
    if (auto t = literalOrIri()) return *t;
    fail(std::string("expected ") + role);
  }

  std::optional<rdf::Term> literalOrIri() {
    if (auto i = iri()) return rdf::Term(*i);
    const Token& t = cur();
    if (t.kind == Tok::String) {
      std::string lexical = t.text;
      bump();
      if (cur().kind == Tok::LangTag) {
        std::string lang = cur().text;
        bump();
        return rdf::Term(rdf::Literal::langString(std::move(lexical), std::move(lang)));
      }
      if (accept("^^")) {
        const Token& at = cur();
        auto dt = iri();
        if (!dt) fail("expected datatype IRI");
        try {
          return rdf::Term(rdf::Literal(std::move(lexical), *dt));
        } catch (const rdf::InvalidTerm& e) {
          failAt(at, e.what() + std::string(","));
        }
      }
      return rdf::Term(rdf::Literal(std::move(lexical)));
    }
    std::string sign;
    if ((isPunct("-") || isPunct("+")) &&
        (next().kind == Tok::Integer || next().kind == Tok::Decimal || next().kind == Tok::Double)) {
      sign = cur().text == "-" ? "-" : "";
      bump();
    }
    if (auto n = numeric(sign)) return n;
    if (cur().kind == Tok::Word && (cur().text == "true" || cur().text == "false")) {
      bool v = cur().text == "true";
      bump();
      return rdf::Term(rdf::booleanLiteral(v));
    }
    return std::nullopt;
  }

  std::optional<rdf::Term> numeric(const std::string& sign) {
    const Token& t = cur();
    std::string_view dt;
    switch (t.kind) {
      case Tok::Integer: dt = rdf::xsd::kInteger; break;
      case Tok::Decimal: dt = rdf::xsd::kDecimal; break;
      case Tok::Double: dt = rdf::xsd::kDouble; break;
      default: return std::nullopt;
    }
    std::string lexical = sign + t.text;
    if (lexical.starts_with('.') || lexical.starts_with("-.")) lexical.insert(lexical.find('.'), "0");
    bump();
    return rdf::Term(rdf::typedLiteral(std::move(lexical), dt));
  }

  // --- expressions --------------------------------------------------------

  ExprPtr constraint() {
    if (accept("(")) {
      ExprPtr e = expression();
      expect(")");
      return e;
    }
    if (cur().kind == Tok::Word && builtinArity(upper(cur().text))) return primary();
    fail("expected '(' or function call after FILTER");
  }

  static ExprPtr make(Expr::Op op, std::vector<ExprPtr> args) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->args = std::move(args);
    return e;
  }

  ExprPtr expression() {
    ExprPtr lhs = conjunction();
    while (accept("||")) lhs = make(Expr::Op::Or, {lhs, conjunction()});
    return lhs;
  }

  ExprPtr conjunction() {
    ExprPtr lhs = relational();
    while (accept("&&")) lhs = make(Expr::Op::And, {lhs, relational()});
    return lhs;
  }

  ExprPtr relational() {
    ExprPtr lhs = additive();
    static const std::pair<const char*, Expr::Op> kOps[] = {
        {"=", Expr::Op::Eq}, {"!=", Expr::Op::Ne}, {"<", Expr::Op::Lt},
        {"<=", Expr::Op::Le}, {">", Expr::Op::Gt}, {">=", Expr::Op::Ge}};
    for (const auto& [p, op] : kOps)
      if (accept(p)) return make(op, {lhs, additive()});
    return lhs;
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    for (;;) {
      if (accept("+")) lhs = make(Expr::Op::Add, {lhs, multiplicative()});
      else if (accept("-")) lhs = make(Expr::Op::Sub, {lhs, multiplicative()});
      else return lhs;
    }
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = unary();
    for (;;) {
      if (accept("*")) lhs = make(Expr::Op::Mul, {lhs, unary()});
      else if (accept("/")) lhs = make(Expr::Op::Div, {lhs, unary()});
      else return lhs;
    }
  }

  ExprPtr unary() {
    if (accept("!")) return make(Expr::Op::Not, {unary()});
    if (accept("-")) return make(Expr::Op::Neg, {unary()});
    if (accept("+")) return make(Expr::Op::Plus, {unary()});
    return primary();
  }

  ExprPtr primary() {
    if (accept("(")) {
      ExprPtr e = expression();
      expect(")");
      return e;
    }
    if (cur().kind == Tok::Var) {
      auto e = std::make_shared<Expr>();
      e->op = Expr::Op::Var;
      e->slot = var().slot;
      return e;
    }
    if (cur().kind == Tok::Word && next().kind == Tok::Punct && next().text == "(") {
      const Token at = cur();
      std::string fn = upper(at.text);
      if (isAggregateName(fn)) return aggregate(at, fn);
      auto arity = builtinArity(fn);
      if (!arity) failAt(at, "unsupported function,");
      bump();
      bump();
      auto e = std::make_shared<Expr>();
      e->op = Expr::Op::Call;
      e->name = fn;
      if (fn == "BOUND") {
        auto v = std::make_shared<Expr>();
        v->op = Expr::Op::Var;
        v->slot = var().slot;
        e->args.push_back(v);
      } else {
        e->args.push_back(expression());
        while (accept(",")) e->args.push_back(expression());
      }
      const int n = static_cast<int>(e->args.size());
      if (n < arity->first || n > arity->second) failAt(at, "wrong number of arguments to " + fn + ",");
      expect(")");
      return e;
    }
    if (auto t = literalOrIri()) {
      auto e = std::make_shared<Expr>();
      e->op = Expr::Op::Const;
      e->value = std::move(*t);
      return e;
    }
    fail("expected expression");
  }

  ExprPtr aggregate(const Token& at, const std::string& fn) {
    if (!allowAggregates_) failAt(at, "aggregate not allowed here,");
    bump();
    bump();
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Aggregate;
    e->name = fn;
    if (acceptWord("DISTINCT")) e->distinct = true;
    if (fn == "COUNT" && accept("*")) {
      e->star = true;
    } else {
      allowAggregates_ = false;
      e->args.push_back(expression());
      allowAggregates_ = true;
    }
    expect(")");
    sawAggregate_ = true;
    return e;
  }

  // --- solution modifiers -------------------------------------------------

  void modifiers() {
    if (acceptWord("GROUP")) {
      expectWord("BY");
      do {
        if (cur().kind == Tok::Var) {
          auto e = std::make_shared<Expr>();
          e->op = Expr::Op::Var;
          e->slot = var().slot;
          q_.groupBy.push_back({e, std::nullopt});
        } else if (accept("(")) {
          GroupKey key{expression(), std::nullopt};
          if (acceptWord("AS")) key.alias = var().slot;
          expect(")");
          q_.groupBy.push_back(std::move(key));
        } else if (cur().kind == Tok::Word && builtinArity(upper(cur().text))) {
          q_.groupBy.push_back({primary(), std::nullopt});
        } else {
          fail("expected grouping condition");
        }
      } while (cur().kind == Tok::Var || isPunct("(") ||
               (cur().kind == Tok::Word && builtinArity(upper(cur().text))));
    }
    if (acceptWord("HAVING")) {
      allowAggregates_ = true;
      do q_.having.push_back(constraint());
      while (isPunct("(") || (cur().kind == Tok::Word && builtinArity(upper(cur().text))));
      allowAggregates_ = false;
    }
    if (acceptWord("ORDER")) {
      expectWord("BY");
      allowAggregates_ = true;
      for (;;) {
        if (isWord("ASC") || isWord("DESC")) {
          bool desc = isWord("DESC");
          bump();
          expect("(");
          q_.orderBy.push_back({expression(), desc});
          expect(")");
        } else if (cur().kind == Tok::Var || isPunct("(") ||
                   (cur().kind == Tok::Word && next().kind == Tok::Punct && next().text == "(")) {
          q_.orderBy.push_back({cur().kind == Tok::Var ? primary() : constraintOrCall(), false});
        } else {
          break;
        }
      }
      allowAggregates_ = false;
      if (q_.orderBy.empty()) fail("expected ordering condition");
    }
    for (int k = 0; k < 2; ++k) {
      if (acceptWord("LIMIT")) q_.limit = integer();
      else if (acceptWord("OFFSET")) q_.offset = integer();
    }
  }

  ExprPtr constraintOrCall() {
    if (accept("(")) {
      ExprPtr e = expression();
      expect(")");
      return e;
    }
    return primary();
  }

  std::size_t integer() {
    if (cur().kind != Tok::Integer) fail("expected non-negative integer");
    std::size_t v = 0;
    const auto& s = cur().text;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc()) fail("integer out of range");
    bump();
    return v;
  }

  // --- validation ---------------------------------------------------------

  static void groupVarsOf(const ExprPtr& e, std::vector<std::size_t>& out) {
    if (!e || e->op == Expr::Op::Aggregate) return;
    if (e->op == Expr::Op::Var) out.push_back(e->slot);
    for (const auto& a : e->args) groupVarsOf(a, out);
  }

  void finish() {
    q_.aggregating = !q_.groupBy.empty() || sawAggregate_;
    if (q_.selectAll) {
      if (q_.aggregating) throw QuerySyntaxError(1, 1, "SELECT * is not allowed with GROUP BY");
      for (std::size_t slot : whereOrder_) q_.select.push_back({slot, nullptr});
    }
    for (const auto& [slot, at] : aliasTokens_)
      if (whereSeen_.count(slot)) failAt(at, "alias is already bound in WHERE,");

    if (!q_.aggregating) return;
    std::set<std::size_t> grouped;
    for (const auto& k : q_.groupBy) {
      if (k.alias) grouped.insert(*k.alias);
      else if (k.expr->op == Expr::Op::Var) grouped.insert(k.expr->slot);
    }
    std::set<std::size_t> available = grouped;
    for (const auto& item : q_.select) {
      std::vector<std::size_t> used;
      if (item.expr) groupVarsOf(item.expr, used);
      else used.push_back(item.slot);
      for (std::size_t v : used)
        if (!available.count(v))
          throw QuerySyntaxError(1, 1, "variable ?" + q_.vars[v] +
                                           " is neither grouped nor aggregated");
      if (item.expr) available.insert(item.slot);
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  Query q_;
  std::map<std::string, std::string> prefixes_;
  std::string base_;
  std::map<std::string, std::size_t> slots_;
  bool inWhere_ = false;
  std::set<std::size_t> whereSeen_;
  std::vector<std::size_t> whereOrder_;
  std::vector<std::pair<std::size_t, Token>> aliasTokens_;
  bool allowAggregates_ = false;
  bool sawAggregate_ = false;
};

void countTriples(const GroupPattern& g, std::size_t& n) {
  for (const auto& el : g.elements) {
    if (std::holds_alternative<TriplePattern>(el)) ++n;
    else if (auto* o = std::get_if<OptionalElement>(&el)) countTriples(*o->group, n);
    else if (auto* gr = std::get_if<GraphElement>(&el)) countTriples(*gr->group, n);
    else if (auto* s = std::get_if<SubGroupElement>(&el)) countTriples(*s->group, n);
  }
}

}  // namespace

std::size_t Query::tripleCount() const {
  std::size_t n = 0;
  countTriples(where, n);
  return n;
}

Query parseQuery(std::string_view text) { return Parser(text).run(); }

}  // namespace linkclimate::sparql
