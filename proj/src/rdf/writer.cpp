#include <algorithm>
#include <cctype>
#include <tuple>

#include "linkclimate/rdf/syntax.hpp"

namespace linkclimate::rdf {

namespace {

constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

struct Line {
  const std::string* subject;
  const std::string* predicate;
  std::string object;

  auto key() const { return std::tie(*subject, *predicate, object); }
  bool operator<(const Line& o) const { return key() < o.key(); }
  bool operator==(const Line& o) const { return key() == o.key(); }
};

std::vector<Line> canonicalLines(std::span<const Triple> triples) {
  std::vector<Line> lines;
  lines.reserve(triples.size());
  for (const auto& t : triples)
    lines.push_back({&t.subject.str(), &t.predicate.str(), toNTriples(t.object)});
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  return lines;
}

void appendLines(std::string& out, std::span<const Triple> triples, const std::string* graph) {
  for (const auto& l : canonicalLines(triples)) {
    out += '<';
    out += *l.subject;
    out += "> <";
    out += *l.predicate;
    out += "> ";
    out += l.object;
    if (graph) {
      out += " <";
      out += *graph;
      out += '>';
    }
    out += " .\n";
  }
}

bool safeLocalName(std::string_view local) {
  if (local.empty()) return false;
  char first = local[0];
  if (!(std::isalpha(static_cast<unsigned char>(first)) || first == '_')) return false;
  return std::all_of(local.begin(), local.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

class TurtleNames {
 public:
  explicit TurtleNames(const PrefixMap& prefixes) : prefixes_(prefixes) {}

  std::string iri(const Iri& iri) {
    const std::string& v = iri.str();
    const std::pair<std::string, std::string>* best = nullptr;
    for (const auto& p : prefixes_) {
      if (v.size() > p.second.size() && v.starts_with(p.second) &&
          safeLocalName(std::string_view(v).substr(p.second.size())) &&
          (!best || p.second.size() > best->second.size()))
        best = &p;
    }
    if (!best) return "<" + v + ">";
    used_.push_back(best);
    return best->first + ":" + v.substr(best->second.size());
  }

  std::string term(const Term& t) {
    if (const Iri* i = t.asIri()) return iri(*i);
    const Literal& lit = t.literal();
    std::string out = "\"" + escapeLiteral(lit.lexical()) + "\"";
    if (lit.lang()) return out + "@" + *lit.lang();
    if (lit.datatype().str() == xsd::kString) return out;
    return out + "^^" + iri(lit.datatype());
  }

  std::string header() {
    std::sort(used_.begin(), used_.end(),
              [](const auto* a, const auto* b) { return a->first < b->first; });
    used_.erase(std::unique(used_.begin(), used_.end()), used_.end());
    std::string out;
    for (const auto* p : used_) out += "@prefix " + p->first + ": <" + p->second + "> .\n";
    return out;
  }

 private:
  const PrefixMap& prefixes_;
  std::vector<const std::pair<std::string, std::string>*> used_;
};

}  // namespace

std::string serializeNTriples(std::span<const Triple> triples) {
  std::string out;
  appendLines(out, triples, nullptr);
  return out;
}

std::string serializeNQuads(const Dataset& data) {
  std::string out;
  appendLines(out, data.triples(std::nullopt), nullptr);
  for (const auto& name : data.graphNames()) appendLines(out, data.triples(name), &name.str());
  return out;
}

std::string serializeTurtle(std::span<const Triple> triples, const PrefixMap& prefixes) {
  TurtleNames names(prefixes);
  std::string body;
  std::vector<const Triple*> ordered;
  ordered.reserve(triples.size());
  for (const auto& t : triples) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(), [](const Triple* a, const Triple* b) {
    return std::forward_as_tuple(a->subject.str(), a->predicate.str(), toNTriples(a->object)) <
           std::forward_as_tuple(b->subject.str(), b->predicate.str(), toNTriples(b->object));
  });
  ordered.erase(std::unique(ordered.begin(), ordered.end(),
                            [](const Triple* a, const Triple* b) { return *a == *b; }),
                ordered.end());

  const Triple* prev = nullptr;
  for (const Triple* t : ordered) {
    if (prev && prev->subject == t->subject) {
      if (prev->predicate == t->predicate) {
        body += " ,\n        ";
      } else {
        body += " ;\n    ";
        body += t->predicate.str() == kRdfType ? std::string("a") : names.iri(t->predicate);
        body += ' ';
      }
    } else {
      if (prev) body += " .\n\n";
      body += names.iri(t->subject);
      body += "\n    ";
      body += t->predicate.str() == kRdfType ? std::string("a") : names.iri(t->predicate);
      body += ' ';
    }
    body += names.term(t->object);
    prev = t;
  }
  if (prev) body += " .\n";
  std::string head = names.header();
  if (!head.empty() && !body.empty()) head += '\n';
  return head + body;
}

}  // namespace linkclimate::rdf
