#include <algorithm>
#include <atomic>
#include <thread>

#include <gtest/gtest.h>

#include "linkclimate/rdf/dataset.hpp"
#include "linkclimate/rdf/syntax.hpp"
#include "support/support.hpp"

namespace rdf = linkclimate::rdf;
using rdf::Iri;
using rdf::Literal;
using rdf::Term;
using rdf::Triple;

namespace {

Iri ex(const std::string& local) { return Iri("http://example.org/" + local); }

}  // namespace

TEST(Iri, RejectsRelativeAndForbiddenCharacters) {
  EXPECT_THROW(Iri(""), rdf::InvalidTerm);
  EXPECT_THROW(Iri("relative/path"), rdf::InvalidTerm);
  EXPECT_THROW(Iri("http://example.org/a b"), rdf::InvalidTerm);
  EXPECT_THROW(Iri("http://example.org/<x>"), rdf::InvalidTerm);
  EXPECT_NO_THROW(Iri("urn:isbn:0451450523"));
  EXPECT_NO_THROW(Iri("http://jresearch.ucd.ie/climate-kg/resource/station/GHCND:EI000003969"));
  EXPECT_FALSE(Iri::tryMake("nope").has_value());
}

TEST(Literal, NumericHelpers) {
  EXPECT_TRUE(rdf::integerLiteral(3).isNumeric());
  EXPECT_EQ(rdf::doubleLiteral(48.8).lexical(), "48.8");
  EXPECT_EQ(rdf::doubleLiteral(-6.35).lexical(), "-6.35");
  EXPECT_EQ(rdf::doubleLiteral(0).lexical(), "0");
  EXPECT_EQ(*rdf::typedLiteral("1e3", rdf::xsd::kDouble).numericValue(), 1000.0);
  EXPECT_FALSE(Literal("12").isNumeric());
  EXPECT_EQ(Literal::langString("x", "EN").lang(), std::optional<std::string>("EN"));
}

TEST(Triple, MakeRejectsLiteralSubject) {
  EXPECT_THROW(Triple::make(Term(Literal("x")), Term(ex("p")), Term(ex("o"))), rdf::InvalidTerm);
  EXPECT_THROW(Triple::make(Term(ex("s")), Term(Literal("p")), Term(ex("o"))), rdf::InvalidTerm);
}

TEST(Dataset, SetSemanticsAndGraphs) {
  rdf::Dataset d;
  Triple t{ex("s"), ex("p"), Literal("o")};
  EXPECT_TRUE(d.insert(std::nullopt, t));
  EXPECT_FALSE(d.insert(std::nullopt, t));
  EXPECT_TRUE(d.insert(ex("g"), t));
  EXPECT_EQ(d.size(std::nullopt), 1u);
  EXPECT_EQ(d.size(ex("g")), 1u);
  EXPECT_EQ(d.totalSize(), 2u);
  EXPECT_EQ(d.insertAll(ex("g"), {t, t, Triple{ex("s"), ex("p"), Literal("o2")}}), 1u);
  EXPECT_TRUE(d.erase(ex("g"), t));
  EXPECT_FALSE(d.erase(ex("g"), t));
  EXPECT_TRUE(d.dropGraph(ex("g")));
  EXPECT_FALSE(d.dropGraph(ex("g")));
  EXPECT_FALSE(d.hasGraph(ex("g")));
  EXPECT_EQ(d.replaceGraph(std::nullopt, {t, t}), 1u);
}

TEST(Dataset, IndexesStayInStep) {
  lctest::Rng rng(7);
  rdf::Dataset d;
  std::vector<Triple> inserted;
  for (int i = 0; i < 2000; ++i) {
    auto t = lctest::randomTriple(rng);
    d.insert(std::nullopt, t);
    inserted.push_back(t);
  }
  for (int i = 0; i < 500; ++i) d.erase(std::nullopt, inserted[static_cast<std::size_t>(i) * 3]);
  auto sizes = d.defaultGraph().indexSizes();
  EXPECT_EQ(sizes[0], sizes[1]);
  EXPECT_EQ(sizes[1], sizes[2]);
  EXPECT_EQ(sizes[0], d.size(std::nullopt));
}

// Every one of the eight bound/unbound shapes against a linear scan.
TEST(Dataset, MatchAgreesWithLinearScan) {
  lctest::Rng rng(42);
  rdf::Dataset d;
  std::vector<Triple> all;
  std::vector<Iri> subjects, predicates;
  std::vector<Term> objects;
  for (int i = 0; i < 60; ++i) subjects.push_back(ex("s" + std::to_string(i)));
  for (int i = 0; i < 8; ++i) predicates.push_back(ex("p" + std::to_string(i)));
  for (int i = 0; i < 40; ++i) objects.push_back(i % 2 ? Term(ex("s" + std::to_string(i))) : Term(rdf::integerLiteral(i)));
  std::uniform_int_distribution<std::size_t> si(0, 59), pi(0, 7), oi(0, 39);
  while (all.size() < 5000) {
    Triple t{subjects[si(rng)], predicates[pi(rng)], objects[oi(rng)]};
    if (d.insert(std::nullopt, t)) all.push_back(t);
  }
  std::sort(all.begin(), all.end());
  for (int i = 0; i < 1000; ++i) {
    const int shape = i % 8;
    std::optional<Iri> s, p;
    std::optional<Term> o;
    if (shape & 1) s = subjects[si(rng)];
    if (shape & 2) p = predicates[pi(rng)];
    if (shape & 4) o = objects[oi(rng)];
    auto got = d.match(std::nullopt, s, p, o);
    std::sort(got.begin(), got.end());
    std::vector<Triple> want;
    for (const auto& t : all)
      if ((!s || t.subject == *s) && (!p || t.predicate == *p) && (!o || t.object == *o)) want.push_back(t);
    ASSERT_EQ(got, want) << "shape " << shape;
  }
}

TEST(NTriples, ParsesEscapesAndTypes) {
  auto ts = rdf::parseNTriples(
      "<http://ex.org/s> <http://ex.org/p> \"a\\\"b\\n\\u00e9\\U0001F327\" .\n"
      "# comment\n"
      "<http://ex.org/s> <http://ex.org/p> \"5\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n"
      "<http://ex.org/s> <http://ex.org/p> \"hi\"@en-GB .\r\n");
  ASSERT_EQ(ts.size(), 3u);
  EXPECT_EQ(ts[0].object.literal().lexical(), "a\"b\n\xc3\xa9\xf0\x9f\x8c\xa7");
  EXPECT_TRUE(ts[1].object.literal().isNumeric());
  EXPECT_EQ(ts[2].object.literal().lang(), std::optional<std::string>("en-GB"));
}

TEST(NTriples, ErrorsCarryPositionAndNothingIsReturned) {
  try {
    rdf::parseNTriples("<http://ex.org/s> <http://ex.org/p> <http://ex.org/o> .\n<http://ex.org/s> <http://ex.org/p> \"open .\n");
    FAIL() << "expected a syntax error";
  } catch (const rdf::SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(rdf::parseNTriples("_:b0 <http://ex.org/p> <http://ex.org/o> ."), rdf::SyntaxError);
  EXPECT_THROW(rdf::parseNTriples("<http://ex.org/s> <http://ex.org/p> <http://ex.org/o>"), rdf::SyntaxError);
}

TEST(NTriples, SerializationIsCanonical) {
  std::vector<Triple> ts = {{ex("b"), ex("p"), Literal("x")},
                            {ex("a"), ex("p"), Literal("x")},
                            {ex("a"), ex("p"), Literal("x")}};
  EXPECT_EQ(rdf::serializeNTriples(ts),
            "<http://example.org/a> <http://example.org/p> \"x\" .\n"
            "<http://example.org/b> <http://example.org/p> \"x\" .\n");
}

TEST(NTriples, RandomRoundTrip) {
  lctest::Rng rng(2024);
  for (int round = 0; round < 200; ++round) {
    std::vector<Triple> ts;
    for (int i = 0; i < 20; ++i) ts.push_back(lctest::randomTriple(rng));
    std::string text = rdf::serializeNTriples(ts);
    auto back = rdf::parseNTriples(text);
    ASSERT_EQ(rdf::serializeNTriples(back), text);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::sort(back.begin(), back.end());
    ASSERT_EQ(back, ts);
  }
}

TEST(Turtle, PrefixesListsAndBareLiterals) {
  auto ts = rdf::parseTurtle(
      "@prefix ex: <http://example.org/> .\n"
      "PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n"
      "ex:s a ex:C ; ex:p 1, 2.5, 1e2, true ; ex:q \"d\"^^xsd:date .\n");
  ASSERT_EQ(ts.size(), 6u);
  EXPECT_EQ(ts[0].predicate.str(), "http://www.w3.org/1999/02/22-rdf-syntax-ns#type");
  EXPECT_EQ(ts[1].object.literal().datatype().str(), rdf::xsd::kInteger);
  EXPECT_EQ(ts[2].object.literal().datatype().str(), rdf::xsd::kDecimal);
  EXPECT_EQ(ts[3].object.literal().datatype().str(), rdf::xsd::kDouble);
  EXPECT_EQ(ts[4].object.literal().datatype().str(), rdf::xsd::kBoolean);
  EXPECT_THROW(rdf::parseTurtle("ex:s ex:p ex:o ."), rdf::SyntaxError);
  EXPECT_THROW(rdf::parseTurtle("@prefix ex: <http://example.org/> . ex:s ex:p [ ex:q 1 ] ."), rdf::SyntaxError);
}

TEST(Turtle, RoundTripThroughSerializer) {
  lctest::Rng rng(99);
  rdf::PrefixMap prefixes = {{"ex", "http://example.org/"}, {"xsd", "http://www.w3.org/2001/XMLSchema#"}};
  for (int round = 0; round < 100; ++round) {
    std::vector<Triple> ts;
    for (int i = 0; i < 15; ++i) ts.push_back(lctest::randomTriple(rng));
    auto back = rdf::parseTurtle(rdf::serializeTurtle(ts, prefixes));
    ASSERT_EQ(rdf::serializeNTriples(back), rdf::serializeNTriples(ts));
  }
}

TEST(NQuads, DatasetRoundTrip) {
  lctest::Rng rng(5);
  for (int round = 0; round < 50; ++round) {
    auto d = lctest::randomDataset(rng, 100);
    std::string text = rdf::serializeNQuads(d);
    rdf::Dataset back;
    for (auto& q : rdf::parseNQuads(text)) back.insert(q.graph, q.triple);
    ASSERT_TRUE(rdf::sameContent(d, back));
    ASSERT_EQ(rdf::serializeNQuads(back), text);
  }
}

TEST(Store, ReadersNeverSeeHalfAWrite) {
  rdf::Store store;
  std::vector<Triple> batch;
  for (int i = 0; i < 200; ++i) batch.push_back({ex("s" + std::to_string(i)), ex("p"), rdf::integerLiteral(i)});
  std::atomic<bool> done{false};
  std::atomic<int> torn{0};
  std::thread reader([&] {
    while (!done) {
      auto n = store.read([](const rdf::Dataset& d) { return d.size(std::nullopt); });
      if (n % 200 != 0) ++torn;
    }
  });
  for (int round = 0; round < 50; ++round) {
    store.write([&](rdf::Dataset& d) {
      for (auto t : batch) {
        t.object = rdf::integerLiteral(round * 1000 + std::stoll(t.object.literal().lexical()));
        d.insert(std::nullopt, t);
      }
      return 0;
    });
  }
  done = true;
  reader.join();
  EXPECT_EQ(torn.load(), 0);
  EXPECT_EQ(store.read([](const rdf::Dataset& d) { return d.size(std::nullopt); }), 200u * 50u);
}
