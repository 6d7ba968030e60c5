#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkclimate/ontology/ontology.hpp"
#include "linkclimate/rdf/dataset.hpp"
#include "linkclimate/sparql/query.hpp"

namespace linkclimate::pipeline {

// A query file from queries/, compiled into the library.
struct ShippedQuery {
  std::string name;      // file stem, e.g. "cq04"
  std::string question;  // first comment line
  std::string text;
};

const std::vector<ShippedQuery>& shippedQueries();
// nullopt for an unknown name.
std::optional<ShippedQuery> shippedQuery(std::string_view name);

// Values the shipped queries are written against; they name entities of the
// fixture corpus.
struct CompetencyTargets {
  std::string regionName = "County Cork";
  std::string focusStation = "GHCND:EI000003969";     // DUBLIN PHOENIX PARK
  std::string variableStation = "GHCND:EI000003957";  // ROSSLARE, PRCP and TMAX only
  std::size_t nearestCount = 3;
  double south = 51.3, north = 55.5, west = -10.7, east = -5.4;
  std::string supplementaryGraph = "supplementary";   // under base + "graph/"
  std::string supplementaryNs = "http://jresearch.ucd.ie/climate-kg/env#";
};

// Rows of N-Triples-rendered cells; "" marks an unbound cell.
using AnswerSet = std::vector<std::vector<std::string>>;

AnswerSet toAnswer(const sparql::ResultTable& table);

struct CqOutcome {
  std::string id;  // "CQ1" .. "CQ11"
  std::string question;
  bool passed = false;
  AnswerSet actual;
  AnswerSet expected;
  std::string detail;  // diff or error text when failed
  double seconds = 0;
};

struct CompetencyReport {
  std::vector<CqOutcome> outcomes;
  bool allPassed() const;
};

// Runs the eleven questions. Each answer is compared with an oracle that
// walks the dataset's triple indexes directly, never the query engine.
// CQ11 loads `supplementaryNt` into the supplementary named graph first.
CompetencyReport runCompetencySuite(rdf::Store& store, const ontology::Ontology& onto,
                                    std::string_view supplementaryNt,
                                    const CompetencyTargets& targets = {});

// "-" lines for missing rows, "+" lines for unexpected rows, at most
// `limit` of each.
std::string diffAnswers(const AnswerSet& expected, const AnswerSet& actual, std::size_t limit = 10);

}  // namespace linkclimate::pipeline
