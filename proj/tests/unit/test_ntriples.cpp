#include <sstream>

#include "doctest.h"
#include "scenekg/ntriples.hpp"
#include "scenekg/pipeline.hpp"
#include "scenekg/synthgen.hpp"

using namespace scenekg;

namespace {

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n' ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("two scenes with one timestamp give four triples") {
  KnowledgeGraph g;
  g.add_node(NodeType::Scene, "a", {{"hasTimestamp", std::int64_t{1600000000000000}}});
  g.add_node(NodeType::Scene, "b");
  g.add_edge(EdgeType::hasNextScene, "a", "b");
  std::ostringstream out;
  CHECK(export_ntriples(g, out) == 4);
  const std::string text = out.str();
  CHECK(count_lines(text) == 4);
  CHECK(text.find("<urn:nskg:Scene:a> <" + property_iri("hasNextScene") + "> <urn:nskg:Scene:b> .") != std::string::npos);
  CHECK(text.find("\"1600000000000000\"^^<http://www.w3.org/2001/XMLSchema#integer>") != std::string::npos);
}

TEST_CASE("ids are percent-encoded in IRIs") {
  const std::string iri = node_iri(NodeType::SceneParticipant, "seq 0#3@car/1");
  CHECK(iri.find(' ') == std::string::npos);
  CHECK(iri.find('#') == std::string::npos);
  CHECK(iri.rfind("urn:nskg:SceneParticipant:", 0) == 0);
  KnowledgeGraph g;
  g.add_node(NodeType::Lane, "weird id#1 <x>", {{"label", std::string("quote \" and \\ slash\nnewline")}});
  const KnowledgeGraph back = parse_ntriples(to_ntriples(g));
  REQUIRE(back.find("weird id#1 <x>"));
  const auto* v = back.attr(*back.find("weird id#1 <x>"), "label");
  REQUIRE(v != nullptr);
  CHECK(std::get<std::string>(*v) == "quote \" and \\ slash\nnewline");
}

TEST_CASE("literal types survive a roundtrip") {
  KnowledgeGraph g;
  g.add_node(NodeType::LaneSlice, "s",
             {{"width", 3.5}, {"idx", std::int64_t{-7}}, {"flag", true}, {"shape", WktLiteral{"POINT (1 2)"}}});
  const KnowledgeGraph back = parse_ntriples(to_ntriples(g));
  const NodeIndex n = back.at("s");
  CHECK(std::get<double>(*back.attr(n, "width")) == 3.5);
  CHECK(std::get<std::int64_t>(*back.attr(n, "idx")) == -7);
  CHECK(std::get<bool>(*back.attr(n, "flag")));
  CHECK(std::get<WktLiteral>(*back.attr(n, "shape")).text == "POINT (1 2)");
}

TEST_CASE("export is sorted and stable across a parse") {
  const auto sc = synth::generate(synth::template_from_spec("intersection"), 3, 4.0);
  const World w = compile_world(sc.map, sc.trips, CompilerConfig{}, 1);
  const std::string first = to_ntriples(w.graph);
  std::istringstream lines(first);
  std::string prev, line;
  bool sorted = true;
  while (std::getline(lines, line)) {
    if (!prev.empty() && line < prev) sorted = false;
    prev = line;
  }
  CHECK(sorted);
  const KnowledgeGraph back = parse_ntriples(first);
  CHECK(back.node_count() == w.graph.node_count());
  CHECK(back.edge_count() == w.graph.edge_count());
  CHECK(to_ntriples(back) == first);
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(parse_ntriples("<urn:nskg:Lane:a> <urn:nskg:prop:x> \"1\"^^<http://www.w3.org/2001/XMLSchema#integer>\n"),
                  ParseError);
  const std::string typed = "<urn:nskg:Lane:a> <" + std::string(kRdfType) + "> <urn:nskg:class:Lane> .\n";
  CHECK_NOTHROW(parse_ntriples(typed));
  CHECK_THROWS_AS(parse_ntriples(typed + "<urn:nskg:Lane:a> <urn:nskg:prop:bogusEdge> <urn:nskg:Lane:a> .\n"), ParseError);
  CHECK_THROWS_AS(parse_ntriples("<urn:nskg:Lane:a> <" + std::string(kRdfType) + "> <urn:nskg:class:Scene> .\n"),
                  ParseError);
  // Edge to a node that was never typed.
  CHECK_THROWS_AS(parse_ntriples(typed + "<urn:nskg:Lane:a> <urn:nskg:prop:hasNextLane> <urn:nskg:Lane:b> .\n"), ParseError);
  // Edge whose endpoints violate the signature.
  const std::string scene = "<urn:nskg:Scene:s> <" + std::string(kRdfType) + "> <urn:nskg:class:Scene> .\n";
  CHECK_THROWS_AS(parse_ntriples(typed + scene + "<urn:nskg:Lane:a> <urn:nskg:prop:hasNextLane> <urn:nskg:Scene:s> .\n"),
                  ParseError);
  try {
    parse_ntriples(typed + "garbage\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}
