#include <algorithm>
#include <string>

#include "doctest.h"
#include "scenekg/pipeline.hpp"
#include "scenekg/render.hpp"
#include "scenekg/synthgen.hpp"

using namespace scenekg;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + needle.size())) ++n;
  return n;
}

// Tables whose rows carry a local position, judged by their column names.
bool positioned(const NodeTable& t) {
  auto has = [&](const char* c) { return std::find(t.columns.begin(), t.columns.end(), c) != t.columns.end(); };
  return (has("x_local") && has("y_local")) || (has("x") && has("y")) || (has("centroid_x") && has("centroid_y"));
}

World intersection_world() {
  const auto sc = synth::generate(synth::template_from_spec("intersection"), 0, 10.0);
  return compile_world(sc.map, sc.trips, CompilerConfig{}, 1);
}

}  // namespace

TEST_CASE("map render draws one path per lane") {
  const World w = intersection_world();
  const std::string svg = render_graph_svg(w.graph);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(svg, "<svg ") == 1);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count(svg, "<path class=\"lane\"") == 8);
  CHECK(count(svg, "<path class=\"connector\"") == 12);
  CHECK(count(svg, "<circle class=\"traffic-light\"") == 4);
  CHECK(count(svg, "class=\"agent") == 0);
  CHECK(render_graph_svg(w.graph) == svg);
}

TEST_CASE("scene render adds participants and relations") {
  const World w = intersection_world();
  const std::string scene = scene_node_id("seq0", 6);
  const std::string svg = render_graph_svg(w.graph, scene);
  const std::size_t participants = w.graph.neighbors(w.graph.at(scene), EdgeType::hasSceneParticipant, Direction::Out).size();
  CHECK(count(svg, "<path class=\"agent") == participants);
  CHECK(count(svg, "<path class=\"agent ego\"") == 1);
  CHECK(count(svg, "<path class=\"relation ") > 0);
  CHECK_THROWS_AS(render_graph_svg(w.graph, std::string_view("seq0#999")), RenderError);
}

TEST_CASE("example render marks the target and its future") {
  const World w = intersection_world();
  const Extractor ex(w.graph, CompilerConfig{});
  const auto ts = ex.select_all_targets();
  REQUIRE(!ts.empty());
  const HetGraphExample e = ex.build_example(ts.front());
  const std::string svg = render_example_svg(e);
  std::size_t nodes = 0;
  for (const auto& t : e.tables) nodes += positioned(t) ? t.rows() : 0;
  std::size_t edges = 0;
  for (const auto& l : e.edges) {
    if (positioned(*e.table(l.src_table)) && positioned(*e.table(l.dst_table))) edges += l.pairs.size();
  }
  CHECK(nodes > 0);
  CHECK(count(svg, "<circle class=\"node ") == nodes);
  CHECK(count(svg, "<line class=\"edge ") == edges);
  CHECK(count(svg, " target\"") == 1);
  CHECK(count(svg, "<path class=\"future\"") == 1);
  CHECK(render_example_svg(e) == svg);
}
