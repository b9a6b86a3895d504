#pragma once

// Minimal graphs that each break one ontology axiom, plus a helper that copies
// a graph while dropping edges so valid graphs can be mutated.

#include <functional>
#include <string>
#include <vector>

#include "scenekg/kg.hpp"
#include "scenekg/schema.hpp"

namespace schema_cases {

using namespace scenekg;

struct Case {
  int axiom;
  std::string rule;
  /// Node the violation must name.
  std::string culprit;
  KnowledgeGraph graph;
};

inline void add_shape(KnowledgeGraph& g, const std::string& owner, const std::string& wkt) {
  const NodeIndex s = g.add_node(NodeType::Polygon, owner + "#shape", {{"wkt", WktLiteral{wkt}}});
  g.add_edge(EdgeType::hasShape, g.at(owner), s);
}

inline KnowledgeGraph single(NodeType t, const std::string& id, AttrMap attrs = {}) {
  KnowledgeGraph g;
  g.add_node(t, id, std::move(attrs));
  return g;
}

inline KnowledgeGraph next_to_case(NodeType area) {
  KnowledgeGraph g;
  g.add_node(NodeType::Lane, "L");
  add_shape(g, "L", "POLYGON ((0 0, 10 0, 10 3.5, 0 3.5, 0 0))");
  g.add_node(area, "A");
  // 1 m below the lane; well inside the 4 m range.
  add_shape(g, "A", "POLYGON ((0 -3, 10 -3, 10 -1, 0 -1, 0 -3))");
  return g;
}

inline std::vector<Case> axiom_cases() {
  std::vector<Case> out;
  {
    KnowledgeGraph g;
    g.add_node(NodeType::Sequence, "s");
    g.add_node(NodeType::Scene, "s#0", {{"hasTimestamp", std::int64_t{0}}});
    g.add_node(NodeType::Scene, "s#1", {{"hasTimestamp", std::int64_t{500000}}});
    g.add_edge(EdgeType::hasScene, "s", "s#0");
    g.add_edge(EdgeType::hasScene, "s", "s#1");
    out.push_back({1, "scene-chain", "s#0", std::move(g)});
  }
  out.push_back({2, "sequence-has-scene", "s", single(NodeType::Sequence, "s")});
  out.push_back({3, "trip-has-sequence", "t", single(NodeType::Trip, "t")});
  out.push_back({4, "location-has-trip", "loc", single(NodeType::Location, "loc")});
  out.push_back({5, "scene-participant-membership", "sp", single(NodeType::SceneParticipant, "sp")});
  out.push_back({6, "participant-has-appearance", "car", single(NodeType::Car, "car")});
  out.push_back({7, "lane-connectivity", "L", single(NodeType::Lane, "L")});
  out.push_back({8, "connector-endpoints", "C", single(NodeType::LaneConnector, "C")});
  out.push_back({9, "snippet-switch", "L#snip0", single(NodeType::LaneSnippet, "L#snip0", {{"snippetHasLength", 10.0}})});
  out.push_back({10, "slice-parent-width", "L#slice0", single(NodeType::LaneSlice, "L#slice0", {{"laneSliceHasWidth", 3.5}})});
  out.push_back({11, "ordered-pose-connector", "C#pose0",
                 single(NodeType::OrderedPose, "C#pose0", {{"x", 0.0}, {"y", 0.0}, {"poseHasOrientation", 0.0}})});
  out.push_back({12, "pose-attributes", "p", single(NodeType::Pose, "p", {{"x", 1.0}})});
  out.push_back({13, "stop-area-subtype", "SA", single(NodeType::StopArea, "SA")});
  out.push_back({14, "traffic-light-pose-type", "TL", single(NodeType::TrafficLight, "TL", {{"hasTrafficLightType", std::string("X")}})});
  {
    KnowledgeGraph g;
    g.add_node(NodeType::PedCrossing, "PX");
    for (const char* w : {"W1", "W2", "W3"}) {
      g.add_node(NodeType::Walkway, w);
      g.add_edge(EdgeType::connectsWalkways, "PX", w);
    }
    out.push_back({15, "crossing-walkway-cardinality", "PX", std::move(g)});
  }
  out.push_back({16, "walkway-next-to", "A", next_to_case(NodeType::Walkway)});
  out.push_back({17, "carpark-next-to", "A", next_to_case(NodeType::CarparkArea)});
  out.push_back({18, "road-block-successor", "RB", single(NodeType::RoadBlock, "RB")});
  out.push_back({19, "intersection-has-connector", "X", single(NodeType::Intersection, "X")});
  out.push_back({20, "area-element-shape", "W", single(NodeType::Walkway, "W")});
  return out;
}

inline bool reports(const std::vector<Violation>& vs, const std::string& rule, const std::string& culprit) {
  for (const auto& v : vs) {
    if (v.rule != rule) continue;
    for (const auto& id : v.ids) {
      if (id == culprit) return true;
    }
  }
  return false;
}

inline bool reports_rule(const std::vector<Violation>& vs, const std::string& rule) {
  for (const auto& v : vs) {
    if (v.rule == rule) return true;
  }
  return false;
}

/// Copy of g without the edges for which drop returns true.
inline KnowledgeGraph without_edges(const KnowledgeGraph& g, const std::function<bool(const Edge&)>& drop) {
  KnowledgeGraph out;
  for (const Node& n : g.nodes()) out.add_node(n.type, n.id, n.attrs);
  for (const Edge& e : g.edges()) {
    if (!drop(e)) out.add_edge_unchecked(e.type, e.src, e.dst);
  }
  return out;
}

}  // namespace schema_cases
