#include "scenekg/schema.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_map>

#include "scenekg/geometry.hpp"

namespace scenekg {
namespace {

constexpr RuleInfo kRules[] = {
    {"scene-chain", "scenes of a multi-scene sequence link to a next or previous scene", true},
    {"sequence-has-scene", "every Sequence has a scene", true},
    {"trip-has-sequence", "every Trip has a sequence", true},
    {"location-has-trip", "every Location is the location of some Trip", true},
    {"scene-participant-membership", "a SceneParticipant belongs to exactly one Scene and one Participant", true},
    {"participant-has-appearance", "every Participant appears as some SceneParticipant", true},
    {"lane-connectivity", "every Lane has a next, previous, left or right lane", true},
    {"connector-endpoints", "every LaneConnector has exactly one incoming and one outgoing lane", true},
    {"snippet-switch", "every LaneSnippet can be switched from via some border", true},
    {"slice-parent-width", "every LaneSlice has one parent lane and a positive width", true},
    {"ordered-pose-connector", "every OrderedPose belongs to a LaneConnector", true},
    {"pose-attributes", "every Pose carries x, y and orientation", true},
    {"stop-area-subtype", "stop areas are typed by a concrete subtype", true},
    {"traffic-light-pose-type", "every TrafficLight has a pose and type H or V", true},
    {"crossing-walkway-cardinality", "a PedCrossing connects at most two walkways", true},
    {"walkway-next-to", "walkways are next to exactly the lanes within range", true},
    {"carpark-next-to", "carpark areas are next to exactly the lanes within range", true},
    {"road-block-successor", "road blocks have lanes and follow their lanes' successors", true},
    {"intersection-has-connector", "every Intersection hosts a LaneConnector", true},
    {"area-element-shape", "every AreaElement has exactly one polygon shape", true},
    {"abstract-type", "no node is typed by an abstract class", false},
    {"signature", "every edge satisfies its domain and range", false},
    {"attribute-range", "attributes lie in their documented ranges", false},
    {"timestamp-order", "scene and participant chains move forward in time", false},
    {"scene-has-ego", "every Scene contains the ego vehicle", false},
    {"inverse-edge", "inverse and symmetric relations are materialised both ways", false},
};

class Checker {
 public:
  Checker(const KnowledgeGraph& g, const SchemaOptions& o) : g_(g), opt_(o) {}

  std::vector<Violation> run() {
    for (NodeIndex n = 0; n < g_.node_count(); ++n) check_node(n);
    check_edges();
    check_next_to(NodeType::Walkway, EdgeType::walkwayIsNextTo, "walkway-next-to");
    check_next_to(NodeType::CarparkArea, EdgeType::carparkIsNextTo, "carpark-next-to");
    std::sort(out_.begin(), out_.end(), [](const Violation& a, const Violation& b) {
      return std::tie(a.rule, a.ids, a.message) < std::tie(b.rule, b.ids, b.message);
    });
    return std::move(out_);
  }

 private:
  void report(std::string_view rule, std::vector<std::string> ids, std::string message) {
    out_.push_back({std::string(rule), std::move(ids), std::move(message)});
  }
  void report(std::string_view rule, NodeIndex n, const std::string& message) {
    report(rule, std::vector<std::string>{id(n)}, message);
  }
  const std::string& id(NodeIndex n) const { return g_.node(n).id; }
  std::size_t out(NodeIndex n, EdgeType e) const { return g_.degree(n, e, Direction::Out); }
  std::size_t in(NodeIndex n, EdgeType e) const { return g_.degree(n, e, Direction::In); }

  std::optional<double> number(NodeIndex n, std::string_view name) const {
    const AttrValue* v = g_.attr(n, name);
    if (v == nullptr) return std::nullopt;
    if (const auto* d = std::get_if<double>(v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
    return std::nullopt;
  }

  std::optional<std::int64_t> timestamp(NodeIndex scene) const {
    const AttrValue* v = g_.attr(scene, "hasTimestamp");
    if (v == nullptr) return std::nullopt;
    if (const auto* i = std::get_if<std::int64_t>(v)) return *i;
    return std::nullopt;
  }

  std::optional<geom::Polygon> shape(NodeIndex n) const {
    for (NodeIndex s : g_.neighbors(n, EdgeType::hasShape, Direction::Out)) {
      if (g_.node(s).type != NodeType::Polygon) continue;
      const AttrValue* v = g_.attr(s, "wkt");
      const auto* w = v ? std::get_if<WktLiteral>(v) : nullptr;
      if (w == nullptr) return std::nullopt;
      try {
        return geom::polygon_from_wkt(w->text);
      } catch (const geom::GeometryError&) {
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  void check_node(NodeIndex n) {
    const NodeType t = g_.node(n).type;
    if (is_abstract(t) && t != NodeType::StopArea) {
      report("abstract-type", n, "node typed by abstract class " + std::string(to_string(t)));
    }
    if (is_a(t, NodeType::Participant)) {
      if (in(n, EdgeType::isSceneParticipantOf) == 0) report("participant-has-appearance", n, "participant never appears");
      for (const char* dim : {"length", "width", "height"}) {
        const auto v = number(n, dim);
        if (v && !(*v > 0)) report("attribute-range", n, std::string(dim) + " must be > 0");
      }
    }
    if (is_a(t, NodeType::Pose)) {
      if (!number(n, "x") || !number(n, "y") || !number(n, "poseHasOrientation")) {
        report("pose-attributes", n, "pose lacks x, y or poseHasOrientation");
      }
    }
    if (const auto yaw = number(n, "poseHasOrientation"); yaw && !(*yaw > -geom::kPi && *yaw <= geom::kPi)) {
      report("attribute-range", n, "poseHasOrientation outside (-pi, pi]");
    }
    if (is_a(t, NodeType::AreaElement)) {
      std::size_t polygons = 0;
      for (NodeIndex s : g_.neighbors(n, EdgeType::hasShape, Direction::Out)) polygons += g_.node(s).type == NodeType::Polygon;
      if (polygons != 1 || out(n, EdgeType::hasShape) != 1) report("area-element-shape", n, "expected exactly one polygon shape");
    }
    switch (t) {
      case NodeType::Scene: check_scene(n); break;
      case NodeType::Sequence:
        if (out(n, EdgeType::hasScene) == 0) report("sequence-has-scene", n, "sequence has no scene");
        break;
      case NodeType::Trip:
        if (out(n, EdgeType::hasSequence) == 0) report("trip-has-sequence", n, "trip has no sequence");
        break;
      case NodeType::Location:
        if (in(n, EdgeType::hasLocation) == 0) report("location-has-trip", n, "location is not used by any trip");
        break;
      case NodeType::SceneParticipant: check_scene_participant(n); break;
      case NodeType::Lane:
        if (out(n, EdgeType::hasNextLane) + out(n, EdgeType::hasPreviousLane) + out(n, EdgeType::hasLeftLane) +
                out(n, EdgeType::hasRightLane) == 0) {
          report("lane-connectivity", n, "lane is isolated from the lane graph");
        }
        break;
      case NodeType::LaneConnector:
        if (out(n, EdgeType::hasIncomingLane) != 1 || out(n, EdgeType::hasOutgoingLane) != 1) {
          report("connector-endpoints", n, "connector needs exactly one incoming and one outgoing lane");
        }
        break;
      case NodeType::LaneSnippet: check_snippet(n); break;
      case NodeType::LaneSlice: {
        const auto width = number(n, "laneSliceHasWidth");
        if (in(n, EdgeType::laneHasSlice) != 1 || !width || !(*width > 0)) {
          report("slice-parent-width", n, "slice needs one parent lane and positive width");
        }
        break;
      }
      case NodeType::OrderedPose:
        if (in(n, EdgeType::connectorHasPose) == 0) report("ordered-pose-connector", n, "ordered pose has no connector");
        break;
      case NodeType::StopArea: report("stop-area-subtype", n, "stop area lacks a concrete subtype"); break;
      case NodeType::TrafficLight: {
        const AttrValue* v = g_.attr(n, "hasTrafficLightType");
        const auto* s = v ? std::get_if<std::string>(v) : nullptr;
        if (out(n, EdgeType::trafficLightHasPose) == 0 || s == nullptr || (*s != "H" && *s != "V")) {
          report("traffic-light-pose-type", n, "traffic light needs a pose and type H or V");
        }
        break;
      }
      case NodeType::PedCrossing:
        if (out(n, EdgeType::connectsWalkways) > static_cast<std::size_t>(opt_.max_crossing_walkways)) {
          report("crossing-walkway-cardinality", n,
                 "crossing connects " + std::to_string(out(n, EdgeType::connectsWalkways)) + " walkways");
        }
        break;
      case NodeType::RoadBlock: check_road_block(n); break;
      case NodeType::Intersection:
        if (in(n, EdgeType::isConnectorOnRoadSegment) == 0) {
          report("intersection-has-connector", n, "intersection hosts no lane connector");
        }
        break;
      default: break;
    }
  }

  void check_scene(NodeIndex n) {
    if (out(n, EdgeType::hasNextScene) + out(n, EdgeType::hasPreviousScene) == 0) {
      bool singleton = false;
      for (NodeIndex seq : g_.neighbors(n, EdgeType::hasScene, Direction::In)) {
        singleton = singleton || out(seq, EdgeType::hasScene) == 1;
      }
      if (!singleton) report("scene-chain", n, "scene is not chained to its sequence neighbours");
    }
    if (!timestamp(n)) report("attribute-range", n, "scene lacks an integer hasTimestamp");
    bool ego = false;
    for (NodeIndex sp : g_.neighbors(n, EdgeType::hasSceneParticipant, Direction::Out)) {
      const AttrValue* v = g_.attr(sp, "is_ego");
      ego = ego || (v && std::holds_alternative<bool>(*v) && std::get<bool>(*v));
    }
    if (!ego) report("scene-has-ego", n, "scene has no ego participant");
  }

  void check_scene_participant(NodeIndex n) {
    if (in(n, EdgeType::hasSceneParticipant) != 1 || out(n, EdgeType::isSceneParticipantOf) != 1) {
      report("scene-participant-membership", n, "scene participant needs exactly one scene and one participant");
    }
    if (const auto speed = number(n, "speed"); speed && !(*speed >= 0)) report("attribute-range", n, "negative speed");
  }

  void check_snippet(NodeIndex n) {
    bool any = false;
    for (std::uint32_t e : g_.incident(n, Direction::Out)) any = any || is_switch_via(g_.edges()[e].type);
    if (!any) report("snippet-switch", n, "snippet has no switchVia neighbour");
    const auto len = number(n, "snippetHasLength");
    if (!len || !(*len > 0) || *len > opt_.snippet_max_len_m + 1e-6) {
      report("attribute-range", n, "snippetHasLength outside (0, max]");
    }
  }

  void check_road_block(NodeIndex n) {
    const auto lanes = g_.neighbors(n, EdgeType::isLaneOnRoadBlock, Direction::In);
    if (lanes.empty()) report("road-block-successor", n, "road block has no lanes");
    for (NodeIndex lane : lanes) {
      for (NodeIndex next : g_.neighbors(lane, EdgeType::hasNextLane, Direction::Out)) {
        for (NodeIndex block : g_.neighbors(next, EdgeType::isLaneOnRoadBlock, Direction::Out)) {
          if (block != n && !g_.has_edge(EdgeType::hasNextRoadBlock, n, block)) {
            report("road-block-successor", {id(n), id(block)}, "missing hasNextRoadBlock implied by lane " + id(lane));
          }
        }
      }
    }
  }

  void check_edges() {
    const auto edges = g_.edges();
    for (const Edge& e : edges) {
      const EdgeSignature& sig = signature(e.type);
      const NodeType ts = g_.node(e.src).type;
      const NodeType td = g_.node(e.dst).type;
      auto fits = [](NodeType t, const std::vector<NodeType>& allowed) {
        return std::any_of(allowed.begin(), allowed.end(), [&](NodeType a) { return is_a(t, a); });
      };
      if (!fits(ts, sig.domain) || !fits(td, sig.range)) {
        report("signature", {id(e.src), id(e.dst)}, std::string(to_string(e.type)) + " violates its signature");
      }
      auto expect = [&](EdgeType inverse, NodeIndex s, NodeIndex d) {
        if (!g_.has_edge(inverse, s, d)) {
          report("inverse-edge", {id(e.src), id(e.dst)},
                 std::string(to_string(e.type)) + " lacks " + std::string(to_string(inverse)));
        }
      };
      switch (e.type) {
        case EdgeType::hasNextScene: expect(EdgeType::hasPreviousScene, e.dst, e.src); break;
        case EdgeType::hasPreviousScene: expect(EdgeType::hasNextScene, e.dst, e.src); break;
        case EdgeType::hasNextLane: expect(EdgeType::hasPreviousLane, e.dst, e.src); break;
        case EdgeType::hasPreviousLane: expect(EdgeType::hasNextLane, e.dst, e.src); break;
        case EdgeType::hasLeftLane: expect(EdgeType::hasRightLane, e.dst, e.src); break;
        case EdgeType::hasRightLane: expect(EdgeType::hasLeftLane, e.dst, e.src); break;
        case EdgeType::hasOpposingRoadBlock: expect(EdgeType::hasOpposingRoadBlock, e.dst, e.src); break;
        default: break;
      }
      if (is_switch_via(e.type)) {
        bool back = false;
        for (std::uint32_t r : g_.incident(e.dst, Direction::Out)) {
          const Edge& rev = edges[r];
          back = back || (is_switch_via(rev.type) && rev.dst == e.src);
        }
        if (!back) report("inverse-edge", {id(e.src), id(e.dst)}, "switchVia is not mirrored");
      }
      if (e.type == EdgeType::hasNextScene) {
        const auto a = timestamp(e.src);
        const auto b = timestamp(e.dst);
        if (a && b && !(*a < *b)) report("timestamp-order", {id(e.src), id(e.dst)}, "hasNextScene goes back in time");
      }
      if (e.type == EdgeType::inNextScene) {
        const auto sa = g_.neighbors(e.src, EdgeType::hasSceneParticipant, Direction::In);
        const auto sb = g_.neighbors(e.dst, EdgeType::hasSceneParticipant, Direction::In);
        if (sa.size() == 1 && sb.size() == 1) {
          const auto a = timestamp(sa[0]);
          const auto b = timestamp(sb[0]);
          if (a && b && !(*a < *b)) report("timestamp-order", {id(e.src), id(e.dst)}, "inNextScene goes back in time");
        }
      }
    }
  }

  void check_next_to(NodeType area_type, EdgeType relation, std::string_view rule) {
    std::vector<std::pair<NodeIndex, geom::Polygon>> lanes;
    geom::SpatialGrid grid;
    for (NodeIndex n = 0; n < g_.node_count(); ++n) {
      if (g_.node(n).type != NodeType::Lane) continue;
      if (auto poly = shape(n)) {
        grid.insert(static_cast<std::uint32_t>(lanes.size()), poly->bounds());
        lanes.emplace_back(n, std::move(*poly));
      }
    }
    for (NodeIndex n = 0; n < g_.node_count(); ++n) {
      if (g_.node(n).type != area_type) continue;
      const auto poly = shape(n);
      if (!poly) continue;
      std::vector<NodeIndex> expected;
      for (std::uint32_t i : grid.query(poly->bounds().inflated(opt_.is_next_to_m))) {
        if (geom::polygon_distance(*poly, lanes[i].second) < opt_.is_next_to_m) expected.push_back(lanes[i].first);
      }
      std::sort(expected.begin(), expected.end());
      auto actual = g_.neighbors(n, relation, Direction::Out);
      std::sort(actual.begin(), actual.end());
      std::vector<NodeIndex> missing;
      std::vector<NodeIndex> extra;
      std::set_difference(expected.begin(), expected.end(), actual.begin(), actual.end(), std::back_inserter(missing));
      std::set_difference(actual.begin(), actual.end(), expected.begin(), expected.end(), std::back_inserter(extra));
      for (NodeIndex lane : missing) report(rule, {id(n), id(lane)}, "lane within range lacks isNextTo edge");
      for (NodeIndex lane : extra) report(rule, {id(n), id(lane)}, "isNextTo edge to a lane out of range");
    }
  }

  const KnowledgeGraph& g_;
  SchemaOptions opt_;
  std::vector<Violation> out_;
};

}  // namespace

std::span<const RuleInfo> schema_rules() { return kRules; }

std::vector<Violation> validate_schema(const KnowledgeGraph& g, const SchemaOptions& options) {
  return Checker(g, options).run();
}

}  // namespace scenekg
