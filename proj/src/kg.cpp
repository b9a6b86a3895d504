#include "scenekg/kg.hpp"

#include <algorithm>
#include <array>

namespace scenekg {
namespace {

constexpr std::string_view kNodeNames[] = {
    "Trip",          "Location",           "Sequence",           "Scene",
    "Participant",   "PedestrianAdult",    "PedestrianChild",    "Wheelchair",
    "Stroller",      "PersonalMobility",   "PoliceOfficer",      "ConstructionWorker",
    "Animal",        "Car",                "Motorcycle",         "Bicycle",
    "BendyBus",      "RigidBus",           "Truck",              "ConstructionVehicle",
    "Ambulance",     "PoliceVehicle",      "Trailer",            "Barrier",
    "TrafficCone",   "PushablePullable",   "Debris",             "BicycleRack",
    "SceneParticipant", "AreaElement",     "Lane",               "LaneConnector",
    "LaneSnippet",   "LaneSlice",          "Pose",               "OrderedPose",
    "RoadBlock",     "StopArea",           "PedCrossingStopArea", "TrafficLightStopArea",
    "YieldStopArea", "StopSignArea",       "TurnStopArea",       "TrafficLight",
    "PedCrossing",   "Walkway",            "CarparkArea",        "Intersection",
    "Geometry",      "Point",              "Polygon",            "LineString",
};
static_assert(std::size(kNodeNames) == kNodeTypeCount);

constexpr std::string_view kEdgeNames[] = {
    "hasScene",           "hasNextScene",          "hasPreviousScene",      "hasSequence",
    "hasLocation",        "hasSceneParticipant",   "isSceneParticipantOf",  "inNextScene",
    "hasNextLane",        "hasPreviousLane",       "hasLeftLane",           "hasRightLane",
    "hasIncomingLane",    "hasOutgoingLane",       "hasLaneSnippet",        "hasNextLaneSnippet",
    "switchViaNoMarking", "switchViaSingleDashed", "switchViaDoubleDashed", "switchViaSingleSolid",
    "switchViaDoubleSolid", "switchViaSolidDashed", "switchViaDashedSolid", "switchViaRoadEdge",
    "laneHasSlice",       "hasNextLaneSlice",      "connectorHasPose",      "hasNextPose",
    "causesStopAt",       "connectsWalkways",      "walkwayIsNextTo",       "carparkIsNextTo",
    "hasNextRoadBlock",   "hasOpposingRoadBlock",  "isLaneOnRoadBlock",     "isConnectorOnRoadSegment",
    "trafficLightHasPose", "hasShape",             "isOn",                  "longitudinal",
    "lateral",            "intersecting",
};
static_assert(std::size(kEdgeNames) == kEdgeTypeCount);

using NT = NodeType;
using ET = EdgeType;

std::array<EdgeSignature, kEdgeTypeCount> build_signatures() {
  std::array<EdgeSignature, kEdgeTypeCount> s;
  auto set = [&](ET e, std::vector<NT> d, std::vector<NT> r, bool functional = false) {
    s[static_cast<std::size_t>(e)] = {std::move(d), std::move(r), functional};
  };
  set(ET::hasScene, {NT::Sequence}, {NT::Scene});
  set(ET::hasNextScene, {NT::Scene}, {NT::Scene});
  set(ET::hasPreviousScene, {NT::Scene}, {NT::Scene});
  set(ET::hasSequence, {NT::Trip}, {NT::Sequence});
  set(ET::hasLocation, {NT::Trip}, {NT::Location});
  set(ET::hasSceneParticipant, {NT::Scene}, {NT::SceneParticipant});
  set(ET::isSceneParticipantOf, {NT::SceneParticipant}, {NT::Participant});
  set(ET::inNextScene, {NT::SceneParticipant}, {NT::SceneParticipant});
  for (ET e : {ET::hasNextLane, ET::hasPreviousLane, ET::hasLeftLane, ET::hasRightLane}) set(e, {NT::Lane}, {NT::Lane});
  set(ET::hasIncomingLane, {NT::LaneConnector}, {NT::Lane}, true);
  set(ET::hasOutgoingLane, {NT::LaneConnector}, {NT::Lane}, true);
  set(ET::hasLaneSnippet, {NT::Lane}, {NT::LaneSnippet});
  set(ET::hasNextLaneSnippet, {NT::LaneSnippet}, {NT::LaneSnippet});
  for (std::size_t d = 0; d < kDividerTypeCount; ++d) {
    set(switch_via_for(static_cast<DividerType>(d)), {NT::LaneSnippet}, {NT::LaneSnippet});
  }
  set(ET::laneHasSlice, {NT::Lane}, {NT::LaneSlice});
  set(ET::hasNextLaneSlice, {NT::LaneSlice}, {NT::LaneSlice});
  set(ET::connectorHasPose, {NT::LaneConnector}, {NT::OrderedPose});
  set(ET::hasNextPose, {NT::OrderedPose}, {NT::OrderedPose});
  set(ET::causesStopAt, {NT::TrafficLight, NT::PedCrossing, NT::Intersection, NT::Lane}, {NT::StopArea});
  set(ET::connectsWalkways, {NT::PedCrossing}, {NT::Walkway});
  set(ET::walkwayIsNextTo, {NT::Walkway}, {NT::Lane});
  set(ET::carparkIsNextTo, {NT::CarparkArea}, {NT::Lane});
  set(ET::hasNextRoadBlock, {NT::RoadBlock}, {NT::RoadBlock});
  set(ET::hasOpposingRoadBlock, {NT::RoadBlock}, {NT::RoadBlock});
  set(ET::isLaneOnRoadBlock, {NT::Lane}, {NT::RoadBlock});
  set(ET::isConnectorOnRoadSegment, {NT::LaneConnector}, {NT::Intersection});
  set(ET::trafficLightHasPose, {NT::TrafficLight}, {NT::Pose});
  set(ET::hasShape, {NT::AreaElement, NT::LaneConnector}, {NT::Geometry});
  set(ET::isOn, {NT::SceneParticipant}, {NT::AreaElement});
  for (ET e : {ET::longitudinal, ET::lateral, ET::intersecting}) set(e, {NT::SceneParticipant}, {NT::SceneParticipant});
  return s;
}

const std::array<EdgeSignature, kEdgeTypeCount>& signatures() {
  static const auto table = build_signatures();
  return table;
}

constexpr std::size_t idx(NodeType t) { return static_cast<std::size_t>(t); }

}  // namespace

std::string_view to_string(NodeType t) { return kNodeNames[idx(t)]; }
std::string_view to_string(EdgeType t) { return kEdgeNames[static_cast<std::size_t>(t)]; }

std::optional<NodeType> node_type_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kNodeTypeCount; ++i) {
    if (kNodeNames[i] == s) return static_cast<NodeType>(i);
  }
  return std::nullopt;
}

std::optional<EdgeType> edge_type_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kEdgeTypeCount; ++i) {
    if (kEdgeNames[i] == s) return static_cast<EdgeType>(i);
  }
  return std::nullopt;
}

std::optional<NodeType> supertype(NodeType t) {
  if (idx(t) >= idx(NT::PedestrianAdult) && idx(t) <= idx(NT::BicycleRack)) return NT::Participant;
  if (idx(t) >= idx(NT::PedCrossingStopArea) && idx(t) <= idx(NT::TurnStopArea)) return NT::StopArea;
  switch (t) {
    case NT::Lane:
    case NT::LaneSnippet:
    case NT::RoadBlock:
    case NT::StopArea:
    case NT::PedCrossing:
    case NT::Walkway:
    case NT::CarparkArea:
    case NT::Intersection:
      return NT::AreaElement;
    case NT::OrderedPose:
      return NT::Pose;
    case NT::Point:
    case NT::Polygon:
    case NT::LineString:
      return NT::Geometry;
    default:
      return std::nullopt;
  }
}

bool is_a(NodeType t, NodeType ancestor) {
  std::optional<NodeType> cur = t;
  while (cur) {
    if (*cur == ancestor) return true;
    cur = supertype(*cur);
  }
  return false;
}

bool is_abstract(NodeType t) {
  return t == NT::Participant || t == NT::AreaElement || t == NT::StopArea || t == NT::Geometry;
}

NodeType node_type_for(Category c) { return static_cast<NodeType>(idx(NT::PedestrianAdult) + static_cast<std::size_t>(c)); }

std::optional<Category> category_for(NodeType t) {
  if (idx(t) < idx(NT::PedestrianAdult) || idx(t) > idx(NT::BicycleRack)) return std::nullopt;
  return static_cast<Category>(idx(t) - idx(NT::PedestrianAdult));
}

NodeType stop_area_type_for(StopType s) {
  return static_cast<NodeType>(idx(NT::PedCrossingStopArea) + static_cast<std::size_t>(s));
}

EdgeType switch_via_for(DividerType d) {
  return static_cast<EdgeType>(static_cast<std::size_t>(ET::switchViaNoMarking) + static_cast<std::size_t>(d));
}

std::optional<DividerType> divider_for(EdgeType e) {
  if (!is_switch_via(e)) return std::nullopt;
  return static_cast<DividerType>(static_cast<std::size_t>(e) - static_cast<std::size_t>(ET::switchViaNoMarking));
}

bool is_switch_via(EdgeType e) { return e >= ET::switchViaNoMarking && e <= ET::switchViaRoadEdge; }

const EdgeSignature& signature(EdgeType e) { return signatures()[static_cast<std::size_t>(e)]; }

NodeIndex KnowledgeGraph::add_node(NodeType type, std::string id, AttrMap attrs) {
  if (id.empty()) throw GraphError("node id must not be empty");
  const auto n = static_cast<NodeIndex>(nodes_.size());
  const auto [it, inserted] = index_.try_emplace(id, n);
  if (!inserted) throw GraphError("duplicate node id '" + id + "'");
  nodes_.push_back({type, std::move(id), std::move(attrs)});
  out_.emplace_back();
  in_.emplace_back();
  return n;
}

std::uint64_t KnowledgeGraph::edge_key(EdgeType type, NodeIndex src, NodeIndex dst) {
  return (static_cast<std::uint64_t>(type) << 58) | (static_cast<std::uint64_t>(src) << 29) | dst;
}

void KnowledgeGraph::check_signature(EdgeType type, NodeIndex src, NodeIndex dst) const {
  const EdgeSignature& sig = signature(type);
  const NodeType ts = nodes_[src].type;
  const NodeType td = nodes_[dst].type;
  auto fits = [](NodeType t, const std::vector<NodeType>& allowed) {
    return std::any_of(allowed.begin(), allowed.end(), [&](NodeType a) { return is_a(t, a); });
  };
  if (!fits(ts, sig.domain) || !fits(td, sig.range)) {
    throw GraphError("signature violation: " + std::string(to_string(type)) + " from " + std::string(to_string(ts)) + " '" +
                     nodes_[src].id + "' to " + std::string(to_string(td)) + " '" + nodes_[dst].id + "'");
  }
  if (sig.functional && degree(src, type, Direction::Out) > 0 && !has_edge(type, src, dst)) {
    throw GraphError("functional property " + std::string(to_string(type)) + " already set on '" + nodes_[src].id + "'");
  }
}

bool KnowledgeGraph::add_edge(EdgeType type, NodeIndex src, NodeIndex dst) {
  if (src >= nodes_.size() || dst >= nodes_.size()) throw GraphError("edge endpoint out of range");
  check_signature(type, src, dst);
  if (edge_set_.count(edge_key(type, src, dst))) return false;
  add_edge_unchecked(type, src, dst);
  return true;
}

bool KnowledgeGraph::add_edge(EdgeType type, std::string_view src, std::string_view dst) {
  const auto s = find(src);
  const auto d = find(dst);
  if (!s || !d) {
    throw GraphError("dangling edge endpoint: " + std::string(to_string(type)) + " '" + std::string(src) + "' -> '" +
                     std::string(dst) + "'");
  }
  return add_edge(type, *s, *d);
}

void KnowledgeGraph::add_edge_unchecked(EdgeType type, NodeIndex src, NodeIndex dst) {
  if (src >= nodes_.size() || dst >= nodes_.size()) throw GraphError("edge endpoint out of range");
  if (!edge_set_.insert(edge_key(type, src, dst)).second) return;
  const auto e = static_cast<std::uint32_t>(edges_.size());
  edges_.push_back({type, src, dst});
  out_[src].push_back(e);
  in_[dst].push_back(e);
}

void KnowledgeGraph::set_attr(NodeIndex n, std::string name, AttrValue value) {
  nodes_.at(n).attrs.insert_or_assign(std::move(name), std::move(value));
}

std::optional<NodeIndex> KnowledgeGraph::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex KnowledgeGraph::at(std::string_view id) const {
  const auto n = find(id);
  if (!n) throw GraphError("unknown node '" + std::string(id) + "'");
  return *n;
}

std::span<const std::uint32_t> KnowledgeGraph::incident(NodeIndex n, Direction dir) const {
  return dir == Direction::Out ? std::span<const std::uint32_t>(out_[n]) : std::span<const std::uint32_t>(in_[n]);
}

std::vector<NodeIndex> KnowledgeGraph::neighbors(NodeIndex n, EdgeType type, Direction dir) const {
  std::vector<NodeIndex> out;
  for (std::uint32_t e : incident(n, dir)) {
    const Edge& edge = edges_[e];
    if (edge.type == type) out.push_back(dir == Direction::Out ? edge.dst : edge.src);
  }
  return out;
}

std::vector<std::string> KnowledgeGraph::neighbors(std::string_view id, EdgeType type, Direction dir) const {
  std::vector<std::string> out;
  for (NodeIndex m : neighbors(at(id), type, dir)) out.push_back(nodes_[m].id);
  return out;
}

std::size_t KnowledgeGraph::degree(NodeIndex n, EdgeType type, Direction dir) const {
  std::size_t count = 0;
  for (std::uint32_t e : incident(n, dir)) count += edges_[e].type == type;
  return count;
}

bool KnowledgeGraph::has_edge(EdgeType type, NodeIndex src, NodeIndex dst) const {
  return edge_set_.count(edge_key(type, src, dst)) > 0;
}

const AttrValue* KnowledgeGraph::attr(NodeIndex n, std::string_view name) const {
  const auto& attrs = nodes_[n].attrs;
  const auto it = attrs.find(name);
  return it == attrs.end() ? nullptr : &it->second;
}

double KnowledgeGraph::number_attr(NodeIndex n, std::string_view name) const {
  const AttrValue* v = attr(n, name);
  if (v == nullptr) throw GraphError("node '" + nodes_[n].id + "' lacks attribute " + std::string(name));
  if (const auto* d = std::get_if<double>(v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
  if (const auto* b = std::get_if<bool>(v)) return *b ? 1.0 : 0.0;
  throw GraphError("attribute " + std::string(name) + " of '" + nodes_[n].id + "' is not numeric");
}

GraphStats stats(const KnowledgeGraph& g) {
  GraphStats s;
  for (const Node& n : g.nodes()) ++s.nodes_by_type[std::string(to_string(n.type))];
  for (const Edge& e : g.edges()) ++s.edges_by_type[std::string(to_string(e.type))];
  s.node_total = g.node_count();
  s.edge_total = g.edge_count();
  return s;
}

}  // namespace scenekg
