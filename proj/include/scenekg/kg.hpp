#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "scenekg/scene_ir.hpp"

namespace scenekg {

enum class NodeType : std::uint8_t {
  Trip,
  Location,
  Sequence,
  Scene,
  Participant,
  PedestrianAdult,
  PedestrianChild,
  Wheelchair,
  Stroller,
  PersonalMobility,
  PoliceOfficer,
  ConstructionWorker,
  Animal,
  Car,
  Motorcycle,
  Bicycle,
  BendyBus,
  RigidBus,
  Truck,
  ConstructionVehicle,
  Ambulance,
  PoliceVehicle,
  Trailer,
  Barrier,
  TrafficCone,
  PushablePullable,
  Debris,
  BicycleRack,
  SceneParticipant,
  AreaElement,
  Lane,
  LaneConnector,
  LaneSnippet,
  LaneSlice,
  Pose,
  OrderedPose,
  RoadBlock,
  StopArea,
  PedCrossingStopArea,
  TrafficLightStopArea,
  YieldStopArea,
  StopSignArea,
  TurnStopArea,
  TrafficLight,
  PedCrossing,
  Walkway,
  CarparkArea,
  Intersection,
  Geometry,
  Point,
  Polygon,
  LineString,
};
inline constexpr std::size_t kNodeTypeCount = static_cast<std::size_t>(NodeType::LineString) + 1;

enum class EdgeType : std::uint8_t {
  hasScene,
  hasNextScene,
  hasPreviousScene,
  hasSequence,
  hasLocation,
  hasSceneParticipant,
  isSceneParticipantOf,
  inNextScene,
  hasNextLane,
  hasPreviousLane,
  hasLeftLane,
  hasRightLane,
  hasIncomingLane,
  hasOutgoingLane,
  hasLaneSnippet,
  hasNextLaneSnippet,
  switchViaNoMarking,
  switchViaSingleDashed,
  switchViaDoubleDashed,
  switchViaSingleSolid,
  switchViaDoubleSolid,
  switchViaSolidDashed,
  switchViaDashedSolid,
  switchViaRoadEdge,
  laneHasSlice,
  hasNextLaneSlice,
  connectorHasPose,
  hasNextPose,
  causesStopAt,
  connectsWalkways,
  walkwayIsNextTo,
  carparkIsNextTo,
  hasNextRoadBlock,
  hasOpposingRoadBlock,
  isLaneOnRoadBlock,
  isConnectorOnRoadSegment,
  trafficLightHasPose,
  hasShape,
  isOn,
  longitudinal,
  lateral,
  intersecting,
};
inline constexpr std::size_t kEdgeTypeCount = static_cast<std::size_t>(EdgeType::intersecting) + 1;

std::string_view to_string(NodeType t);
std::string_view to_string(EdgeType t);
std::optional<NodeType> node_type_from_string(std::string_view s);
std::optional<EdgeType> edge_type_from_string(std::string_view s);

/// Direct supertype, if any. The hierarchy is a forest.
std::optional<NodeType> supertype(NodeType t);
/// Reflexive subsumption: is_a(OrderedPose, Pose) and is_a(Pose, Pose) hold.
bool is_a(NodeType t, NodeType ancestor);
/// Types that never label a concrete node.
bool is_abstract(NodeType t);

NodeType node_type_for(Category c);
std::optional<Category> category_for(NodeType t);
NodeType stop_area_type_for(StopType s);
EdgeType switch_via_for(DividerType d);
std::optional<DividerType> divider_for(EdgeType e);
bool is_switch_via(EdgeType e);

struct EdgeSignature {
  std::vector<NodeType> domain;
  std::vector<NodeType> range;
  bool functional = false;
};
const EdgeSignature& signature(EdgeType e);

/// Geometry literal; exported with the GeoSPARQL wktLiteral datatype.
struct WktLiteral {
  std::string text;
  friend bool operator==(const WktLiteral&, const WktLiteral&) = default;
};

using AttrValue = std::variant<std::int64_t, double, bool, std::string, WktLiteral>;
using AttrMap = std::map<std::string, AttrValue, std::less<>>;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using NodeIndex = std::uint32_t;

struct Node {
  NodeType type;
  std::string id;
  AttrMap attrs;
};

struct Edge {
  EdgeType type;
  NodeIndex src;
  NodeIndex dst;
};

enum class Direction { Out, In };

/// Typed property graph with stable insertion order. Single writer during
/// construction; read-only afterwards.
class KnowledgeGraph {
 public:
  NodeIndex add_node(NodeType type, std::string id, AttrMap attrs = {});
  /// Returns false if the identical edge already exists.
  bool add_edge(EdgeType type, NodeIndex src, NodeIndex dst);
  bool add_edge(EdgeType type, std::string_view src, std::string_view dst);
  /// Bypasses signature checks; used to build deliberately invalid graphs.
  void add_edge_unchecked(EdgeType type, NodeIndex src, NodeIndex dst);

  void set_attr(NodeIndex n, std::string name, AttrValue value);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const Node& node(NodeIndex n) const { return nodes_[n]; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  std::optional<NodeIndex> find(std::string_view id) const;
  NodeIndex at(std::string_view id) const;

  /// Edge indices touching `n` in the given direction, in insertion order.
  std::span<const std::uint32_t> incident(NodeIndex n, Direction dir) const;
  std::vector<NodeIndex> neighbors(NodeIndex n, EdgeType type, Direction dir) const;
  std::vector<std::string> neighbors(std::string_view id, EdgeType type, Direction dir) const;
  std::size_t degree(NodeIndex n, EdgeType type, Direction dir) const;
  bool has_edge(EdgeType type, NodeIndex src, NodeIndex dst) const;

  const AttrValue* attr(NodeIndex n, std::string_view name) const;
  double number_attr(NodeIndex n, std::string_view name) const;

 private:
  static std::uint64_t edge_key(EdgeType type, NodeIndex src, NodeIndex dst);
  void check_signature(EdgeType type, NodeIndex src, NodeIndex dst) const;

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::uint32_t>> out_;
  std::vector<std::vector<std::uint32_t>> in_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::unordered_set<std::uint64_t> edge_set_;
};

struct GraphStats {
  std::map<std::string, std::size_t> nodes_by_type;
  std::map<std::string, std::size_t> edges_by_type;
  std::size_t node_total = 0;
  std::size_t edge_total = 0;
};

GraphStats stats(const KnowledgeGraph& g);

}  // namespace scenekg
