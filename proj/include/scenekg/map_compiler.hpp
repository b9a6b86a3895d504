#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "scenekg/config.hpp"
#include "scenekg/geometry.hpp"
#include "scenekg/kg.hpp"
#include "scenekg/scene_ir.hpp"

namespace scenekg {

class MapCompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LaneSnippetRec {
  double s_start = 0.0;
  double s_end = 0.0;
  DividerType left = DividerType::NoMarking;
  DividerType right = DividerType::NoMarking;
  double length() const { return s_end - s_start; }
};

struct LaneSliceRec {
  Pose2D pose;
  double s = 0.0;
  double width = 0.0;
};

/// Slices at every `resolution` metres of centreline; width is the distance
/// between the closest points on the left and right border unions.
std::vector<LaneSliceRec> compute_lane_slices(const RawLane& lane, double resolution);

/// Sections of constant border type, each cut into ceil(L / max_len) equal pieces.
std::vector<LaneSnippetRec> compute_lane_snippets(const RawLane& lane, const CompilerConfig& cfg);

enum class Side { Left, Right };

/// Physical neighbourhood of two lanes that share a stretch of border.
struct LaneAdjacency {
  Side side_a;  // side of lane a facing lane b
  Side side_b;
  bool same_direction;
  /// Arc interval on lane a's centreline along which the borders coincide.
  double shared_s0;
  double shared_s1;
  double shared_length;
};

std::optional<LaneAdjacency> lane_adjacency(const RawLane& a, const RawLane& b, const CompilerConfig& cfg);

struct LaneModel {
  std::string id;
  Polyline centerline;
  Polygon polygon;
  std::vector<BorderSegment> left_border;
  std::vector<BorderSegment> right_border;
  NodeIndex node = 0;
  std::vector<LaneSnippetRec> snippets;
  std::vector<NodeIndex> snippet_nodes;
  std::vector<LaneSliceRec> slices;
  std::vector<NodeIndex> slice_nodes;
  int block = -1;
  std::vector<int> next;
  std::vector<int> prev;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<int> connectors_out;
  std::vector<int> connectors_in;
  /// Stop areas and crossings whose interiors overlap the lane (area indices).
  std::vector<int> overlapping_areas;
};

struct ConnectorModel {
  std::string id;
  int incoming = -1;
  int outgoing = -1;
  Polyline centerline;
  NodeIndex node = 0;
  std::vector<Pose2D> poses;
  std::vector<NodeIndex> pose_nodes;
  std::vector<int> intersections;  // area indices
  /// Connectors on a shared intersection whose paths come within twice the buffer.
  std::vector<int> conflicts;
};

struct RoadBlockRec {
  std::string id;
  std::vector<int> lanes;  // left to right
  double heading = 0.0;
  Polygon hull;
  NodeIndex node = 0;
  std::vector<int> next;
  std::vector<int> opposing;
};

struct AreaModel {
  std::string id;
  NodeType type;
  Polygon polygon;
  NodeIndex node = 0;
};

struct LanePair {
  int a;
  int b;
  LaneAdjacency adjacency;
};

struct MapModel {
  std::vector<LaneModel> lanes;
  /// Physically adjacent lane pairs (a < b), either direction of travel.
  std::vector<LanePair> adjacent_pairs;
  std::vector<ConnectorModel> connectors;
  std::vector<RoadBlockRec> blocks;
  std::vector<AreaModel> areas;
  std::unordered_map<std::string, int> lane_index;
  std::unordered_map<std::string, int> connector_index;
  std::unordered_map<std::string, int> area_index;
  geom::SpatialGrid lane_grid;
  geom::SpatialGrid connector_grid;
  geom::SpatialGrid area_grid;
  geom::SpatialGrid block_grid;
  std::optional<geom::LatLon> geo_origin;
  std::vector<std::string> warnings;
};

/// Lanes, connectors, ordered poses, slices, snippets and lateral neighbours.
void build_lane_graph(const RawMapBundle& raw, const CompilerConfig& cfg, KnowledgeGraph& g, MapModel& model,
                      unsigned jobs = 1);
void link_switch_via(const CompilerConfig& cfg, KnowledgeGraph& g, MapModel& model);
void build_road_blocks(const CompilerConfig& cfg, KnowledgeGraph& g, MapModel& model);
void build_infrastructure(const RawMapBundle& raw, const CompilerConfig& cfg, KnowledgeGraph& g, MapModel& model);

/// All of the above in order.
MapModel compile_map(const RawMapBundle& raw, const CompilerConfig& cfg, KnowledgeGraph& g, unsigned jobs = 1);

}  // namespace scenekg
