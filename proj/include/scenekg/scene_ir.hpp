#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scenekg/geometry.hpp"

namespace scenekg {

using geom::Polygon;
using geom::Polyline;
using geom::Pose2D;
using geom::Vec2;

enum class DividerType : std::uint8_t {
  NoMarking,
  SingleDashed,
  DoubleDashed,
  SingleSolid,
  DoubleSolid,
  SolidDashed,
  DashedSolid,
  RoadEdge,
};
inline constexpr std::size_t kDividerTypeCount = 8;

enum class StopType : std::uint8_t { PedCrossing, TrafficLight, Yield, StopSign, Turn };
inline constexpr std::size_t kStopTypeCount = 5;

enum class TrafficLightType : std::uint8_t { Horizontal, Vertical };

enum class AreaKind : std::uint8_t { Walkway, CarparkArea, PedCrossing, RoadSegment };

// nuScenes category list, in its canonical order.
enum class Category : std::uint8_t {
  PedestrianAdult,
  PedestrianChild,
  PedestrianWheelchair,
  PedestrianStroller,
  PedestrianPersonalMobility,
  PedestrianPoliceOfficer,
  PedestrianConstructionWorker,
  Animal,
  Car,
  Motorcycle,
  Bicycle,
  BusBendy,
  BusRigid,
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
};
inline constexpr std::size_t kCategoryCount = 23;

enum class Split : std::uint8_t { Train, Val, Test };

std::string_view to_string(DividerType v);
std::string_view to_string(StopType v);
std::string_view to_string(TrafficLightType v);  // "H" / "V"
std::string_view to_string(Category v);          // dotted nuScenes name
std::string_view to_string(Split v);

std::optional<DividerType> divider_from_string(std::string_view s);
std::optional<StopType> stop_type_from_string(std::string_view s);
std::optional<TrafficLightType> tl_type_from_string(std::string_view s);
std::optional<Category> category_from_string(std::string_view s);
std::optional<Split> split_from_string(std::string_view s);

bool is_vehicle(Category c);

/// Positioned parse failure. `line`/`column` are 1-based when known (0 otherwise);
/// `path` locates the offending value inside the document.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line, std::size_t column, std::string path);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& path() const { return path_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string path_;
  std::string detail_;
};

/// Cross-references that do not resolve.
class ReferenceError : public std::runtime_error {
 public:
  explicit ReferenceError(std::vector<std::string> ids);
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

struct BorderSegment {
  Polyline line;
  DividerType divider;
};

struct RawLane {
  std::string id;
  Polyline centerline;
  std::vector<BorderSegment> left_border;
  std::vector<BorderSegment> right_border;
  Polygon polygon;
  std::optional<std::string> road_segment_id;
};

struct RawConnector {
  std::string id;
  std::string incoming_lane;
  std::string outgoing_lane;
  Polyline centerline;
};

struct RawStopLine {
  std::string id;
  Polygon polygon;
  StopType stop_type;
  std::optional<std::string> cause_ref;
};

struct RawTrafficLight {
  std::string id;
  Pose2D pose;
  TrafficLightType tl_type;
};

struct RawArea {
  std::string id;
  AreaKind kind;
  Polygon polygon;
  bool is_intersection = false;
};

struct RawLocation {
  std::string id;
  std::string name;
  bool right_hand_traffic = true;
  std::optional<geom::LatLon> geo_origin;
};

struct RawMapBundle {
  std::vector<RawLocation> locations;
  std::vector<RawLane> lanes;
  std::vector<RawConnector> connectors;
  std::vector<RawArea> walkways;
  std::vector<RawArea> ped_crossings;
  std::vector<RawStopLine> stop_lines;
  std::vector<RawTrafficLight> traffic_lights;
  std::vector<RawArea> road_segments;
  std::vector<RawArea> carpark_areas;
  /// Non-fatal findings such as unresolved stop-line causes.
  std::vector<std::string> warnings;

  std::optional<geom::LatLon> geo_origin() const;
  geom::BoundingBox bounds() const;
};

struct Size3 {
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
};

struct RawAnnotation {
  std::string agent_id;
  Category category = Category::Car;
  Pose2D pose;
  Size3 size;
  bool is_ego = false;
};

struct RawScene {
  std::int64_t timestamp_us = 0;
  Pose2D ego_pose;
  std::vector<RawAnnotation> annotations;
};

struct RawSequence {
  std::string id;
  std::vector<RawScene> scenes;
};

struct RawTrip {
  std::string id;
  std::string location_id;
  std::vector<RawSequence> sequences;
};

struct RawTripSet {
  std::vector<RawTrip> trips;
  std::vector<RawLocation> locations;
};

using SplitTable = std::map<std::string, Split>;

RawMapBundle parse_map_bundle(std::string_view text);
RawTripSet parse_trip_log(std::string_view text);
SplitTable parse_splits(std::string_view text);

std::string serialize_map_bundle(const RawMapBundle& map);
std::string serialize_trip_log(const RawTripSet& trips);
std::string serialize_splits(const SplitTable& splits);

struct ValidationIssue {
  enum class Severity { Warning, Error };
  Severity severity;
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool empty() const { return issues.empty(); }
  std::size_t error_count() const;
};

/// Margin around the map extent beyond which agents are reported.
inline constexpr double kMapExtentMarginM = 100.0;

ValidationReport validate_raw(const RawMapBundle& map, const RawTripSet& trips);

}  // namespace scenekg
