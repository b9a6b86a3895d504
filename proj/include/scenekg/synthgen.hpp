#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scenekg/scene_ir.hpp"

namespace scenekg::synth {

class SynthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kLaneWidth = 3.5;
/// Straight roads and curves are cut into lanes of about this length.
inline constexpr double kPieceLength = 50.0;

/// Two-way road along +x from the origin. Forward lanes F<i>_<k> lie at y < 0,
/// backward lanes B<i>_<k> at y > 0; i counts outwards, k along travel.
struct StraightRoad {
  int lanes_per_dir = 1;
  double length_m = 100.0;
};

/// Two-way counter-clockwise arc starting at the origin heading +x, centred on (0, radius).
struct CurvedRoad {
  double radius_m = 60.0;
  double arc_deg = 90.0;
  int lanes_per_dir = 1;
};

/// Four arms E, N, W, S around a square box with crossings, corner walkways and
/// traffic-light stop areas on every approach.
struct FourWayIntersection {
  int lanes_per_arm = 1;
  double arm_length_m = 50.0;
};

/// One lane each way with a car park along the forward side and a walkway beyond it.
struct ParkingStrip {
  double length_m = 100.0;
};

/// Square lattice of junctions joined by one-lane-each-way roads with walkways.
struct CityGrid {
  int junctions_per_side = 12;
  double spacing_m = 100.0;
};

using Layout = std::variant<StraightRoad, CurvedRoad, FourWayIntersection, ParkingStrip, CityGrid>;

struct AgentPlan {
  std::string id;
  Category category = Category::Car;
  std::vector<std::string> path;  // lane ids, consecutive lanes joined by a connector
  double speed = 0.0;
  double start_offset = 0.0;
  /// Positive shifts the agent to the left of its path.
  double lateral_offset = 0.0;
  std::optional<Pose2D> fixed_pose;
  bool is_ego = false;
  double enter_s = 0.0;
  std::optional<double> exit_s;
  std::optional<Size3> size;
};

struct ScenarioTemplate {
  std::string name = "scenario";
  Layout layout = StraightRoad{};
  /// Empty means the layout's default cast.
  std::vector<AgentPlan> agents;
  /// Additional seeded agents on random lane paths.
  int random_agents = 0;
  std::string trip_id = "trip0";
  std::string sequence_id = "seq0";
};

struct Scenario {
  RawMapBundle map;
  RawTripSet trips;
};

inline constexpr std::int64_t kBaseTimestampUs = 1'600'000'000'000'000;
inline constexpr double kSceneRateHz = 2.0;

RawMapBundle build_layout(const Layout& layout);
std::vector<AgentPlan> default_agents(const Layout& layout);
Size3 default_size(Category c);

/// Deterministic in (template, seed); scenes at 2 Hz for duration_s seconds.
Scenario generate(const ScenarioTemplate& tpl, std::uint64_t seed, double duration_s);

/// "straight:lanes=2,length=200", "curved:radius=60,arc=90", "intersection:lanes=1",
/// "parking:length=100", "city:junctions=12,spacing=100".
ScenarioTemplate template_from_spec(std::string_view spec);

/// Rotates by `yaw` about the origin, then shifts, every global coordinate and heading.
void apply_rigid_transform(RawMapBundle& map, RawTripSet& trips, double yaw, Vec2 shift);

}  // namespace scenekg::synth
