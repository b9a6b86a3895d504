#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "scenekg/synthgen.hpp"

using namespace scenekg;
using doctest::Approx;

namespace {

const RawLane& lane(const RawMapBundle& m, const std::string& id) {
  const auto it = std::find_if(m.lanes.begin(), m.lanes.end(), [&](const RawLane& l) { return l.id == id; });
  REQUIRE(it != m.lanes.end());
  return *it;
}

const RawAnnotation* find(const RawScene& s, const std::string& agent) {
  for (const auto& a : s.annotations) {
    if (a.agent_id == agent) return &a;
  }
  return nullptr;
}

bool inside_some_lane(const RawMapBundle& m, Vec2 p) {
  for (const auto& l : m.lanes) {
    if (oracle::winding_number(p, std::vector<Vec2>(l.polygon.vertices().begin(), l.polygon.vertices().end())) != 0) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("straight layout lane grid") {
  const RawMapBundle m = synth::build_layout(synth::StraightRoad{2, 200});
  // Four 50 m pieces for each of two lanes in each direction.
  CHECK(m.lanes.size() == 16);
  const RawLane& f = lane(m, "F0_0");
  CHECK(f.centerline.length() == Approx(50.0));
  CHECK(f.centerline.points().front().y == Approx(-1.75));
  CHECK(f.centerline.points().back().x > f.centerline.points().front().x);
  CHECK(std::abs(f.polygon.area()) == Approx(50.0 * 3.5));
  const RawLane& b = lane(m, "B1_0");
  CHECK(b.centerline.points().front().y == Approx(1.75 + 3.5));
  CHECK(b.centerline.points().back().x < b.centerline.points().front().x);
  std::set<std::string> ids;
  for (const auto& c : m.connectors) {
    ids.insert(c.incoming_lane);
    CHECK(c.centerline.length() == Approx(2.0).epsilon(0.05));
    const Vec2 end = lane(m, c.incoming_lane).centerline.points().back();
    const Vec2 start = lane(m, c.outgoing_lane).centerline.points().front();
    // Connectors straddle the seam between consecutive pieces.
    CHECK(oracle::dist(end, start) < 1e-6);
    const Vec2 mid = (c.centerline.points().front() + c.centerline.points().back()) * 0.5;
    CHECK(oracle::dist(mid, end) < 1e-6);
  }
  // Every lane but the last piece in each of the four rows continues.
  CHECK(ids.size() == 12);
  CHECK(m.walkways.size() == 2);
}

TEST_CASE("curved layout follows the arc") {
  const RawMapBundle m = synth::build_layout(synth::CurvedRoad{60, 90, 1});
  REQUIRE(!m.lanes.empty());
  double total = 0;
  for (const auto& l : m.lanes) {
    for (const Vec2 p : l.centerline.points()) {
      const double r = oracle::dist(p, {0.0, 60.0});
      const bool fwd = l.id[0] == 'F';
      CHECK(r == Approx(fwd ? 60.0 + 1.75 : 60.0 - 1.75).epsilon(1e-3));
    }
    if (l.id[0] == 'F') total += l.centerline.length();
  }
  // Forward lanes ride the outer arc at radius 61.75 and roughly tile the quarter turn.
  CHECK(total == Approx(61.75 * geom::kPi / 2).epsilon(0.02));
}

TEST_CASE("intersection layout inventory") {
  const RawMapBundle m = synth::build_layout(synth::FourWayIntersection{1, 50});
  CHECK(m.lanes.size() == 8);
  CHECK(m.connectors.size() == 12);
  CHECK(m.ped_crossings.size() == 4);
  CHECK(m.walkways.size() == 4);
  CHECK(m.traffic_lights.size() == 4);
  CHECK(m.stop_lines.size() >= 4);
  std::set<std::string> tl;
  for (const auto& t : m.traffic_lights) tl.insert(t.id);
  for (const auto& s : m.stop_lines) {
    if (s.stop_type == StopType::TrafficLight) {
      REQUIRE(s.cause_ref);
      CHECK(tl.count(*s.cause_ref) == 1);
    }
  }
  const auto box = std::find_if(m.road_segments.begin(), m.road_segments.end(), [](const RawArea& a) { return a.is_intersection; });
  CHECK(box != m.road_segments.end());
}

TEST_CASE("scenes run at two hertz with one ego") {
  const auto sc = synth::generate(synth::template_from_spec("straight"), 0, 20.0);
  REQUIRE(sc.trips.trips.size() == 1);
  const auto& scenes = sc.trips.trips[0].sequences.at(0).scenes;
  REQUIRE(scenes.size() == 40);
  CHECK(scenes[0].timestamp_us == synth::kBaseTimestampUs);
  for (std::size_t k = 0; k < scenes.size(); ++k) {
    CHECK(scenes[k].timestamp_us == synth::kBaseTimestampUs + static_cast<std::int64_t>(k) * 500000);
    CHECK(std::count_if(scenes[k].annotations.begin(), scenes[k].annotations.end(),
                        [](const RawAnnotation& a) { return a.is_ego; }) == 1);
    const RawAnnotation* ego = find(scenes[k], "ego");
    REQUIRE(ego != nullptr);
    CHECK(oracle::dist(ego->pose.position(), scenes[k].ego_pose.position()) < 1e-12);
  }
}

TEST_CASE("agents move at their planned speed along lanes") {
  const auto sc = synth::generate(synth::template_from_spec("straight"), 0, 20.0);
  const auto& scenes = sc.trips.trips[0].sequences[0].scenes;
  for (std::size_t k = 1; k < scenes.size(); ++k) {
    const RawAnnotation* a = find(scenes[k - 1], "car_lead");
    const RawAnnotation* b = find(scenes[k], "car_lead");
    REQUIRE(a != nullptr);
    REQUIRE(b != nullptr);
    CHECK(oracle::dist(a->pose.position(), b->pose.position()) == Approx(2.0));
    CHECK(inside_some_lane(sc.map, b->pose.position()));
    const RawAnnotation* o0 = find(scenes[k - 1], "car_oncoming");
    const RawAnnotation* o1 = find(scenes[k], "car_oncoming");
    REQUIRE(o1 != nullptr);
    CHECK(oracle::dist(o0->pose.position(), o1->pose.position()) == Approx(2.5));
    CHECK(std::abs(oracle::wrap(o1->pose.yaw - geom::kPi)) < 1e-9);
  }
}

TEST_CASE("intersection turn stays on the connector") {
  const auto sc = synth::generate(synth::template_from_spec("intersection"), 0, 30.0);
  const auto& scenes = sc.trips.trips[0].sequences[0].scenes;
  double yaw0 = 0;
  double yaw1 = 0;
  for (std::size_t k = 0; k < scenes.size(); ++k) {
    const RawAnnotation* a = find(scenes[k], "car_turn");
    if (!a) continue;
    if (k == 0) yaw0 = a->pose.yaw;
    yaw1 = a->pose.yaw;
  }
  // W_in0 heads east, N_out0 heads north: a left turn of 90 degrees.
  CHECK(std::abs(oracle::wrap(yaw1 - yaw0 - geom::kPi / 2)) < 1e-6);
}

TEST_CASE("generation is deterministic in the seed") {
  auto tpl = synth::template_from_spec("city:junctions=2,agents=6");
  const auto a = synth::generate(tpl, 5, 8.0);
  const auto b = synth::generate(tpl, 5, 8.0);
  const auto c = synth::generate(tpl, 6, 8.0);
  CHECK(serialize_map_bundle(a.map) == serialize_map_bundle(b.map));
  CHECK(serialize_trip_log(a.trips) == serialize_trip_log(b.trips));
  CHECK(serialize_trip_log(a.trips) != serialize_trip_log(c.trips));
}

TEST_CASE("generated inputs parse back and validate") {
  for (const char* spec : {"straight:lanes=2,length=200", "curved", "intersection:lanes=2", "parking", "city:junctions=3"}) {
    CAPTURE(spec);
    const auto sc = synth::generate(synth::template_from_spec(spec), 2, 6.0);
    const std::string map_text = serialize_map_bundle(sc.map);
    const std::string trip_text = serialize_trip_log(sc.trips);
    const RawMapBundle m = parse_map_bundle(map_text);
    const RawTripSet t = parse_trip_log(trip_text);
    CHECK(serialize_map_bundle(m) == map_text);
    CHECK(serialize_trip_log(t) == trip_text);
    CHECK(validate_raw(m, t).error_count() == 0);
  }
}

TEST_CASE("rigid transforms preserve distances and relative headings") {
  auto sc = synth::generate(synth::template_from_spec("intersection"), 3, 4.0);
  const auto before = sc;
  synth::apply_rigid_transform(sc.map, sc.trips, 0.7, {120.0, -40.0});
  const double c = std::cos(0.7);
  const double s = std::sin(0.7);
  for (std::size_t i = 0; i < sc.map.lanes.size(); ++i) {
    const auto p0 = before.map.lanes[i].centerline.points();
    const auto p1 = sc.map.lanes[i].centerline.points();
    REQUIRE(p0.size() == p1.size());
    for (std::size_t k = 0; k < p0.size(); ++k) {
      CHECK(p1[k].x == Approx(c * p0[k].x - s * p0[k].y + 120.0));
      CHECK(p1[k].y == Approx(s * p0[k].x + c * p0[k].y - 40.0));
    }
  }
  const auto& s0 = before.trips.trips[0].sequences[0].scenes[0];
  const auto& s1 = sc.trips.trips[0].sequences[0].scenes[0];
  for (std::size_t i = 0; i < s0.annotations.size(); ++i) {
    CHECK(std::abs(oracle::wrap(s1.annotations[i].pose.yaw - s0.annotations[i].pose.yaw - 0.7)) < 1e-9);
  }
  CHECK(std::abs(oracle::wrap(s1.ego_pose.yaw - s0.ego_pose.yaw - 0.7)) < 1e-9);
}

TEST_CASE("template strings are parsed strictly") {
  CHECK(std::holds_alternative<synth::StraightRoad>(synth::template_from_spec("straight").layout));
  const auto st = std::get<synth::StraightRoad>(synth::template_from_spec("straight:lanes=3,length=150").layout);
  CHECK(st.lanes_per_dir == 3);
  CHECK(st.length_m == 150.0);
  CHECK(synth::template_from_spec("city:junctions=2,agents=6").random_agents == 6);
  CHECK_THROWS_AS(synth::template_from_spec("highway"), synth::SynthError);
  CHECK_THROWS_AS(synth::template_from_spec("straight:lanes"), synth::SynthError);
  CHECK_THROWS_AS(synth::template_from_spec("straight:lanes=two"), synth::SynthError);
  CHECK_THROWS_AS(synth::template_from_spec("straight:radius=3"), synth::SynthError);
  CHECK_THROWS_AS(synth::build_layout(synth::StraightRoad{0, 100}), synth::SynthError);
  CHECK_THROWS_AS(synth::generate(synth::template_from_spec("straight"), 0, 0.0), synth::SynthError);
}

TEST_CASE("custom casts are checked") {
  synth::ScenarioTemplate tpl;
  tpl.layout = synth::StraightRoad{1, 100};
  tpl.agents.push_back({"a", Category::Car, {"F0_0"}, 1.0});
  // Without an ego in the cast a seeded one is added.
  const auto filled = synth::generate(tpl, 0, 2.0);
  const auto& annotations = filled.trips.trips[0].sequences[0].scenes[0].annotations;
  CHECK(std::count_if(annotations.begin(), annotations.end(), [](const RawAnnotation& r) { return r.is_ego; }) == 1);
  tpl.agents.push_back({"ego", Category::Car, {"F0_0", "B0_0"}, 1.0, 0.0, 0.0, std::nullopt, true});
  CHECK_THROWS_AS(synth::generate(tpl, 0, 2.0), synth::SynthError);  // disconnected path
  tpl.agents.back().path = {"F0_0", "F0_1"};
  CHECK_NOTHROW(synth::generate(tpl, 0, 2.0));
  auto two = tpl;
  two.agents.push_back({"ego2", Category::Car, {"F0_1"}, 1.0, 0.0, 0.0, std::nullopt, true});
  CHECK_THROWS_AS(synth::generate(two, 0, 2.0), synth::SynthError);
  tpl.agents.push_back({"ghost", Category::Car, {}, 0.0});
  CHECK_THROWS_AS(synth::generate(tpl, 0, 2.0), synth::SynthError);
}

TEST_CASE("default sizes by category") {
  CHECK(synth::default_size(Category::Car).length > synth::default_size(Category::Bicycle).length);
  CHECK(synth::default_size(Category::Truck).length > synth::default_size(Category::Car).length);
  CHECK(synth::default_size(Category::PedestrianAdult).length < 1.5);
}
