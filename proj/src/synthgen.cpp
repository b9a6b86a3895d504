#include "scenekg/synthgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <unordered_map>

namespace scenekg::synth {
namespace {

using geom::kPi;

constexpr double kHalf = 0.5 * kLaneWidth;
constexpr double kWalkwayGap = 1.0;
constexpr double kWalkwayWidth = 3.0;

/// Exact quarter-turn rotation about the origin.
Vec2 quarter(Vec2 p, int q) {
  switch (((q % 4) + 4) % 4) {
    case 1: return {-p.y, p.x};
    case 2: return {-p.x, -p.y};
    case 3: return {p.y, -p.x};
    default: return p;
  }
}

std::vector<Vec2> quarter(const std::vector<Vec2>& pts, int q) {
  std::vector<Vec2> out;
  for (const Vec2& p : pts) out.push_back(quarter(p, q));
  return out;
}

std::vector<Vec2> rect(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

class MapBuilder {
 public:
  explicit MapBuilder(std::string name) {
    map_.locations.push_back({"synth", std::move(name), true, geom::LatLon{1.3, 103.8}});
  }

  void lane(std::string id, std::vector<Vec2> center, std::vector<Vec2> left, std::vector<Vec2> right, DividerType ld,
            DividerType rd) {
    std::vector<Vec2> ring = left;
    for (auto it = right.rbegin(); it != right.rend(); ++it) ring.push_back(*it);
    map_.lanes.push_back({std::move(id), Polyline(std::move(center)), {{Polyline(left), ld}}, {{Polyline(right), rd}},
                          Polygon(std::move(ring)), std::nullopt});
  }

  /// Lane whose borders are the centreline shifted by half a lane width.
  void straight_lane(std::string id, Vec2 a, Vec2 b, DividerType ld, DividerType rd) {
    const Vec2 dir = (b - a) / geom::distance(a, b);
    const Vec2 n = geom::left_normal(dir) * kHalf;
    lane(std::move(id), {a, b}, {a + n, b + n}, {a - n, b - n}, ld, rd);
  }

  void connector(std::string id, std::string in, std::string out, std::vector<Vec2> pts) {
    map_.connectors.push_back({std::move(id), std::move(in), std::move(out), Polyline(std::move(pts))});
  }
  void area(std::vector<RawArea>& list, std::string id, AreaKind kind, std::vector<Vec2> ring, bool inter = false) {
    list.push_back({std::move(id), kind, Polygon(std::move(ring)), inter});
  }
  void walkway(std::string id, std::vector<Vec2> ring) { area(map_.walkways, std::move(id), AreaKind::Walkway, std::move(ring)); }
  void crossing(std::string id, std::vector<Vec2> ring) {
    area(map_.ped_crossings, std::move(id), AreaKind::PedCrossing, std::move(ring));
  }
  void carpark(std::string id, std::vector<Vec2> ring) {
    area(map_.carpark_areas, std::move(id), AreaKind::CarparkArea, std::move(ring));
  }
  void junction(std::string id, std::vector<Vec2> ring) {
    area(map_.road_segments, std::move(id), AreaKind::RoadSegment, std::move(ring), true);
  }
  void stop_line(std::string id, std::vector<Vec2> ring, StopType type, std::optional<std::string> cause) {
    map_.stop_lines.push_back({std::move(id), Polygon(std::move(ring)), type, std::move(cause)});
  }
  void traffic_light(std::string id, Pose2D pose, TrafficLightType type) {
    map_.traffic_lights.push_back({std::move(id), pose, type});
  }

  RawMapBundle take() { return std::move(map_); }

 private:
  RawMapBundle map_;
};

std::vector<Vec2> bezier(Vec2 p0, Vec2 p1, Vec2 p2) {
  const double approx = geom::distance(p0, p1) + geom::distance(p1, p2);
  const int n = std::max(8, static_cast<int>(std::ceil(approx / 0.5)));
  std::vector<Vec2> pts;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    pts.push_back(p0 * ((1 - t) * (1 - t)) + p1 * (2 * t * (1 - t)) + p2 * (t * t));
  }
  return pts;
}

/// Straight when the headings are parallel, otherwise a quadratic Bezier whose
/// control point is where the two tangents meet.
std::vector<Vec2> turn_path(Vec2 p0, Vec2 d0, Vec2 p2, Vec2 d2) {
  const double denom = geom::cross(d0, d2);
  if (std::abs(denom) < 1e-9) return {p0, p2};
  const double t = geom::cross(p2 - p0, d2) / denom;
  return bezier(p0, p0 + d0 * t, p2);
}

DividerType inner_divider(int i) { return i == 0 ? DividerType::DoubleSolid : DividerType::SingleDashed; }
DividerType outer_divider(int i, int n) { return i == n - 1 ? DividerType::RoadEdge : DividerType::SingleDashed; }

int piece_count(double length) { return std::max(1, static_cast<int>(std::lround(length / kPieceLength))); }

std::string lane_id(char dir, int i, int k) { return std::string(1, dir) + std::to_string(i) + "_" + std::to_string(k); }

void add_straight_road(MapBuilder& b, int n, double length) {
  if (n < 1 || !(length > 0)) throw SynthError("straight road needs at least one lane and a positive length");
  const int pieces = piece_count(length);
  const double piece = length / pieces;
  for (int i = 0; i < n; ++i) {
    const double yf = -(i + 0.5) * kLaneWidth;
    for (int k = 0; k < pieces; ++k) {
      b.straight_lane(lane_id('F', i, k), {k * piece, yf}, {(k + 1) * piece, yf}, inner_divider(i), outer_divider(i, n));
      const double x0 = length - k * piece;
      b.straight_lane(lane_id('B', i, k), {x0, -yf}, {x0 - piece, -yf}, inner_divider(i), outer_divider(i, n));
      if (k + 1 < pieces) {
        const double seam = (k + 1) * piece;
        b.connector("C_" + lane_id('F', i, k), lane_id('F', i, k), lane_id('F', i, k + 1), {{seam - 1, yf}, {seam + 1, yf}});
        const double back = length - seam;
        b.connector("C_" + lane_id('B', i, k), lane_id('B', i, k), lane_id('B', i, k + 1), {{back + 1, -yf}, {back - 1, -yf}});
      }
    }
  }
}

RawMapBundle straight_map(const StraightRoad& s) {
  MapBuilder b("straight");
  add_straight_road(b, s.lanes_per_dir, s.length_m);
  const double edge = s.lanes_per_dir * kLaneWidth + kWalkwayGap;
  b.walkway("W_south", rect(0, -edge - kWalkwayWidth, s.length_m, -edge));
  b.walkway("W_north", rect(0, edge, s.length_m, edge + kWalkwayWidth));
  return b.take();
}

RawMapBundle curved_map(const CurvedRoad& c) {
  const int n = c.lanes_per_dir;
  if (n < 1 || !(c.radius_m > n * kLaneWidth + 1.0) || !(c.arc_deg > 0) || c.arc_deg > 270) {
    throw SynthError("curved road needs radius > road half width and an arc in (0, 270] degrees");
  }
  MapBuilder b("curved");
  const double theta = c.arc_deg * kPi / 180.0;
  const int pieces = piece_count(c.radius_m * theta);
  const double dphi = theta / pieces;
  const int samples = std::max(2, static_cast<int>(std::ceil(c.radius_m * dphi / 1.0)));
  auto at = [&](double r, double phi) { return Vec2{r * std::sin(phi), c.radius_m - r * std::cos(phi)}; };
  auto arc = [&](double r, double phi0, double phi1) {
    std::vector<Vec2> pts;
    for (int j = 0; j <= samples; ++j) pts.push_back(at(r, phi0 + (phi1 - phi0) * j / samples));
    return pts;
  };
  for (int i = 0; i < n; ++i) {
    const double rf = c.radius_m + (i + 0.5) * kLaneWidth;
    const double rb = c.radius_m - (i + 0.5) * kLaneWidth;
    for (int k = 0; k < pieces; ++k) {
      const double f0 = k * dphi;
      const double f1 = (k + 1) * dphi;
      b.lane(lane_id('F', i, k), arc(rf, f0, f1), arc(rf - kHalf, f0, f1), arc(rf + kHalf, f0, f1), inner_divider(i),
             outer_divider(i, n));
      const double b0 = theta - k * dphi;
      const double b1 = theta - (k + 1) * dphi;
      b.lane(lane_id('B', i, k), arc(rb, b0, b1), arc(rb + kHalf, b0, b1), arc(rb - kHalf, b0, b1), inner_divider(i),
             outer_divider(i, n));
      if (k + 1 < pieces) {
        const double d = 1.0 / rf;
        b.connector("C_" + lane_id('F', i, k), lane_id('F', i, k), lane_id('F', i, k + 1), arc(rf, f1 - d, f1 + d));
        const double db = 1.0 / rb;
        b.connector("C_" + lane_id('B', i, k), lane_id('B', i, k), lane_id('B', i, k + 1), arc(rb, b1 + db, b1 - db));
      }
    }
  }
  return b.take();
}

const char kArms[4] = {'E', 'N', 'W', 'S'};

RawMapBundle intersection_map(const FourWayIntersection& x) {
  const int n = x.lanes_per_arm;
  const double A = x.arm_length_m;
  if (n < 1 || !(A > 10.0)) throw SynthError("intersection needs at least one lane per arm and arms longer than 10 m");
  MapBuilder b("intersection");
  const double h = n * kLaneWidth;

  for (int q = 0; q < 4; ++q) {
    const std::string arm(1, kArms[q]);
    for (int i = 0; i < n; ++i) {
      const double y = (i + 0.5) * kLaneWidth;
      const Vec2 in0 = quarter(Vec2{h + A, y}, q);
      const Vec2 in1 = quarter(Vec2{h, y}, q);
      b.straight_lane(arm + "_in" + std::to_string(i), in0, in1, inner_divider(i), outer_divider(i, n));
      b.straight_lane(arm + "_out" + std::to_string(i), quarter(Vec2{h, -y}, q), quarter(Vec2{h + A, -y}, q),
                      inner_divider(i), outer_divider(i, n));
    }
  }
  // Incoming on arm q turns right onto arm q+1, goes straight to q+2 and left to q+3.
  for (int q = 0; q < 4; ++q) {
    for (int i = 0; i < n; ++i) {
      const double y = (i + 0.5) * kLaneWidth;
      const Vec2 p0 = quarter(Vec2{h, y}, q);
      const Vec2 d0 = quarter(Vec2{-1, 0}, q);
      for (int turn = 1; turn <= 3; ++turn) {
        const int to = (q + turn) % 4;
        const Vec2 p2 = quarter(Vec2{h, -y}, to);
        const Vec2 d2 = quarter(Vec2{1, 0}, to);
        b.connector("X_" + std::string(1, kArms[q]) + std::to_string(i) + "_" + std::string(1, kArms[to]),
                    std::string(1, kArms[q]) + "_in" + std::to_string(i),
                    std::string(1, kArms[to]) + "_out" + std::to_string(i), turn_path(p0, d0, p2, d2));
      }
    }
  }
  for (int q = 0; q < 4; ++q) {
    const std::string arm(1, kArms[q]);
    b.crossing("PX_" + arm, quarter(rect(h + 1, -h, h + 4, h), q));
  }
  static const char* kCorners[4] = {"WK_NE", "WK_NW", "WK_SW", "WK_SE"};
  for (int q = 0; q < 4; ++q) {
    const std::vector<Vec2> ell = {{h + 1, h + 1}, {h + A, h + 1}, {h + A, h + 4}, {h + 4, h + 4}, {h + 4, h + A}, {h + 1, h + A}};
    b.walkway(kCorners[q], quarter(ell, q));
  }
  for (int q = 0; q < 4; ++q) {
    const std::string arm(1, kArms[q]);
    b.traffic_light("TL_" + arm, {quarter(Vec2{h + 5, h + 0.5}, q).x, quarter(Vec2{h + 5, h + 0.5}, q).y,
                                  geom::normalize_angle(q * kPi / 2)},
                    q % 2 == 0 ? TrafficLightType::Horizontal : TrafficLightType::Vertical);
    b.stop_line("SA_" + arm, quarter(rect(h + 5, 0, h + 8, h), q), StopType::TrafficLight, "TL_" + arm);
  }
  b.junction("X_box", rect(-h, -h, h, h));
  return b.take();
}

RawMapBundle parking_map(const ParkingStrip& p) {
  MapBuilder b("parking");
  add_straight_road(b, 1, p.length_m);
  b.carpark("CP0", rect(0, -kLaneWidth - 2.5, p.length_m, -kLaneWidth));
  b.walkway("W_south", rect(0, -kLaneWidth - 2.5 - kWalkwayGap - kWalkwayWidth, p.length_m, -kLaneWidth - 2.5 - kWalkwayGap));
  return b.take();
}

std::string grid_lane(char axis, int r, int c, char dir, int k) {
  return std::string(1, axis) + std::to_string(r) + "_" + std::to_string(c) + "_" + std::string(1, dir) + std::to_string(k);
}

RawMapBundle city_map(const CityGrid& g) {
  const int m = g.junctions_per_side;
  const double D = g.spacing_m;
  const double h = kLaneWidth;
  if (m < 2 || !(D > 2 * h + 20)) throw SynthError("city grid needs at least 2x2 junctions spaced over 27 m");
  MapBuilder b("city");
  const double road = D - 2 * h;
  const int pieces = piece_count(road);
  const double piece = road / pieces;

  // One road between two junctions along `dir` (unit +x or +y) starting at junction centre `o`.
  auto add_road = [&](char axis, int r, int c, Vec2 o, Vec2 dir, char fwd, char bwd) {
    const Vec2 right = Vec2{dir.y, -dir.x};
    for (int k = 0; k < pieces; ++k) {
      const Vec2 f0 = o + dir * (h + k * piece) + right * kHalf;
      b.straight_lane(grid_lane(axis, r, c, fwd, k), f0, f0 + dir * piece, DividerType::DoubleSolid, DividerType::RoadEdge);
      const Vec2 b0 = o + dir * (D - h - k * piece) - right * kHalf;
      b.straight_lane(grid_lane(axis, r, c, bwd, k), b0, b0 - dir * piece, DividerType::DoubleSolid, DividerType::RoadEdge);
      if (k + 1 < pieces) {
        const Vec2 sf = o + dir * (h + (k + 1) * piece) + right * kHalf;
        b.connector("C_" + grid_lane(axis, r, c, fwd, k), grid_lane(axis, r, c, fwd, k), grid_lane(axis, r, c, fwd, k + 1),
                    {sf - dir, sf + dir});
        const Vec2 sb = o + dir * (D - h - (k + 1) * piece) - right * kHalf;
        b.connector("C_" + grid_lane(axis, r, c, bwd, k), grid_lane(axis, r, c, bwd, k), grid_lane(axis, r, c, bwd, k + 1),
                    {sb + dir, sb - dir});
      }
    }
    const Vec2 a = o + dir * (h + kWalkwayGap);
    const Vec2 z = o + dir * (D - h - kWalkwayGap);
    const Vec2 near = right * (h + kWalkwayGap);
    const Vec2 far = right * (h + kWalkwayGap + kWalkwayWidth);
    const std::string base = "WK_" + std::string(1, axis) + std::to_string(r) + "_" + std::to_string(c);
    b.walkway(base + "_R", {a + near, z + near, z + far, a + far});
    b.walkway(base + "_L", {a - near, a - far, z - far, z - near});
  };
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      const Vec2 o{c * D, r * D};
      if (c + 1 < m) add_road('H', r, c, o, {1, 0}, 'E', 'W');
      if (r + 1 < m) add_road('V', r, c, o, {0, 1}, 'N', 'S');
    }
  }
  const int last = pieces - 1;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      const Vec2 o{c * D, r * D};
      struct Arm {
        bool exists;
        std::string in;
        std::string out;
        Vec2 dir;  // from the junction outwards along the arm
      };
      const Arm arms[4] = {
          {c + 1 < m, grid_lane('H', r, c, 'W', last), grid_lane('H', r, c, 'E', 0), {1, 0}},
          {r + 1 < m, grid_lane('V', r, c, 'S', last), grid_lane('V', r, c, 'N', 0), {0, 1}},
          {c > 0, grid_lane('H', r, c - 1, 'E', last), grid_lane('H', r, c - 1, 'W', 0), {-1, 0}},
          {r > 0, grid_lane('V', r - 1, c, 'N', last), grid_lane('V', r - 1, c, 'S', 0), {0, -1}},
      };
      for (int a = 0; a < 4; ++a) {
        if (!arms[a].exists) continue;
        const Vec2 in_dir = arms[a].dir * -1.0;
        const Vec2 p0 = o + arms[a].dir * h + Vec2{in_dir.y, -in_dir.x} * kHalf;
        for (int t = 0; t < 4; ++t) {
          if (t == a || !arms[t].exists) continue;
          const Vec2 out_dir = arms[t].dir;
          const Vec2 p2 = o + out_dir * h + Vec2{out_dir.y, -out_dir.x} * kHalf;
          b.connector("X_" + arms[a].in + "_" + arms[t].out, arms[a].in, arms[t].out, turn_path(p0, in_dir, p2, out_dir));
        }
      }
      b.junction("J" + std::to_string(r) + "_" + std::to_string(c), rect(o.x - h, o.y - h, o.x + h, o.y + h));
    }
  }
  return b.take();
}

/// Lanes of `path` joined through their connectors into one polyline.
Polyline path_polyline(const RawMapBundle& map, const std::vector<std::string>& path) {
  std::unordered_map<std::string, const RawLane*> lanes;
  for (const auto& l : map.lanes) lanes.emplace(l.id, &l);
  std::vector<Vec2> pts;
  const RawLane* prev = nullptr;
  for (const auto& id : path) {
    const auto it = lanes.find(id);
    if (it == lanes.end()) throw SynthError("agent path names unknown lane " + id);
    const RawLane* lane = it->second;
    if (prev != nullptr) {
      const RawConnector* via = nullptr;
      for (const auto& c : map.connectors) {
        if (c.incoming_lane == prev->id && c.outgoing_lane == id) via = &c;
      }
      if (via == nullptr) throw SynthError("agent path is not connected between " + prev->id + " and " + id);
      const double s0 = geom::project_point_to_polyline(prev->centerline.back(), via->centerline).arc_s;
      const double s1 = geom::project_point_to_polyline(lane->centerline.front(), via->centerline).arc_s;
      for (std::size_t i = 0; i < via->centerline.size(); ++i) {
        const double s = via->centerline.arc_at(i);
        if (s > s0 + 1e-9 && s < s1 - 1e-9) pts.push_back(via->centerline.points()[i]);
      }
    }
    for (const Vec2& p : lane->centerline.points()) pts.push_back(p);
    prev = lane;
  }
  return Polyline(std::move(pts));
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<AgentPlan> random_agents(const RawMapBundle& map, int count, std::uint64_t seed, double duration, bool need_ego) {
  std::mt19937_64 rng(seed);
  std::map<std::string, std::vector<std::string>> next;
  std::map<std::string, double> length;
  for (const auto& l : map.lanes) length[l.id] = l.centerline.length();
  for (const auto& c : map.connectors) next[c.incoming_lane].push_back(c.outgoing_lane);
  if (map.lanes.empty()) throw SynthError("cannot place agents on a map without lanes");
  static constexpr Category kKinds[4] = {Category::Car, Category::Car, Category::Truck, Category::BusRigid};
  std::vector<AgentPlan> out;
  for (int a = 0; a < count; ++a) {
    AgentPlan p;
    p.is_ego = need_ego && a == 0;
    p.id = p.is_ego ? "ego" : "rnd" + std::to_string(a);
    p.category = p.is_ego ? Category::Car : kKinds[rng() % 4];
    p.speed = 2.0 + 8.0 * unit(rng);
    std::string lane = map.lanes[rng() % map.lanes.size()].id;
    p.start_offset = 0.5 * length[lane] * unit(rng);
    double covered = length[lane] - p.start_offset;
    p.path.push_back(lane);
    while (covered < p.speed * duration + 1.0) {
      const auto& options = next[lane];
      if (options.empty()) break;
      lane = options[rng() % options.size()];
      p.path.push_back(lane);
      covered += length[lane];
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> chain(char dir, int i, int pieces) {
  std::vector<std::string> out;
  for (int k = 0; k < pieces; ++k) out.push_back(lane_id(dir, i, k));
  return out;
}

std::vector<std::string> split_csv(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = s.find(sep, start);
    out.emplace_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

Size3 default_size(Category c) {
  switch (c) {
    case Category::Car:
    case Category::PoliceVehicle: return {4.5, 1.9, 1.6};
    case Category::Truck:
    case Category::ConstructionVehicle: return {8.0, 2.5, 3.2};
    case Category::BusRigid:
    case Category::BusBendy: return {11.0, 2.6, 3.2};
    case Category::Ambulance: return {6.0, 2.2, 2.6};
    case Category::Trailer: return {9.0, 2.5, 3.5};
    case Category::Motorcycle: return {2.1, 0.8, 1.5};
    case Category::Bicycle: return {1.8, 0.6, 1.5};
    case Category::Animal: return {1.0, 0.4, 0.6};
    case Category::Barrier: return {0.5, 2.0, 1.0};
    case Category::TrafficCone: return {0.4, 0.4, 0.7};
    case Category::Debris:
    case Category::PushablePullable: return {0.8, 0.6, 1.0};
    case Category::BicycleRack: return {2.0, 0.6, 1.0};
    default: return {0.6, 0.6, 1.7};
  }
}

RawMapBundle build_layout(const Layout& layout) {
  return std::visit(
      [](const auto& l) -> RawMapBundle {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, StraightRoad>) return straight_map(l);
        if constexpr (std::is_same_v<T, CurvedRoad>) return curved_map(l);
        if constexpr (std::is_same_v<T, FourWayIntersection>) return intersection_map(l);
        if constexpr (std::is_same_v<T, ParkingStrip>) return parking_map(l);
        if constexpr (std::is_same_v<T, CityGrid>) return city_map(l);
      },
      layout);
}

std::vector<AgentPlan> default_agents(const Layout& layout) {
  std::vector<AgentPlan> out;
  if (const auto* s = std::get_if<StraightRoad>(&layout)) {
    const int pieces = piece_count(s->length_m);
    out.push_back({"ego", Category::Car, chain('F', 0, pieces), 4.0, 0.0, 0.0, std::nullopt, true});
    out.push_back({"car_lead", Category::Car, chain('F', 0, pieces), 4.0, 12.0});
    out.push_back({"car_oncoming", Category::Car, chain('B', 0, pieces), 5.0, 0.0});
    const double edge = s->lanes_per_dir * kLaneWidth + kWalkwayGap;
    out.push_back({"ped0", Category::PedestrianAdult, {}, 0.0, 0.0, 0.0,
                   Pose2D{0.25 * s->length_m, -edge - 0.5 * kWalkwayWidth, 0.0}});
  } else if (const auto* c = std::get_if<CurvedRoad>(&layout)) {
    const int pieces = piece_count(c->radius_m * c->arc_deg * kPi / 180.0);
    out.push_back({"ego", Category::Car, chain('F', 0, pieces), 4.0, 0.0, 0.0, std::nullopt, true});
    out.push_back({"car_lead", Category::Car, chain('F', 0, pieces), 4.0, 12.0});
    out.push_back({"car_oncoming", Category::Car, chain('B', 0, pieces), 5.0, 0.0});
  } else if (std::holds_alternative<FourWayIntersection>(layout)) {
    out.push_back({"ego", Category::Car, {"E_in0", "W_out0"}, 4.0, 5.0, 0.0, std::nullopt, true});
    out.push_back({"car_cross", Category::Car, {"N_in0", "S_out0"}, 4.0, 0.0});
    out.push_back({"car_turn", Category::Car, {"W_in0", "N_out0"}, 3.0, 0.0});
    out.push_back({"car_follow", Category::Car, {"E_in0", "W_out0"}, 4.0, 0.0});
    out.push_back({"ped0", Category::PedestrianAdult, {}, 0.0, 0.0, 0.0, Pose2D{kLaneWidth + 20.0, kLaneWidth + 2.5, kPi}});
  } else if (const auto* p = std::get_if<ParkingStrip>(&layout)) {
    const int pieces = piece_count(p->length_m);
    out.push_back({"ego", Category::Car, chain('F', 0, pieces), 4.0, 0.0, 0.0, std::nullopt, true});
    out.push_back({"car_moving", Category::Car, chain('F', 0, pieces), 4.0, 10.0});
    for (int i = 0; i < 3; ++i) {
      out.push_back({"parked" + std::to_string(i), Category::Car, {}, 0.0, 0.0, 0.0,
                     Pose2D{20.0 * (i + 1), -kLaneWidth - 1.25, 0.0}});
    }
    out.push_back({"ped0", Category::PedestrianAdult, {}, 0.0, 0.0, 0.0,
                   Pose2D{0.5 * p->length_m, -kLaneWidth - 2.5 - kWalkwayGap - 0.5 * kWalkwayWidth, 0.0}});
  }
  return out;
}

Scenario generate(const ScenarioTemplate& tpl, std::uint64_t seed, double duration_s) {
  if (!(duration_s > 0)) throw SynthError("duration must be positive");
  Scenario sc;
  sc.map = build_layout(tpl.layout);
  std::vector<AgentPlan> plans = tpl.agents.empty() ? default_agents(tpl.layout) : tpl.agents;
  const bool has_ego = std::any_of(plans.begin(), plans.end(), [](const AgentPlan& p) { return p.is_ego; });
  if (tpl.random_agents > 0 || !has_ego) {
    auto extra = random_agents(sc.map, std::max(tpl.random_agents, has_ego ? 0 : 1), seed, duration_s, !has_ego);
    plans.insert(plans.end(), extra.begin(), extra.end());
  }
  if (std::count_if(plans.begin(), plans.end(), [](const AgentPlan& p) { return p.is_ego; }) != 1) {
    throw SynthError("a scenario needs exactly one ego agent");
  }

  struct Track {
    const AgentPlan* plan;
    std::optional<Polyline> path;
    Size3 size;
  };
  std::vector<Track> tracks;
  for (const auto& p : plans) {
    if (!p.fixed_pose && p.path.empty()) throw SynthError("agent " + p.id + " has neither a path nor a fixed pose");
    Track t{&p, std::nullopt, p.size.value_or(default_size(p.category))};
    if (!p.fixed_pose) {
      t.path = path_polyline(sc.map, p.path);
      if (p.start_offset < 0 || p.start_offset > t.path->length()) throw SynthError("agent " + p.id + " starts off its path");
    }
    tracks.push_back(std::move(t));
  }

  const int scenes = static_cast<int>(std::lround(duration_s * kSceneRateHz));
  RawSequence seq{tpl.sequence_id, {}};
  for (int k = 0; k < scenes; ++k) {
    const double t = k / kSceneRateHz;
    RawScene scene;
    scene.timestamp_us = kBaseTimestampUs + static_cast<std::int64_t>(k) * 500000;
    for (const Track& tr : tracks) {
      const AgentPlan& p = *tr.plan;
      if (!p.is_ego && (t < p.enter_s - 1e-9 || (p.exit_s && t > *p.exit_s + 1e-9))) continue;
      Pose2D pose;
      if (p.fixed_pose) {
        pose = *p.fixed_pose;
      } else {
        const double s = std::min(p.start_offset + p.speed * t, tr.path->length());
        const double yaw = tr.path->heading_at(s);
        const Vec2 pos = tr.path->point_at(s) + geom::left_normal({std::cos(yaw), std::sin(yaw)}) * p.lateral_offset;
        pose = {pos.x, pos.y, geom::normalize_angle(yaw)};
      }
      if (p.is_ego) scene.ego_pose = pose;
      scene.annotations.push_back({p.id, p.category, pose, tr.size, p.is_ego});
    }
    seq.scenes.push_back(std::move(scene));
  }
  sc.trips.trips.push_back({tpl.trip_id, "synth", {std::move(seq)}});
  return sc;
}

ScenarioTemplate template_from_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string kind(spec.substr(0, colon));
  std::map<std::string, double> params;
  if (colon != std::string_view::npos && colon + 1 < spec.size()) {
    for (const auto& kv : split_csv(spec.substr(colon + 1), ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw SynthError("template parameter '" + kv + "' is not key=value");
      double v = 0;
      const std::string value = kv.substr(eq + 1);
      const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
        throw SynthError("template parameter '" + kv + "' is not numeric");
      }
      params[kv.substr(0, eq)] = v;
    }
  }
  auto take = [&](const char* key, double fallback) {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    const double v = it->second;
    params.erase(it);
    return v;
  };
  ScenarioTemplate tpl;
  tpl.name = kind;
  if (kind == "straight") {
    tpl.layout = StraightRoad{static_cast<int>(take("lanes", 1)), take("length", 100)};
  } else if (kind == "curved") {
    tpl.layout = CurvedRoad{take("radius", 60), take("arc", 90), static_cast<int>(take("lanes", 1))};
  } else if (kind == "intersection") {
    tpl.layout = FourWayIntersection{static_cast<int>(take("lanes", 1)), take("arm", 50)};
  } else if (kind == "parking") {
    tpl.layout = ParkingStrip{take("length", 100)};
  } else if (kind == "city") {
    tpl.layout = CityGrid{static_cast<int>(take("junctions", 12)), take("spacing", 100)};
    tpl.random_agents = 100;
  } else {
    throw SynthError("unknown template '" + kind + "' (straight, curved, intersection, parking, city)");
  }
  tpl.random_agents = static_cast<int>(take("agents", tpl.random_agents));
  if (!params.empty()) throw SynthError("unknown template parameter '" + params.begin()->first + "' for " + kind);
  return tpl;
}

void apply_rigid_transform(RawMapBundle& map, RawTripSet& trips, double yaw, Vec2 shift) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  auto pt = [&](Vec2 p) { return Vec2{c * p.x - s * p.y + shift.x, s * p.x + c * p.y + shift.y}; };
  auto line = [&](const Polyline& l) {
    std::vector<Vec2> pts;
    for (const Vec2& p : l.points()) pts.push_back(pt(p));
    return Polyline(std::move(pts));
  };
  auto poly = [&](const Polygon& g) {
    std::vector<Vec2> pts;
    for (const Vec2& p : g.vertices()) pts.push_back(pt(p));
    return Polygon(std::move(pts));
  };
  auto pose = [&](Pose2D& p) {
    const Vec2 q = pt(p.position());
    p = {q.x, q.y, geom::normalize_angle(p.yaw + yaw)};
  };
  for (auto& l : map.lanes) {
    l.centerline = line(l.centerline);
    for (auto& b : l.left_border) b.line = line(b.line);
    for (auto& b : l.right_border) b.line = line(b.line);
    l.polygon = poly(l.polygon);
  }
  for (auto& c2 : map.connectors) c2.centerline = line(c2.centerline);
  for (auto* list : {&map.walkways, &map.ped_crossings, &map.road_segments, &map.carpark_areas}) {
    for (auto& a : *list) a.polygon = poly(a.polygon);
  }
  for (auto& sl : map.stop_lines) sl.polygon = poly(sl.polygon);
  for (auto& tl : map.traffic_lights) pose(tl.pose);
  for (auto& trip : trips.trips) {
    for (auto& seq : trip.sequences) {
      for (auto& scene : seq.scenes) {
        pose(scene.ego_pose);
        for (auto& a : scene.annotations) pose(a.pose);
      }
    }
  }
}

}  // namespace scenekg::synth
