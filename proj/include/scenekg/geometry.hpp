#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace scenekg::geom {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kCoincidentEps = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double k) { return {a.x * k, a.y * k}; }
  friend Vec2 operator*(double k, Vec2 a) { return {a.x * k, a.y * k}; }
  friend Vec2 operator/(Vec2 a, double k) { return {a.x / k, a.y / k}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 left_normal(Vec2 dir) { return {-dir.y, dir.x}; }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double radians);

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

struct BoundingBox {
  Vec2 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

  void extend(Vec2 p);
  void extend(const BoundingBox& other);
  BoundingBox inflated(double margin) const;
  bool empty() const { return min.x > max.x; }
  bool contains(Vec2 p) const;
  bool intersects(const BoundingBox& other) const;
  /// Gap between the boxes; 0 when they touch or overlap.
  double distance_to(const BoundingBox& other) const;
};

/// Ordered open polyline with at least two points and no coincident neighbours.
class Polyline {
 public:
  /// Drops consecutive duplicate points, then validates.
  explicit Polyline(std::vector<Vec2> points);

  std::span<const Vec2> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  Vec2 front() const { return points_.front(); }
  Vec2 back() const { return points_.back(); }
  double length() const { return cumulative_.back(); }
  /// Arc length at vertex i.
  double arc_at(std::size_t i) const { return cumulative_[i]; }

  /// Index of the segment containing arc length s. At an interior vertex the
  /// following segment wins; s beyond the end maps to the last segment.
  std::size_t segment_at(double s) const;
  Vec2 point_at(double s) const;
  double heading_at(double s) const;
  Polyline reversed() const;
  BoundingBox bounds() const;

  friend bool operator==(const Polyline& a, const Polyline& b) { return a.points_ == b.points_; }

 private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

/// Implicitly closed ring with at least three vertices and nonzero area.
class Polygon {
 public:
  /// Drops a repeated closing vertex and consecutive duplicates, then validates.
  explicit Polygon(std::vector<Vec2> ring);

  std::span<const Vec2> vertices() const { return ring_; }
  std::size_t size() const { return ring_.size(); }
  Vec2 vertex(std::size_t i) const { return ring_[i % ring_.size()]; }
  /// Positive for counter-clockwise rings.
  double signed_area() const { return signed_area_; }
  double area() const { return std::abs(signed_area_); }
  Vec2 centroid() const;
  const BoundingBox& bounds() const { return bounds_; }
  /// True when no two non-adjacent edges touch.
  bool is_simple() const;

  friend bool operator==(const Polygon& a, const Polygon& b) { return a.ring_ == b.ring_; }

 private:
  std::vector<Vec2> ring_;
  double signed_area_ = 0.0;
  BoundingBox bounds_;
};

struct Projection {
  Vec2 foot;
  double distance = 0.0;
  double arc_s = 0.0;
  std::size_t segment = 0;
};

std::vector<Pose2D> resample_polyline(const Polyline& line, double step);

/// Closest point on the polyline; ties resolve toward the smaller arc length.
Projection project_point_to_polyline(Vec2 p, const Polyline& line);

/// Boundary points count as inside.
bool point_in_polygon(Vec2 p, const Polygon& poly);
bool point_on_boundary(Vec2 p, const Polygon& poly, double tol = kCoincidentEps);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);
double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// Zero when the polygons intersect, touch or nest.
double polygon_distance(const Polygon& a, const Polygon& b);
/// True iff the interiors share an area; a shared boundary alone is not overlap.
bool polygons_overlap(const Polygon& a, const Polygon& b);

double polyline_polygon_distance(const Polyline& line, const Polygon& poly);
double polyline_distance(const Polyline& a, const Polyline& b);
/// Whether the line buffered by `radius` overlaps the polygon interior.
bool buffered_polyline_overlaps(const Polyline& line, double radius, const Polygon& poly);

Polygon convex_hull(std::span<const Vec2> points);

/// Target-centric frame: origin plus heading.
class RigidFrame {
 public:
  RigidFrame() = default;
  RigidFrame(Vec2 origin, double yaw);
  /// Validates orthonormality and det = +1 to 1e-12.
  static RigidFrame from_rotation(Vec2 origin, const std::array<std::array<double, 2>, 2>& rotation);
  static RigidFrame from_pose(const Pose2D& pose) { return RigidFrame({pose.x, pose.y}, pose.yaw); }

  Vec2 origin() const { return origin_; }
  double yaw() const { return yaw_; }
  std::array<std::array<double, 2>, 2> rotation() const;

 private:
  Vec2 origin_{};
  double yaw_ = 0.0;
  double cos_ = 1.0;
  double sin_ = 0.0;

  friend Vec2 to_local(Vec2, const RigidFrame&);
  friend Vec2 to_global(Vec2, const RigidFrame&);
};

/// p_local = R^-1 (p_global - origin)
Vec2 to_local(Vec2 p_global, const RigidFrame& frame);
Vec2 to_global(Vec2 p_local, const RigidFrame& frame);
double yaw_to_local(double yaw_global, const RigidFrame& frame);
double yaw_to_global(double yaw_local, const RigidFrame& frame);
Pose2D pose_to_local(const Pose2D& pose, const RigidFrame& frame);

/// Smallest absolute difference between two headings, in degrees [0, 180].
double heading_difference(double a, double b);

inline constexpr double kEarthRadiusM = 6378137.0;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

/// Equirectangular local-tangent-plane conversion around `origin` (degrees).
LatLon enu_to_wgs84(Vec2 p, LatLon origin);
Vec2 wgs84_to_enu(LatLon p, LatLon origin);

std::string format_number(double v);
std::string to_wkt(Vec2 p);
std::string to_wkt(const Polyline& line);
std::string to_wkt(const Polygon& poly);
std::string to_gps_wkt(const Polygon& poly, LatLon origin);
std::string to_gps_wkt(const Polyline& line, LatLon origin);
Polygon polygon_from_wkt(std::string_view wkt);

/// Uniform grid over bounding boxes; query results are sorted ascending.
class SpatialGrid {
 public:
  explicit SpatialGrid(double cell_size = 25.0) : cell_(cell_size) {}

  void insert(std::uint32_t id, const BoundingBox& box);
  std::vector<std::uint32_t> query(const BoundingBox& box) const;
  std::vector<std::uint32_t> query(Vec2 p) const { return query(BoundingBox{p, p}); }

 private:
  std::int64_t key(std::int64_t cx, std::int64_t cy) const { return (cx << 32) ^ (cy & 0xffffffff); }
  std::int64_t cell_index(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }

  double cell_;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells_;
};

}  // namespace scenekg::geom
