#include "scenekg/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>

namespace scenekg::geom {
namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

// Endpoints within kCoincidentEps of the other segment's line count as touching,
// so round-off on a shared edge never reads as a crossing.
bool proper_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double tol_cd = kCoincidentEps * norm(d - c);
  const double tol_ab = kCoincidentEps * norm(b - a);
  const double d1 = orient(c, d, a);
  const double d2 = orient(c, d, b);
  const double d3 = orient(a, b, c);
  const double d4 = orient(a, b, d);
  return ((d1 > tol_cd && d2 < -tol_cd) || (d1 < -tol_cd && d2 > tol_cd)) &&
         ((d3 > tol_ab && d4 < -tol_ab) || (d3 < -tol_ab && d4 > tol_ab));
}

bool crossing_inside(Vec2 p, const Polygon& poly) {
  bool inside = false;
  const auto ring = poly.vertices();
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool strictly_inside(Vec2 p, const Polygon& poly) {
  return crossing_inside(p, poly) && !point_on_boundary(p, poly, 1e-12);
}

double extent(const BoundingBox& box) { return std::max(box.max.x - box.min.x, box.max.y - box.min.y); }

// Splits every edge of `a` at its contacts with `b` and probes just inside `a`
// next to each piece. Without proper crossings, any shared interior must show
// up next to one of these pieces.
bool boundary_probe(const Polygon& a, const Polygon& b) {
  const double scale = 1.0 + std::max(extent(a.bounds()), extent(b.bounds()));
  const double eps = 1e-7 * scale;
  const double inward = a.signed_area() > 0 ? 1.0 : -1.0;
  std::vector<double> ts;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec2 p = a.vertex(i);
    const Vec2 q = a.vertex(i + 1);
    const Vec2 dir = q - p;
    const double len2 = dot(dir, dir);
    ts.assign({0.0, 1.0});
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Vec2 c = b.vertex(j);
      const Vec2 d = b.vertex(j + 1);
      for (Vec2 v : {c, d}) {
        if (point_segment_distance(v, p, q) <= kCoincidentEps) {
          ts.push_back(std::clamp(dot(v - p, dir) / len2, 0.0, 1.0));
        }
      }
      const double denom = cross(dir, d - c);
      if (std::abs(denom) > 1e-18) {
        const double t = cross(c - p, d - c) / denom;
        const double u = cross(c - p, dir) / denom;
        if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) ts.push_back(t);
      }
    }
    std::sort(ts.begin(), ts.end());
    const Vec2 normal = left_normal(dir / std::sqrt(len2)) * inward;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      if (ts[k + 1] - ts[k] <= 1e-9) continue;
      const Vec2 mid = p + dir * (0.5 * (ts[k] + ts[k + 1]));
      const Vec2 probe = mid + normal * eps;
      if (strictly_inside(probe, b) && strictly_inside(probe, a)) return true;
    }
  }
  return false;
}

void append_number(std::string& out, double v) { out += format_number(v); }

}  // namespace

double normalize_angle(double radians) {
  double a = std::fmod(radians, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

void BoundingBox::extend(Vec2 p) {
  min.x = std::min(min.x, p.x);
  min.y = std::min(min.y, p.y);
  max.x = std::max(max.x, p.x);
  max.y = std::max(max.y, p.y);
}

void BoundingBox::extend(const BoundingBox& other) {
  if (other.empty()) return;
  extend(other.min);
  extend(other.max);
}

BoundingBox BoundingBox::inflated(double margin) const {
  return {{min.x - margin, min.y - margin}, {max.x + margin, max.y + margin}};
}

bool BoundingBox::contains(Vec2 p) const {
  return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
}

bool BoundingBox::intersects(const BoundingBox& other) const {
  return min.x <= other.max.x && other.min.x <= max.x && min.y <= other.max.y && other.min.y <= max.y;
}

double BoundingBox::distance_to(const BoundingBox& other) const {
  const double dx = std::max({0.0, other.min.x - max.x, min.x - other.max.x});
  const double dy = std::max({0.0, other.min.y - max.y, min.y - other.max.y});
  return std::hypot(dx, dy);
}

Polyline::Polyline(std::vector<Vec2> points) {
  points_.reserve(points.size());
  for (const Vec2& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("polyline has a non-finite coordinate");
    if (!points_.empty() && distance(points_.back(), p) <= kCoincidentEps) continue;
    points_.push_back(p);
  }
  if (points_.size() < 2) throw GeometryError("degenerate polyline: fewer than two distinct points");
  cumulative_.resize(points_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + distance(points_[i - 1], points_[i]);
  }
}

std::size_t Polyline::segment_at(double s) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const auto idx = static_cast<std::ptrdiff_t>(it - cumulative_.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(points_.size()) - 2));
}

Vec2 Polyline::point_at(double s) const {
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_at(s);
  const double seg = cumulative_[i + 1] - cumulative_[i];
  const double t = std::clamp((s - cumulative_[i]) / seg, 0.0, 1.0);
  return points_[i] + (points_[i + 1] - points_[i]) * t;
}

double Polyline::heading_at(double s) const {
  const std::size_t i = segment_at(s);
  const Vec2 d = points_[i + 1] - points_[i];
  return std::atan2(d.y, d.x);
}

Polyline Polyline::reversed() const {
  std::vector<Vec2> pts(points_.rbegin(), points_.rend());
  return Polyline(std::move(pts));
}

BoundingBox Polyline::bounds() const {
  BoundingBox box;
  for (const Vec2& p : points_) box.extend(p);
  return box;
}

Polygon::Polygon(std::vector<Vec2> ring) {
  ring_.reserve(ring.size());
  for (const Vec2& p : ring) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("polygon has a non-finite coordinate");
    if (!ring_.empty() && distance(ring_.back(), p) <= kCoincidentEps) continue;
    ring_.push_back(p);
  }
  while (ring_.size() > 1 && distance(ring_.front(), ring_.back()) <= kCoincidentEps) ring_.pop_back();
  if (ring_.size() < 3) throw GeometryError("polygon needs at least three distinct vertices");
  double twice = 0.0;
  for (std::size_t i = 0, j = ring_.size() - 1; i < ring_.size(); j = i++) {
    twice += cross(ring_[j], ring_[i]);
    bounds_.extend(ring_[i]);
  }
  signed_area_ = 0.5 * twice;
  if (std::abs(signed_area_) <= 1e-12) throw GeometryError("polygon has zero area");
}

Vec2 Polygon::centroid() const {
  // Shifted to the first vertex to limit cancellation far from the origin.
  const Vec2 o = ring_[0];
  double cx = 0.0;
  double cy = 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, j = ring_.size() - 1; i < ring_.size(); j = i++) {
    const Vec2 a = ring_[j] - o;
    const Vec2 b = ring_[i] - o;
    const double c = cross(a, b);
    twice += c;
    cx += (a.x + b.x) * c;
    cy += (a.y + b.y) * c;
  }
  return {o.x + cx / (3.0 * twice), o.y + cy / (3.0 * twice)};
}

bool Polygon::is_simple() const {
  const std::size_t n = ring_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertex(i);
    const Vec2 b = vertex(i + 1);
    // Adjacent edges may only share their common vertex.
    const Vec2 c = vertex(i + 2);
    if (std::abs(orient(a, b, c)) <= 1e-12 && dot(b - a, c - b) < 0) return false;
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(a, b, vertex(j), vertex(j + 1))) return false;
    }
  }
  return true;
}

std::vector<Pose2D> resample_polyline(const Polyline& line, double step) {
  if (!(step > 0.0)) throw GeometryError("resample step must be positive");
  const double total = line.length();
  std::vector<Pose2D> out;
  out.reserve(static_cast<std::size_t>(total / step) + 2);
  for (std::size_t k = 0;; ++k) {
    double s = static_cast<double>(k) * step;
    if (s > total + kCoincidentEps) break;
    s = std::min(s, total);
    const Vec2 p = line.point_at(s);
    out.push_back({p.x, p.y, line.heading_at(s)});
  }
  const double last = static_cast<double>(out.size() - 1) * step;
  if (last < total - kCoincidentEps) {
    const Vec2 p = line.back();
    out.push_back({p.x, p.y, line.heading_at(total)});
  }
  return out;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

Projection project_point_to_polyline(Vec2 p, const Polyline& line) {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  const auto pts = line.points();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i];
    const Vec2 ab = pts[i + 1] - a;
    const double len2 = dot(ab, ab);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    const Vec2 foot = a + ab * t;
    const double d = distance(p, foot);
    if (d < best.distance - 1e-12) {
      best.foot = foot;
      best.distance = d;
      best.arc_s = line.arc_at(i) + t * std::sqrt(len2);
      best.segment = i;
    }
  }
  return best;
}

bool point_on_boundary(Vec2 p, const Polygon& poly, double tol) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (point_segment_distance(p, poly.vertex(i), poly.vertex(i + 1)) <= tol) return true;
  }
  return false;
}

bool point_in_polygon(Vec2 p, const Polygon& poly) {
  if (!poly.bounds().inflated(kCoincidentEps).contains(p)) return false;
  if (point_on_boundary(p, poly)) return true;
  return crossing_inside(p, poly);
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  if (proper_cross(a, b, c, d)) return true;
  constexpr double tol = 1e-12;
  return point_segment_distance(a, c, d) <= tol || point_segment_distance(b, c, d) <= tol ||
         point_segment_distance(c, a, b) <= tol || point_segment_distance(d, a, b) <= tol;
}

double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

double polygon_distance(const Polygon& a, const Polygon& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (segments_intersect(a.vertex(i), a.vertex(i + 1), b.vertex(j), b.vertex(j + 1))) return 0.0;
    }
  }
  if (point_in_polygon(a.vertex(0), b) || point_in_polygon(b.vertex(0), a)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      best = std::min(best, point_segment_distance(a.vertex(i), b.vertex(j), b.vertex(j + 1)));
      best = std::min(best, point_segment_distance(b.vertex(j), a.vertex(i), a.vertex(i + 1)));
    }
  }
  return best;
}

bool polygons_overlap(const Polygon& a, const Polygon& b) {
  if (!a.bounds().intersects(b.bounds())) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (proper_cross(a.vertex(i), a.vertex(i + 1), b.vertex(j), b.vertex(j + 1))) return true;
    }
  }
  return boundary_probe(a, b) || boundary_probe(b, a);
}

double polyline_polygon_distance(const Polyline& line, const Polygon& poly) {
  const auto pts = line.points();
  for (const Vec2& p : pts) {
    if (point_in_polygon(p, poly)) return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    for (std::size_t j = 0; j < poly.size(); ++j) {
      best = std::min(best, segment_segment_distance(pts[i], pts[i + 1], poly.vertex(j), poly.vertex(j + 1)));
      if (best == 0.0) return 0.0;
    }
  }
  return best;
}

double polyline_distance(const Polyline& a, const Polyline& b) {
  const auto pa = a.points();
  const auto pb = b.points();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
    for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
      best = std::min(best, segment_segment_distance(pa[i], pa[i + 1], pb[j], pb[j + 1]));
      if (best == 0.0) return 0.0;
    }
  }
  return best;
}

bool buffered_polyline_overlaps(const Polyline& line, double radius, const Polygon& poly) {
  if (line.bounds().distance_to(poly.bounds()) >= radius) return false;
  return polyline_polygon_distance(line, poly) < radius;
}

Polygon convex_hull(std::span<const Vec2> points) {
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw GeometryError("convex hull needs at least three distinct points");
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && orient(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return Polygon(std::move(hull));
}

RigidFrame::RigidFrame(Vec2 origin, double yaw)
    : origin_(origin), yaw_(normalize_angle(yaw)), cos_(std::cos(yaw)), sin_(std::sin(yaw)) {
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y) || !std::isfinite(yaw)) {
    throw GeometryError("frame must be finite");
  }
}

RigidFrame RigidFrame::from_rotation(Vec2 origin, const std::array<std::array<double, 2>, 2>& r) {
  constexpr double tol = 1e-12;
  const double det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
  const bool orthonormal = std::abs(r[0][0] * r[0][0] + r[1][0] * r[1][0] - 1.0) <= tol &&
                           std::abs(r[0][1] * r[0][1] + r[1][1] * r[1][1] - 1.0) <= tol &&
                           std::abs(r[0][0] * r[0][1] + r[1][0] * r[1][1]) <= tol;
  if (!orthonormal || std::abs(det - 1.0) > tol) throw GeometryError("rotation must be orthonormal with det +1");
  RigidFrame f;
  f.origin_ = origin;
  f.yaw_ = std::atan2(r[1][0], r[0][0]);
  f.cos_ = r[0][0];
  f.sin_ = r[1][0];
  return f;
}

std::array<std::array<double, 2>, 2> RigidFrame::rotation() const {
  return {{{cos_, -sin_}, {sin_, cos_}}};
}

Vec2 to_local(Vec2 p_global, const RigidFrame& frame) {
  const Vec2 d = p_global - frame.origin_;
  return {frame.cos_ * d.x + frame.sin_ * d.y, -frame.sin_ * d.x + frame.cos_ * d.y};
}

Vec2 to_global(Vec2 p_local, const RigidFrame& frame) {
  return {frame.cos_ * p_local.x - frame.sin_ * p_local.y + frame.origin_.x,
          frame.sin_ * p_local.x + frame.cos_ * p_local.y + frame.origin_.y};
}

double yaw_to_local(double yaw_global, const RigidFrame& frame) { return normalize_angle(yaw_global - frame.yaw()); }

double yaw_to_global(double yaw_local, const RigidFrame& frame) { return normalize_angle(yaw_local + frame.yaw()); }

Pose2D pose_to_local(const Pose2D& pose, const RigidFrame& frame) {
  const Vec2 p = to_local(pose.position(), frame);
  return {p.x, p.y, yaw_to_local(pose.yaw, frame)};
}

double heading_difference(double a, double b) { return std::abs(normalize_angle(a - b)) * 180.0 / kPi; }

LatLon enu_to_wgs84(Vec2 p, LatLon origin) {
  constexpr double deg = 180.0 / kPi;
  const double lat0 = origin.lat / deg;
  return {origin.lat + (p.y / kEarthRadiusM) * deg, origin.lon + (p.x / (kEarthRadiusM * std::cos(lat0))) * deg};
}

Vec2 wgs84_to_enu(LatLon p, LatLon origin) {
  constexpr double rad = kPi / 180.0;
  const double lat0 = origin.lat * rad;
  return {(p.lon - origin.lon) * rad * kEarthRadiusM * std::cos(lat0), (p.lat - origin.lat) * rad * kEarthRadiusM};
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string to_wkt(Vec2 p) { return "POINT (" + format_number(p.x) + " " + format_number(p.y) + ")"; }

std::string to_wkt(const Polyline& line) {
  std::string out = "LINESTRING (";
  bool first = true;
  for (const Vec2& p : line.points()) {
    if (!first) out += ", ";
    first = false;
    append_number(out, p.x);
    out += ' ';
    append_number(out, p.y);
  }
  out += ')';
  return out;
}

std::string to_wkt(const Polygon& poly) {
  std::string out = "POLYGON ((";
  for (std::size_t i = 0; i <= poly.size(); ++i) {
    if (i > 0) out += ", ";
    const Vec2 p = poly.vertex(i);
    append_number(out, p.x);
    out += ' ';
    append_number(out, p.y);
  }
  out += "))";
  return out;
}

std::string to_gps_wkt(const Polygon& poly, LatLon origin) {
  std::string out = "POLYGON ((";
  for (std::size_t i = 0; i <= poly.size(); ++i) {
    if (i > 0) out += ", ";
    const LatLon ll = enu_to_wgs84(poly.vertex(i), origin);
    append_number(out, ll.lon);
    out += ' ';
    append_number(out, ll.lat);
  }
  out += "))";
  return out;
}

std::string to_gps_wkt(const Polyline& line, LatLon origin) {
  std::string out = "LINESTRING (";
  bool first = true;
  for (const Vec2& p : line.points()) {
    if (!first) out += ", ";
    first = false;
    const LatLon ll = enu_to_wgs84(p, origin);
    append_number(out, ll.lon);
    out += ' ';
    append_number(out, ll.lat);
  }
  out += ')';
  return out;
}

Polygon polygon_from_wkt(std::string_view wkt) {
  const auto open = wkt.find("((");
  const auto close = wkt.rfind("))");
  if (wkt.substr(0, 7) != "POLYGON" || open == std::string_view::npos || close == std::string_view::npos ||
      close < open) {
    throw GeometryError("not a WKT polygon: " + std::string(wkt.substr(0, 40)));
  }
  std::vector<Vec2> ring;
  const char* p = wkt.data() + open + 2;
  const char* end = wkt.data() + close;
  auto skip = [&] {
    while (p < end && (*p == ' ' || *p == ',')) ++p;
  };
  while (true) {
    skip();
    if (p >= end) break;
    Vec2 v;
    auto r1 = std::from_chars(p, end, v.x);
    if (r1.ec != std::errc{}) throw GeometryError("malformed WKT coordinate");
    p = r1.ptr;
    skip();
    auto r2 = std::from_chars(p, end, v.y);
    if (r2.ec != std::errc{}) throw GeometryError("malformed WKT coordinate");
    p = r2.ptr;
    ring.push_back(v);
  }
  return Polygon(std::move(ring));
}

void SpatialGrid::insert(std::uint32_t id, const BoundingBox& box) {
  const std::int64_t x0 = cell_index(box.min.x);
  const std::int64_t x1 = cell_index(box.max.x);
  const std::int64_t y0 = cell_index(box.min.y);
  const std::int64_t y1 = cell_index(box.max.y);
  for (std::int64_t cx = x0; cx <= x1; ++cx) {
    for (std::int64_t cy = y0; cy <= y1; ++cy) cells_[key(cx, cy)].push_back(id);
  }
}

std::vector<std::uint32_t> SpatialGrid::query(const BoundingBox& box) const {
  std::vector<std::uint32_t> out;
  const std::int64_t x0 = cell_index(box.min.x);
  const std::int64_t x1 = cell_index(box.max.x);
  const std::int64_t y0 = cell_index(box.min.y);
  const std::int64_t y1 = cell_index(box.max.y);
  for (std::int64_t cx = x0; cx <= x1; ++cx) {
    for (std::int64_t cy = y0; cy <= y1; ++cy) {
      const auto it = cells_.find(key(cx, cy));
      if (it != cells_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace scenekg::geom
