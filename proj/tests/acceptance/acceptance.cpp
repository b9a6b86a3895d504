// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Pass criterion numbers as arguments to run a subset.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "extract_fixtures.hpp"
#include "oracles.hpp"
#include "schema_cases.hpp"
#include "scenekg/dataset_io.hpp"
#include "scenekg/ntriples.hpp"
#include "scenekg/parallel.hpp"

using namespace scenekg;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

/// Collects failures; the first few are kept for the report line.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (first_.size() < 3) first_.push_back(what);
  }
  std::size_t checks() const { return checks_; }
  Result result(const std::string& summary) const {
    std::string d = summary + "; " + std::to_string(checks_) + " checks";
    if (failures_ > 0) {
      d += ", " + std::to_string(failures_) + " failed:";
      for (const auto& f : first_) d += " [" + f + "]";
    }
    return {failures_ == 0 && checks_ > 0, d};
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::vector<std::string> first_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const std::vector<std::string> kTemplates = {"straight",
                                             "straight:lanes=2,length=200",
                                             "curved",
                                             "curved:radius=30,arc=180,lanes=2",
                                             "intersection",
                                             "intersection:lanes=2",
                                             "parking",
                                             "city:junctions=3,agents=8"};

World compile(const synth::Scenario& sc, unsigned jobs = 1) { return compile_world(sc.map, sc.trips, CompilerConfig{}, jobs); }

std::vector<Vec2> to_vec(std::span<const Vec2> s) { return {s.begin(), s.end()}; }

// ---------------------------------------------------------------------------
// Independent reference geometry.

double chain_length(const std::vector<Vec2>& pts) {
  double total = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += oracle::dist(pts[i - 1], pts[i]);
  return total;
}

/// Point at arc length s along the chain.
Vec2 point_at(const std::vector<Vec2>& pts, double s) {
  double acc = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double l = oracle::dist(pts[i - 1], pts[i]);
    if (acc + l >= s && l > 0) {
      const double t = std::clamp((s - acc) / l, 0.0, 1.0);
      return {pts[i - 1].x + t * (pts[i].x - pts[i - 1].x), pts[i - 1].y + t * (pts[i].y - pts[i - 1].y)};
    }
    acc += l;
  }
  return pts.back();
}

/// Arc length of the nearest point on the chain to p.
double arc_of(Vec2 p, const std::vector<Vec2>& pts) {
  double best = std::numeric_limits<double>::infinity();
  double best_s = 0;
  double acc = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Vec2 a = pts[i - 1];
    const Vec2 b = pts[i];
    const double l = oracle::dist(a, b);
    const double t = l > 0 ? std::clamp(((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (l * l), 0.0, 1.0) : 0.0;
    const double d = oracle::dist(p, {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    if (d < best) {
      best = d;
      best_s = acc + t * l;
    }
    acc += l;
  }
  return best_s;
}

double chain_distance(Vec2 p, const std::vector<Vec2>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < pts.size(); ++i) best = std::min(best, oracle::seg_dist(p, pts[i - 1], pts[i]));
  return best;
}

double orient(Vec2 a, Vec2 b, Vec2 c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

bool proper_crossing(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = orient(c, d, a), d2 = orient(c, d, b), d3 = orient(a, b, c), d4 = orient(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && d1 != 0 && d2 != 0 && ((d3 > 0) != (d4 > 0)) && d3 != 0 && d4 != 0;
}

/// Exact distance between two simple rings: zero when they intersect or nest,
/// otherwise the smallest vertex-to-edge distance in either direction.
double ring_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (proper_crossing(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) return 0.0;
    }
  }
  if (oracle::winding_number(a[0], b) != 0 || oracle::winding_number(b[0], a) != 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& p : a) best = std::min(best, oracle::ring_boundary_distance(p, b));
  for (const Vec2& p : b) best = std::min(best, oracle::ring_boundary_distance(p, a));
  return best;
}

// ---------------------------------------------------------------------------

Result geometry_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Tally tally;
  double worst_spacing = 0, worst_projection = 0, worst_distance = 0;
  int pip_points = 0;
  for (int shape = 0; shape < 1000; ++shape) {
    if (shape % 2 == 0) {
      const auto pts = oracle::random_chain(rng, 2 + (shape / 2) % 9);
      const Polyline line(pts);
      const auto poses = resample_polyline(line, 2.0);
      const double total = chain_length(pts);
      for (std::size_t k = 0; k + 1 < poses.size(); ++k) {
        const double err = oracle::dist(poses[k].position(), point_at(pts, 2.0 * k));
        worst_spacing = std::max(worst_spacing, err);
        tally.check(err <= 1e-6, "resample pose " + std::to_string(k) + " off by " + fmt("%.3g", err));
      }
      const double tail = total - 2.0 * static_cast<double>(poses.size() - 2);
      tally.check(oracle::dist(poses.back().position(), pts.back()) <= 1e-6 && tail > -1e-6 && tail <= 2.0 + 1e-6,
                  "resample terminal pose");
      for (int q = 0; q < 4; ++q) {
        const Vec2 p{-70 + 140 * u01(rng), -70 + 140 * u01(rng)};
        const auto proj = project_point_to_polyline(p, line);
        const double exact = chain_distance(p, pts);
        const double err = std::abs(proj.distance - exact);
        worst_projection = std::max(worst_projection, err);
        tally.check(err <= 1e-6 && std::abs(oracle::dist(p, proj.foot) - proj.distance) <= 1e-6 &&
                        chain_distance(proj.foot, pts) <= 1e-6,
                    "projection of shape " + std::to_string(shape));
      }
    } else {
      const Vec2 c{-20 + 40 * u01(rng), -20 + 40 * u01(rng)};
      const double rmin = 1 + 2 * u01(rng);
      const auto ring = oracle::random_star(rng, c, 3 + (shape / 2) % 12, rmin, rmin + 2 + 8 * u01(rng));
      const Polygon poly(ring);
      for (int k = 0; k < 100; ++k) {
        const Vec2 p{c.x - 14 + 28 * u01(rng), c.y - 14 + 28 * u01(rng)};
        if (oracle::ring_boundary_distance(p, ring) < 1e-7) continue;
        ++pip_points;
        tally.check(point_in_polygon(p, poly) == (oracle::winding_number(p, ring) != 0), "point in polygon");
      }
      const double ang = 2 * M_PI * u01(rng);
      const double off = 30 * u01(rng);
      const auto other =
          oracle::random_star(rng, {c.x + off * std::cos(ang), c.y + off * std::sin(ang)}, 3 + shape % 9, 1, 2 + 6 * u01(rng));
      // Dense boundary samples against exact segment distance, both ways; error is at most half the spacing.
      double want = 0;
      bool touching = false;
      const auto da = oracle::dense_ring(ring, 20000);
      const auto db = oracle::dense_ring(other, 20000);
      for (const Vec2& p : da) touching = touching || oracle::winding_number(p, other) != 0;
      for (const Vec2& p : db) touching = touching || oracle::winding_number(p, ring) != 0;
      if (!touching) {
        want = std::numeric_limits<double>::infinity();
        for (const Vec2& p : da) want = std::min(want, oracle::ring_boundary_distance(p, other));
        for (const Vec2& p : db) want = std::min(want, oracle::ring_boundary_distance(p, ring));
      }
      const double got = polygon_distance(poly, Polygon(other));
      worst_distance = std::max(worst_distance, std::abs(got - want));
      tally.check(std::abs(got - want) <= 0.01, "polygon distance " + fmt("%.4f", got) + " vs " + fmt("%.4f", want));
    }
  }
  const double secs = seconds_since(t0);
  tally.check(secs < 30.0, "runtime " + fmt("%.1f s", secs));
  return tally.result("1000 shapes in " + fmt("%.1f s", secs) + ", max spacing err " + fmt("%.2g m", worst_spacing) +
                      ", max projection err " + fmt("%.2g m", worst_projection) + ", max distance err " +
                      fmt("%.2g m", worst_distance) + ", " + std::to_string(pip_points) + " pip points");
}

// ---------------------------------------------------------------------------

/// Divider of the border segment nearest to p on one side of the lane.
DividerType nearest_divider(Vec2 p, const std::vector<BorderSegment>& side) {
  double best = std::numeric_limits<double>::infinity();
  DividerType out = DividerType::NoMarking;
  for (const auto& seg : side) {
    const double d = chain_distance(p, to_vec(seg.line.points()));
    if (d < best) {
      best = d;
      out = seg.divider;
    }
  }
  return out;
}

Result snippet_law() {
  Tally tally;
  std::size_t snippets = 0;
  double longest = 0;
  for (const auto& spec : kTemplates) {
    const auto sc = synth::generate(synth::template_from_spec(spec), 1, 2.0);
    const World w = compile(sc);
    for (const RawLane& raw : sc.map.lanes) {
      const LaneModel& lane = w.map.lanes[w.map.lane_index.at(raw.id)];
      const auto pts = to_vec(raw.centerline.points());
      const double length = chain_length(pts);
      double sum = 0;
      for (std::size_t k = 0; k < lane.snippets.size(); ++k) {
        const LaneSnippetRec& s = lane.snippets[k];
        const NodeIndex node = lane.snippet_nodes[k];
        const double attr_len = std::get<double>(*w.graph.attr(node, "snippetHasLength"));
        ++snippets;
        longest = std::max(longest, attr_len);
        sum += attr_len;
        tally.check(attr_len <= 20.0 + 1e-6, raw.id + " snippet " + fmt("%.6f m", attr_len));
        tally.check(std::get<std::string>(*w.graph.attr(node, "leftDivider")) == to_string(s.left) &&
                        std::get<std::string>(*w.graph.attr(node, "rightDivider")) == to_string(s.right),
                    raw.id + " divider attributes");
        for (int j = 0; j < 9; ++j) {
          const Vec2 p = point_at(pts, s.s_start + (j + 0.5) / 9.0 * s.length());
          tally.check(nearest_divider(p, raw.left_border) == s.left && nearest_divider(p, raw.right_border) == s.right,
                      raw.id + " border type changes inside snippet " + std::to_string(k));
        }
      }
      tally.check(std::abs(sum - length) <= 1e-6 * length, raw.id + " snippet sum " + fmt("%.9f", sum));
    }
    if (spec == "straight") {
      const LaneModel& f = w.map.lanes[w.map.lane_index.at("F0_0")];
      tally.check(std::abs(f.centerline.length() - 50.0) < 1e-9 && f.snippets.size() == 3, "50 m lane snippet count");
    }
  }
  const auto fifty = compute_lane_snippets(fixture::straight_lane("L", {0, 0}, {50, 0}, 1.75, 1.75), CompilerConfig{});
  tally.check(fifty.size() == 3, "50 m fixture gives " + std::to_string(fifty.size()) + " snippets");
  return tally.result(std::to_string(snippets) + " snippets over " + std::to_string(kTemplates.size()) +
                      " templates, longest " + fmt("%.4f m", longest) + ", 50 m lane -> " + std::to_string(fifty.size()));
}

// ---------------------------------------------------------------------------

/// Width at centreline x for borders y = +-(1 + 0.1 x): both feet of the
/// perpendiculars sit at parameter t = (x - 0.1) / 1.01, clamped to the border.
double wedge_width(double x) { return 2.0 * (1.0 + 0.1 * std::clamp((x - 0.1) / 1.01, 0.0, 20.0)); }

Result width_law() {
  Tally tally;
  RawMapBundle m;
  m.locations.push_back({"loc", "wedge", true, std::nullopt});
  const Polyline left({{0, 1}, {20, 3}});
  const Polyline right({{0, -1}, {20, -3}});
  m.lanes.push_back(RawLane{"wedge", Polyline({{0, 0}, {20, 0}}), {{left, DividerType::SingleDashed}},
                            {{right, DividerType::SingleDashed}}, Polygon({{0, 1}, {20, 3}, {20, -3}, {0, -1}}), std::nullopt});
  m.lanes.push_back(fixture::straight_lane("straight", {0, 10}, {40, 10}, 1.75, 1.75));
  KnowledgeGraph g;
  const MapModel model = compile_map(m, CompilerConfig{}, g, 1);
  double worst_wedge = 0;
  std::size_t wedge_slices = 0;
  for (NodeIndex s : g.neighbors(g.at("wedge"), EdgeType::laneHasSlice, Direction::Out)) {
    const double x = std::get<double>(*g.attr(s, "x"));
    const double width = std::get<double>(*g.attr(s, "laneSliceHasWidth"));
    const double err = std::abs(width - wedge_width(x));
    worst_wedge = std::max(worst_wedge, err);
    ++wedge_slices;
    tally.check(err <= 0.01, "wedge slice at x=" + fmt("%.2f", x) + " width " + fmt("%.4f", width));
  }
  tally.check(wedge_slices == 11, "wedge slice count " + std::to_string(wedge_slices));

  double worst_straight = 0;
  std::size_t straight_slices = 0;
  auto check_straight = [&](const KnowledgeGraph& graph, NodeIndex lane, const std::string& id) {
    for (NodeIndex s : graph.neighbors(lane, EdgeType::laneHasSlice, Direction::Out)) {
      const double err = std::abs(std::get<double>(*graph.attr(s, "laneSliceHasWidth")) - 3.5);
      worst_straight = std::max(worst_straight, err);
      ++straight_slices;
      tally.check(err <= 1e-6, id + " slice width off by " + fmt("%.3g", err));
    }
  };
  check_straight(g, g.at("straight"), "fixture");
  for (const char* spec : {"straight", "straight:lanes=2,length=200"}) {
    const auto sc = synth::generate(synth::template_from_spec(spec), 1, 1.0);
    const World w = compile(sc);
    for (const auto& lane : w.map.lanes) check_straight(w.graph, lane.node, lane.id);
  }
  return tally.result(std::to_string(wedge_slices) + " wedge slices, max err " + fmt("%.2g m", worst_wedge) + "; " +
                      std::to_string(straight_slices) + " straight slices, max err " + fmt("%.2g m", worst_straight));
}

// ---------------------------------------------------------------------------

Result pose_resolution() {
  Tally tally;
  std::size_t connectors = 0;
  std::size_t poses = 0;
  double worst = 0;
  for (const auto& spec : kTemplates) {
    const auto sc = synth::generate(synth::template_from_spec(spec), 1, 1.0);
    const World w = compile(sc);
    const KnowledgeGraph& g = w.graph;
    for (const RawConnector& raw : sc.map.connectors) {
      ++connectors;
      const auto pts = to_vec(raw.centerline.points());
      const auto members = g.neighbors(g.at(raw.id), EdgeType::connectorHasPose, Direction::Out);
      // Walk the hasNextPose chain from the pose nothing points to.
      std::optional<NodeIndex> head;
      for (NodeIndex p : members) {
        if (g.degree(p, EdgeType::hasNextPose, Direction::In) == 0) head = p;
      }
      std::vector<double> arcs;
      for (std::optional<NodeIndex> p = head; p; ) {
        arcs.push_back(arc_of({std::get<double>(*g.attr(*p, "x")), std::get<double>(*g.attr(*p, "y"))}, pts));
        const auto next = g.neighbors(*p, EdgeType::hasNextPose, Direction::Out);
        p = next.empty() ? std::nullopt : std::optional<NodeIndex>(next.front());
      }
      poses += arcs.size();
      tally.check(head && arcs.size() == members.size() && arcs.size() >= 2, raw.id + " pose chain");
      if (arcs.size() < 2) continue;
      const double length = chain_length(pts);
      tally.check(std::abs(arcs.front()) <= 1e-6 && std::abs(arcs.back() - length) <= 1e-6, raw.id + " pose endpoints");
      for (std::size_t k = 1; k + 1 < arcs.size(); ++k) {
        const double err = std::abs(arcs[k] - arcs[k - 1] - 2.0);
        worst = std::max(worst, err);
        tally.check(err <= 1e-6, raw.id + " pose gap " + std::to_string(k) + " = " + fmt("%.9f", arcs[k] - arcs[k - 1]));
      }
      const double last = arcs.back() - arcs[arcs.size() - 2];
      tally.check(last > 0 && last <= 2.0 + 1e-6, raw.id + " terminal gap " + fmt("%.6f", last));
    }
  }
  return tally.result(std::to_string(connectors) + " connectors, " + std::to_string(poses) + " poses, max gap err " +
                      fmt("%.2g m", worst));
}

// ---------------------------------------------------------------------------

Result thresholded_relations() {
  Tally tally;
  std::size_t crossings = 0, next_to_pairs = 0, next_to_edges = 0;
  for (const char* spec : {"intersection", "intersection:lanes=2", "parking"}) {
    const auto sc = synth::generate(synth::template_from_spec(spec), 1, 1.0);
    const World w = compile(sc);
    const KnowledgeGraph& g = w.graph;
    for (const RawArea& c : sc.map.ped_crossings) {
      ++crossings;
      std::vector<std::pair<double, std::string>> near;
      for (const RawArea& wk : sc.map.walkways) {
        const double d = ring_distance(to_vec(c.polygon.vertices()), to_vec(wk.polygon.vertices()));
        if (d < 5.0) near.emplace_back(d, wk.id);
      }
      std::sort(near.begin(), near.end());
      std::set<std::string> want;
      for (std::size_t i = 0; i < std::min<std::size_t>(2, near.size()); ++i) want.insert(near[i].second);
      const auto got_list = g.neighbors(c.id, EdgeType::connectsWalkways, Direction::Out);
      const std::set<std::string> got(got_list.begin(), got_list.end());
      tally.check(got == want && !want.empty(), std::string(spec) + " " + c.id + " walkways");
    }
    auto check_next_to = [&](const std::vector<RawArea>& areas, EdgeType type) {
      for (const RawArea& a : areas) {
        for (const RawLane& l : sc.map.lanes) {
          const double d = ring_distance(to_vec(a.polygon.vertices()), to_vec(l.polygon.vertices()));
          const bool edge = g.has_edge(type, g.at(a.id), g.at(l.id));
          ++next_to_pairs;
          next_to_edges += edge ? 1 : 0;
          tally.check(edge == (d < 4.0), std::string(spec) + " " + a.id + "-" + l.id + " at " + fmt("%.4f m", d));
        }
      }
    };
    check_next_to(sc.map.walkways, EdgeType::walkwayIsNextTo);
    check_next_to(sc.map.carpark_areas, EdgeType::carparkIsNextTo);
  }
  return tally.result(std::to_string(crossings) + " crossings, " + std::to_string(next_to_pairs) + " area-lane pairs (" +
                      std::to_string(next_to_edges) + " isNextTo)");
}

// ---------------------------------------------------------------------------

Result local_frame_invariance() {
  Tally tally;
  const auto base = synth::generate(synth::template_from_spec("intersection"), 7, 12.0);
  const World w0 = compile(base);
  const Extractor ex0(w0.graph, CompilerConfig{});
  const auto ref = ex0.build_examples(ex0.select_all_targets(), 1);
  tally.check(!ref.empty(), "no examples");
  auto origin_ok = [&](const HetGraphExample& e) {
    const auto row = extract_fixtures::target_row(e);
    return std::abs(row[0]) <= 1e-9 && std::abs(row[1]) <= 1e-9 && std::abs(row[2]) <= 1e-9;
  };
  for (const auto& e : ref) tally.check(origin_ok(e), "reference target row not at origin");
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> off(-2000.0, 2000.0);
  std::size_t compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto moved = base;
    const double yaw = ang(rng);
    const Vec2 shift{off(rng), off(rng)};
    synth::apply_rigid_transform(moved.map, moved.trips, yaw, shift);
    const World w = compile(moved);
    const Extractor ex(w.graph, CompilerConfig{});
    const auto got = ex.build_examples(ex.select_all_targets(), 1);
    tally.check(got.size() == ref.size(), "trial " + std::to_string(trial) + " example count");
    for (std::size_t i = 0; i < std::min(got.size(), ref.size()); ++i) {
      std::string why;
      ++compared;
      tally.check(extract_fixtures::examples_close(ref[i], got[i], 1e-6, &why),
                  "trial " + std::to_string(trial) + " yaw " + fmt("%.3f", yaw) + " example " + std::to_string(i) + ": " + why);
      tally.check(origin_ok(got[i]), "target row not at origin");
    }
  }
  return tally.result("100 transforms x " + std::to_string(ref.size()) + " examples, " + std::to_string(compared) +
                      " compared at 1e-6");
}

// ---------------------------------------------------------------------------

synth::Scenario constant_velocity_cast() {
  synth::ScenarioTemplate tpl;
  tpl.name = "constant-velocity";
  tpl.layout = synth::StraightRoad{1, 300};
  const std::vector<std::string> fwd{"F0_0", "F0_1", "F0_2", "F0_3", "F0_4", "F0_5"};
  tpl.agents.push_back({"ego", Category::Car, fwd, 2.0, 1.0, 0.0, std::nullopt, true});
  tpl.agents.push_back({"cv1", Category::Car, fwd, 1.0, 60.0});
  tpl.agents.push_back({"cv3", Category::Truck, fwd, 3.0, 40.0});
  tpl.agents.push_back({"cv5", Category::Car, fwd, 5.0, 20.0});
  tpl.agents.push_back({"cv8", Category::Motorcycle, fwd, 8.0, 8.0});
  return synth::generate(tpl, 0, 20.0);
}

Result window_law() {
  Tally tally;
  std::size_t examples = 0, cv_examples = 0;
  double worst = 0;
  const std::map<std::string, double> speeds = {{"car_lead", 4.0}, {"car_oncoming", 5.0}, {"cv1", 1.0},
                                                {"cv3", 3.0},      {"cv5", 5.0},          {"cv8", 8.0}};
  std::vector<synth::Scenario> scenarios;
  scenarios.push_back(synth::generate(synth::template_from_spec("straight"), 0, 20.0));
  scenarios.push_back(constant_velocity_cast());
  scenarios.push_back(synth::generate(synth::template_from_spec("intersection"), 2, 12.0));
  scenarios.push_back(synth::generate(synth::template_from_spec("parking"), 2, 12.0));
  scenarios.push_back(synth::generate(synth::template_from_spec("city:junctions=3,agents=12"), 2, 12.0));
  for (const auto& sc : scenarios) {
    const World w = compile(sc);
    const Extractor ex(w.graph, CompilerConfig{});
    for (const TargetSpec& t : ex.select_all_targets()) {
      const FrameWindow win = ex.window(t);
      const HetGraphExample e = ex.build_example(t);
      ++examples;
      const NodeTable* scenes = e.table("Scene");
      tally.check(win.history.size() == 5 && win.future.size() == 12 && e.y.size() == 12 && scenes &&
                      scenes->rows() == 5,
                  t.participant + "@" + std::to_string(t.anchor_index) + " window shape");
      const auto it = speeds.find(t.participant);
      if (it == speeds.end()) continue;
      ++cv_examples;
      for (std::size_t k = 0; k < e.y.size(); ++k) {
        const double want = it->second * 0.5 * static_cast<double>(k + 1);
        const double err = std::max(std::abs(e.y[k][0] - want), std::abs(e.y[k][1]));
        worst = std::max(worst, err);
        tally.check(err <= 1e-6, t.participant + " y[" + std::to_string(k) + "] off by " + fmt("%.3g", err));
      }
    }
  }
  return tally.result(std::to_string(examples) + " examples, " + std::to_string(cv_examples) +
                      " constant-velocity targets, max label err " + fmt("%.2g m", worst));
}

// ---------------------------------------------------------------------------

Result four_hop_pruning() {
  using extract_fixtures::block_of_lane;
  using extract_fixtures::sp_id;
  Tally tally;
  const auto sc = extract_fixtures::six_block_chain();
  const World w = compile(sc);
  const KnowledgeGraph& g = w.graph;
  const Extractor ex(g, CompilerConfig{});
  const auto ts = ex.select_targets("seq0");
  const auto it = std::find_if(ts.begin(), ts.end(), [](const TargetSpec& t) { return t.participant == "tgt"; });
  if (it == ts.end()) return {false, "target tgt not selected"};
  const auto nodes = ex.extract_map_subgraph(*it);
  auto included = [&](const std::string& id) { return std::binary_search(nodes.begin(), nodes.end(), g.at(id)); };
  std::string present;
  for (int k = 0; k < 6; ++k) {
    const std::string block = block_of_lane(w, "F0_" + std::to_string(k));
    if (included(block)) present += std::to_string(k);
    tally.check(included(block) == (k <= 4), "chain block " + std::to_string(k));
  }
  const auto& seed = w.map.blocks[w.map.lanes[w.map.lane_index.at("F0_0")].block];
  tally.check(seed.opposing.size() == 1 && included(w.map.blocks[seed.opposing.front()].id), "seed opposing block");

  const std::string far = sp_id("seq0", it->anchor_index, "far");
  const auto far_on = g.neighbors(far, EdgeType::isOn, Direction::Out);
  tally.check(std::find(far_on.begin(), far_on.end(), "F0_5") != far_on.end(), "parked car is on F0_5");
  const HetGraphExample e = ex.build_example(*it);
  const NodeTable* sp = e.table("SceneParticipant");
  auto has = [&](const std::string& id) { return sp && std::find(sp->node_ids.begin(), sp->node_ids.end(), id) != sp->node_ids.end(); };
  tally.check(!has(far), "agent on block 5 excluded");
  tally.check(!has(sp_id("seq0", it->anchor_index, "oncoming_far")), "oncoming agent beyond the map excluded");
  tally.check(has(sp_id("seq0", it->anchor_index, "tgt")), "target present");
  return tally.result("chain blocks included {" + present + "}, seed opposing " +
                      (included(w.map.blocks[seed.opposing.front()].id) ? std::string("included") : std::string("missing")) +
                      ", block-5 agent " + (has(far) ? "present" : "excluded"));
}

// ---------------------------------------------------------------------------

Result schema_suite() {
  Tally tally;
  const auto cases = schema_cases::axiom_cases();
  std::set<std::string> axioms;
  for (const auto& r : schema_rules()) {
    if (r.axiom) axioms.insert(std::string(r.id));
  }
  std::set<std::string> covered;
  for (const auto& c : cases) {
    const bool hit = schema_cases::reports(validate_schema(c.graph), c.rule, c.culprit);
    tally.check(hit, "axiom " + std::to_string(c.axiom) + " " + c.rule + " not detected");
    if (hit) covered.insert(c.rule);
  }
  tally.check(covered == axioms, "axioms without a detected case");
  std::size_t scenarios = 0;
  for (const auto& spec : kTemplates) {
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto sc = synth::generate(synth::template_from_spec(spec), seed, 6.0);
      const auto vs = validate_schema(compile(sc).graph);
      ++scenarios;
      tally.check(vs.empty(), spec + " seed " + std::to_string(seed) + ": " +
                                  (vs.empty() ? std::string() : vs.front().rule + " " + vs.front().message));
    }
  }
  return tally.result(std::to_string(covered.size()) + "/" + std::to_string(axioms.size()) + " axioms detected, " +
                      std::to_string(scenarios) + " scenarios violation-free");
}

// ---------------------------------------------------------------------------

std::string tree_digest(const fs::path& root, std::size_t* files) {
  std::vector<fs::path> paths;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  };
  for (const auto& p : paths) {
    mix(fs::relative(p, root).generic_string());
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    mix(ss.str());
  }
  *files = paths.size();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string dataset_run(const synth::Scenario& sc, const fs::path& dir, unsigned jobs, std::size_t* files) {
  const World w = compile(sc, jobs);
  const Extractor ex(w.graph, CompilerConfig{});
  const auto examples = ex.build_examples(ex.select_all_targets(), jobs);
  SplitTable splits;
  const auto seqs = ex.sequences();
  for (std::size_t i = 0; i < seqs.size(); ++i) splits[seqs[i]] = static_cast<Split>(i % 3);
  fs::remove_all(dir);
  write_dataset(examples, splits, dir, CompilerConfig{}, jobs);
  return tree_digest(dir, files);
}

Result determinism_roundtrip() {
  Tally tally;
  std::size_t triples = 0;
  for (const auto& spec : kTemplates) {
    const auto sc = synth::generate(synth::template_from_spec(spec), 4, 6.0);
    const std::string first = to_ntriples(compile(sc, 1).graph);
    const std::string again = to_ntriples(parse_ntriples(first));
    triples += static_cast<std::size_t>(std::count(first.begin(), first.end(), '\n'));
    tally.check(first == again, spec + " export-parse-export differs");
    tally.check(to_ntriples(compile(sc, 3).graph) == first, spec + " export depends on thread count");
  }
  const fs::path root = fs::temp_directory_path() / ("scenekg_acceptance_" + std::to_string(::getpid()));
  synth::Scenario sc = synth::generate(synth::template_from_spec("intersection"), 5, 12.0);
  // A second sequence so all three split directories are populated.
  auto extra = synth::generate(synth::template_from_spec("intersection"), 6, 12.0);
  extra.trips.trips[0].sequences[0].id = "seq1";
  extra.trips.trips[0].id = "trip1";
  sc.trips.trips.push_back(extra.trips.trips[0]);
  std::size_t files_a = 0, files_b = 0;
  const std::string a = dataset_run(sc, root / "a", 1, &files_a);
  const std::string b = dataset_run(sc, root / "b", 2, &files_b);
  fs::remove_all(root);
  tally.check(a == b && files_a == files_b && files_a > 1, "dataset trees differ: " + a + " vs " + b);
  return tally.result(std::to_string(kTemplates.size()) + " graphs (" + std::to_string(triples) +
                      " triples) byte-identical; dataset trees " + a + " / " + b + " (" + std::to_string(files_a) +
                      " files)");
}

// ---------------------------------------------------------------------------

double peak_rss_mb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return static_cast<double>(ru.ru_maxrss) / 1024.0;
}

Result performance_smoke() {
  const unsigned jobs = resolve_jobs(0);
  const auto sc = synth::generate(synth::template_from_spec("city:junctions=12,agents=100"), 1, 20.0);
  const auto& scenes = sc.trips.trips[0].sequences[0].scenes;
  const auto t0 = Clock::now();
  const World w = compile(sc, jobs);
  const double t_kg = seconds_since(t0);
  const Extractor ex(w.graph, CompilerConfig{});
  const auto examples = ex.build_examples(ex.select_all_targets(), jobs);
  const double total = seconds_since(t0);
  const double mem = peak_rss_mb();
  Tally tally;
  tally.check(sc.map.lanes.size() >= 1000, "lanes " + std::to_string(sc.map.lanes.size()));
  tally.check(scenes.size() == 40 && scenes.front().annotations.size() == 100, "agents x scenes");
  tally.check(!examples.empty(), "no examples");
  tally.check(total < 60.0, "wall time " + fmt("%.1f s", total));
  tally.check(mem < 4096.0, "peak memory " + fmt("%.0f MB", mem));
  return tally.result(std::to_string(sc.map.lanes.size()) + " lanes, " + std::to_string(scenes.front().annotations.size()) +
                      " agents x " + std::to_string(scenes.size()) + " scenes, " + std::to_string(w.graph.node_count()) +
                      " nodes, " + std::to_string(examples.size()) + " examples; KG " + fmt("%.1f s", t_kg) + ", total " +
                      fmt("%.1f s", total) + ", peak RSS " + fmt("%.0f MB", mem) + ", " + std::to_string(jobs) + " thread(s)");
}

struct Criterion {
  int id;
  const char* name;
  std::function<Result()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "geometry oracle suite", geometry_suite},
      {2, "snippet law", snippet_law},
      {3, "width law", width_law},
      {4, "pose resolution", pose_resolution},
      {5, "thresholded relations", thresholded_relations},
      {6, "local-frame invariance", local_frame_invariance},
      {7, "window and label shape", window_law},
      {8, "four-hop pruning", four_hop_pruning},
      {9, "schema suite", schema_suite},
      {10, "determinism and roundtrip", determinism_roundtrip},
      {11, "performance smoke", performance_smoke},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  int ran = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    ++ran;
    Result r;
    const auto t0 = Clock::now();
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += r.pass ? 0 : 1;
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << " (" << fmt("%.1f s", seconds_since(t0))
              << "): " << r.detail << std::endl;
  }
  std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
