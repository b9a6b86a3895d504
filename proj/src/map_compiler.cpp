#include "scenekg/map_compiler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scenekg/log.hpp"
#include "scenekg/parallel.hpp"

namespace scenekg {
namespace {

using geom::BoundingBox;

constexpr double kBorderSampleStep = 0.5;
constexpr double kArcEps = 1e-6;

struct BorderHit {
  Vec2 foot;
  double distance;
};

BorderHit project_to_border(Vec2 p, const std::vector<BorderSegment>& border) {
  BorderHit best{{}, std::numeric_limits<double>::infinity()};
  for (const auto& seg : border) {
    const auto proj = geom::project_point_to_polyline(p, seg.line);
    if (proj.distance < best.distance - 1e-12) best = {proj.foot, proj.distance};
  }
  return best;
}

double distance_to_border(Vec2 p, const std::vector<BorderSegment>& border, double cutoff) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& seg : border) {
    if (seg.line.bounds().inflated(cutoff).contains(p)) {
      best = std::min(best, geom::project_point_to_polyline(p, seg.line).distance);
    }
  }
  return best;
}

struct SideMatch {
  double shared = 0.0;
  std::vector<Vec2> matched;
};

// Length of `border` lying within `tol` of either border of `other`.
SideMatch match_border(const std::vector<BorderSegment>& border, const RawLane& other, double tol) {
  SideMatch m;
  const BoundingBox other_box = other.polygon.bounds().inflated(tol + 1e-9);
  for (const auto& seg : border) {
    if (!seg.line.bounds().intersects(other_box)) continue;
    const auto samples = geom::resample_polyline(seg.line, kBorderSampleStep);
    bool prev_hit = false;
    Vec2 prev{};
    for (const auto& pose : samples) {
      const Vec2 p = pose.position();
      const bool hit = std::min(distance_to_border(p, other.left_border, tol), distance_to_border(p, other.right_border, tol)) < tol;
      if (hit) {
        m.matched.push_back(p);
        if (prev_hit) m.shared += geom::distance(prev, p);
      }
      prev_hit = hit;
      prev = p;
    }
  }
  return m;
}

void add_shape(KnowledgeGraph& g, NodeIndex owner, const Polygon& poly, const std::optional<geom::LatLon>& origin) {
  const NodeIndex s = g.add_node(NodeType::Polygon, g.node(owner).id + "#shape");
  g.set_attr(s, "wkt", WktLiteral{geom::to_wkt(poly)});
  if (origin) g.set_attr(s, "gps_wkt", WktLiteral{geom::to_gps_wkt(poly, *origin)});
  g.add_edge(EdgeType::hasShape, owner, s);
}

void add_shape(KnowledgeGraph& g, NodeIndex owner, const Polyline& line, const std::optional<geom::LatLon>& origin) {
  const NodeIndex s = g.add_node(NodeType::LineString, g.node(owner).id + "#shape");
  g.set_attr(s, "wkt", WktLiteral{geom::to_wkt(line)});
  if (origin) g.set_attr(s, "gps_wkt", WktLiteral{geom::to_gps_wkt(line, *origin)});
  g.add_edge(EdgeType::hasShape, owner, s);
}

AttrMap pose_attrs(const Pose2D& p) {
  return {{"x", p.x}, {"y", p.y}, {"poseHasOrientation", geom::normalize_angle(p.yaw)}};
}

Polygon snippet_polygon(const RawLane& lane, const LaneSnippetRec& snip) {
  std::vector<double> arcs{snip.s_start};
  for (std::size_t i = 1; i + 1 < lane.centerline.size(); ++i) {
    const double s = lane.centerline.arc_at(i);
    if (s > snip.s_start + kArcEps && s < snip.s_end - kArcEps) arcs.push_back(s);
  }
  arcs.push_back(snip.s_end);
  std::vector<Vec2> ring;
  ring.reserve(arcs.size() * 2);
  for (double s : arcs) ring.push_back(project_to_border(lane.centerline.point_at(s), lane.left_border).foot);
  for (auto it = arcs.rbegin(); it != arcs.rend(); ++it) {
    ring.push_back(project_to_border(lane.centerline.point_at(*it), lane.right_border).foot);
  }
  return Polygon(std::move(ring));
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<LaneSliceRec> compute_lane_slices(const RawLane& lane, double resolution) {
  if (lane.left_border.empty() || lane.right_border.empty()) {
    throw MapCompileError("lane " + lane.id + ": border missing");
  }
  const auto poses = geom::resample_polyline(lane.centerline, resolution);
  std::vector<LaneSliceRec> out;
  out.reserve(poses.size());
  for (std::size_t k = 0; k < poses.size(); ++k) {
    const double s = k + 1 == poses.size() ? lane.centerline.length() : static_cast<double>(k) * resolution;
    const Vec2 p = poses[k].position();
    const double width = geom::distance(project_to_border(p, lane.left_border).foot, project_to_border(p, lane.right_border).foot);
    if (!(width > 0)) throw MapCompileError("lane " + lane.id + ": zero width at arc " + geom::format_number(s));
    out.push_back({poses[k], s, width});
  }
  return out;
}

std::vector<LaneSnippetRec> compute_lane_snippets(const RawLane& lane, const CompilerConfig& cfg) {
  if (lane.left_border.empty() || lane.right_border.empty()) {
    throw MapCompileError("lane " + lane.id + ": border missing");
  }
  const double total = lane.centerline.length();
  struct Piece {
    double lo;
    double hi;
    DividerType type;
  };
  auto pieces_of = [&](const std::vector<BorderSegment>& border, const char* side) {
    std::vector<Piece> pieces;
    for (const auto& seg : border) {
      const double a = geom::project_point_to_polyline(seg.line.front(), lane.centerline).arc_s;
      const double b = geom::project_point_to_polyline(seg.line.back(), lane.centerline).arc_s;
      pieces.push_back({std::min(a, b), std::max(a, b), seg.divider});
    }
    std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.lo < y.lo; });
    double covered = 0.0;
    for (const auto& p : pieces) {
      if (p.lo > covered + cfg.border_gap_tolerance_m) {
        throw MapCompileError("lane " + lane.id + ": " + side + " border leaves arc interval [" +
                              geom::format_number(covered) + ", " + geom::format_number(p.lo) + "] uncovered");
      }
      covered = std::max(covered, p.hi);
    }
    if (covered < total - cfg.border_gap_tolerance_m) {
      throw MapCompileError("lane " + lane.id + ": " + side + " border leaves arc interval [" +
                            geom::format_number(covered) + ", " + geom::format_number(total) + "] uncovered");
    }
    return pieces;
  };
  const auto left = pieces_of(lane.left_border, "left");
  const auto right = pieces_of(lane.right_border, "right");

  std::vector<double> cuts{0.0, total};
  for (const auto* pieces : {&left, &right}) {
    for (std::size_t i = 0; i + 1 < pieces->size(); ++i) {
      const auto& a = (*pieces)[i];
      const auto& b = (*pieces)[i + 1];
      if (a.type == b.type) continue;
      const double cut = 0.5 * (a.hi + b.lo);
      if (cut > kArcEps && cut < total - kArcEps) cuts.push_back(cut);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double x, double y) { return y - x <= kArcEps; }), cuts.end());
  cuts.back() = total;

  auto type_at = [](const std::vector<Piece>& pieces, double s) {
    DividerType t = pieces.front().type;
    for (const auto& p : pieces) {
      if (p.lo <= s) t = p.type;
    }
    return t;
  };

  std::vector<LaneSnippetRec> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const double mid = 0.5 * (a + b);
    const DividerType lt = type_at(left, mid);
    const DividerType rt = type_at(right, mid);
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a - 1e-9) / cfg.snippet_max_len_m)));
    const double step = (b - a) / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double s0 = a + static_cast<double>(k) * step;
      const double s1 = k + 1 == n ? b : a + static_cast<double>(k + 1) * step;
      out.push_back({s0, s1, lt, rt});
    }
  }
  return out;
}

std::optional<LaneAdjacency> lane_adjacency(const RawLane& a, const RawLane& b, const CompilerConfig& cfg) {
  const double tol = cfg.lateral_adjacency_m;
  if (!a.polygon.bounds().inflated(tol).intersects(b.polygon.bounds())) return std::nullopt;
  SideMatch left_a = match_border(a.left_border, b, tol);
  SideMatch right_a = match_border(a.right_border, b, tol);
  const bool a_left = left_a.shared >= right_a.shared;
  SideMatch& best_a = a_left ? left_a : right_a;
  if (best_a.shared < cfg.min_shared_border_m) return std::nullopt;
  const SideMatch left_b = match_border(b.left_border, a, tol);
  const SideMatch right_b = match_border(b.right_border, a, tol);

  LaneAdjacency adj{};
  adj.side_a = a_left ? Side::Left : Side::Right;
  adj.side_b = left_b.shared >= right_b.shared ? Side::Left : Side::Right;
  adj.shared_length = best_a.shared;
  adj.shared_s0 = std::numeric_limits<double>::infinity();
  adj.shared_s1 = -std::numeric_limits<double>::infinity();
  for (const Vec2& p : best_a.matched) {
    const double s = geom::project_point_to_polyline(p, a.centerline).arc_s;
    adj.shared_s0 = std::min(adj.shared_s0, s);
    adj.shared_s1 = std::max(adj.shared_s1, s);
  }
  const double mid = 0.5 * (adj.shared_s0 + adj.shared_s1);
  const auto on_b = geom::project_point_to_polyline(a.centerline.point_at(mid), b.centerline);
  adj.same_direction = geom::heading_difference(a.centerline.heading_at(mid), b.centerline.heading_at(on_b.arc_s)) < 90.0;
  return adj;
}

void build_lane_graph(const RawMapBundle& raw, const CompilerConfig& cfg, KnowledgeGraph& g, MapModel& model,
                      unsigned jobs) {
  model.geo_origin = raw.geo_origin();
  const std::size_t n = raw.lanes.size();

  std::vector<std::vector<LaneSliceRec>> slices(n);
  std::vector<std::vector<LaneSnippetRec>> snippets(n);
  std::vector<std::vector<std::optional<Polygon>>> snippet_shapes(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const RawLane& lane = raw.lanes[i];
    slices[i] = compute_lane_slices(lane, cfg.pose_resolution_m);
    snippets[i] = compute_lane_snippets(lane, cfg);
    for (const auto& snip : snippets[i]) {
      try {
        snippet_shapes[i].push_back(snippet_polygon(lane, snip));
      } catch (const geom::GeometryError&) {
        snippet_shapes[i].push_back(std::nullopt);
      }
    }
  });

  for (std::size_t i = 0; i < n; ++i) {
    const RawLane& lane = raw.lanes[i];
    const NodeIndex node = g.add_node(NodeType::Lane, lane.id, {{"length", lane.centerline.length()}});
    add_shape(g, node, lane.polygon, model.geo_origin);
    LaneModel lm{lane.id, lane.centerline, lane.polygon, lane.left_border, lane.right_border, node};
    for (std::size_t k = 0; k < snippets[i].size(); ++k) {
      const auto& snip = snippets[i][k];
      const NodeIndex sn = g.add_node(NodeType::LaneSnippet, lane.id + "#snippet" + std::to_string(k),
                                      {{"snippetHasLength", snip.length()},
                                       {"leftDivider", std::string(to_string(snip.left))},
                                       {"rightDivider", std::string(to_string(snip.right))}});
      g.add_edge(EdgeType::hasLaneSnippet, node, sn);
      if (k > 0) g.add_edge(EdgeType::hasNextLaneSnippet, lm.snippet_nodes.back(), sn);
      if (snippet_shapes[i][k]) {
        add_shape(g, sn, *snippet_shapes[i][k], model.geo_origin);
      } else {
        model.warnings.push_back("snippet " + g.node(sn).id + " has a degenerate outline; using the lane polygon");
        add_shape(g, sn, lane.polygon, model.geo_origin);
      }
      lm.snippet_nodes.push_back(sn);
    }
    for (std::size_t k = 0; k < slices[i].size(); ++k) {
      const auto& slice = slices[i][k];
      AttrMap attrs = pose_attrs(slice.pose);
      attrs.emplace("laneSliceHasWidth", slice.width);
      const NodeIndex sl = g.add_node(NodeType::LaneSlice, lane.id + "#slice" + std::to_string(k), std::move(attrs));
      g.add_edge(EdgeType::laneHasSlice, node, sl);
      if (k > 0) g.add_edge(EdgeType::hasNextLaneSlice, lm.slice_nodes.back(), sl);
      lm.slice_nodes.push_back(sl);
    }
    lm.snippets = std::move(snippets[i]);
    lm.slices = std::move(slices[i]);
    model.lane_grid.insert(static_cast<std::uint32_t>(i), lane.polygon.bounds());
    model.lane_index.emplace(lane.id, static_cast<int>(i));
    model.lanes.push_back(std::move(lm));
  }

  for (std::size_t c = 0; c < raw.connectors.size(); ++c) {
    const RawConnector& rc = raw.connectors[c];
    const int in = model.lane_index.at(rc.incoming_lane);
    const int out = model.lane_index.at(rc.outgoing_lane);
    const NodeIndex node = g.add_node(NodeType::LaneConnector, rc.id, {{"length", rc.centerline.length()}});
    add_shape(g, node, rc.centerline, model.geo_origin);
    g.add_edge(EdgeType::hasIncomingLane, node, model.lanes[in].node);
    g.add_edge(EdgeType::hasOutgoingLane, node, model.lanes[out].node);
    g.add_edge(EdgeType::hasNextLane, model.lanes[in].node, model.lanes[out].node);
    g.add_edge(EdgeType::hasPreviousLane, model.lanes[out].node, model.lanes[in].node);
    auto push_unique = [](std::vector<int>& v, int x) {
      if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    };
    push_unique(model.lanes[in].next, out);
    push_unique(model.lanes[out].prev, in);
    model.lanes[in].connectors_out.push_back(static_cast<int>(c));
    model.lanes[out].connectors_in.push_back(static_cast<int>(c));

    ConnectorModel cm{rc.id, in, out, rc.centerline, node};
    cm.poses = geom::resample_polyline(rc.centerline, cfg.pose_resolution_m);
    for (std::size_t k = 0; k < cm.poses.size(); ++k) {
      const NodeIndex p = g.add_node(NodeType::OrderedPose, rc.id + "#pose" + std::to_string(k), pose_attrs(cm.poses[k]));
      g.add_edge(EdgeType::connectorHasPose, node, p);
      if (k > 0) g.add_edge(EdgeType::hasNextPose, cm.pose_nodes.back(), p);
      cm.pose_nodes.push_back(p);
    }
    model.connector_grid.insert(static_cast<std::uint32_t>(c), rc.centerline.bounds());
    model.connector_index.emplace(rc.id, static_cast<int>(c));
    model.connectors.push_back(std::move(cm));
  }

  std::vector<std::pair<int, int>> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t j : model.lane_grid.query(raw.lanes[i].polygon.bounds().inflated(cfg.lateral_adjacency_m))) {
      if (j > i) candidates.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  std::vector<std::optional<LaneAdjacency>> found(candidates.size());
  parallel_for(candidates.size(), jobs, [&](std::size_t k) {
    found[k] = lane_adjacency(raw.lanes[candidates[k].first], raw.lanes[candidates[k].second], cfg);
  });
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!found[k]) continue;
    const auto [a, b] = candidates[k];
    model.adjacent_pairs.push_back({a, b, *found[k]});
    if (!found[k]->same_direction) continue;
    const auto& A = model.lanes[a];
    const auto& B = model.lanes[b];
    const double mid = 0.5 * (found[k]->shared_s0 + found[k]->shared_s1);
    const Vec2 pa = A.centerline.point_at(mid);
    const Vec2 pb = geom::project_point_to_polyline(pa, B.centerline).foot;
    const double h = A.centerline.heading_at(mid);
    const bool b_left_of_a = geom::cross({std::cos(h), std::sin(h)}, pb - pa) > 0;
    const int left = b_left_of_a ? b : a;
    const int right = b_left_of_a ? a : b;
    g.add_edge(EdgeType::hasLeftLane, model.lanes[right].node, model.lanes[left].node);
    g.add_edge(EdgeType::hasRightLane, model.lanes[left].node, model.lanes[right].node);
    model.lanes[right].left.push_back(left);
    model.lanes[left].right.push_back(right);
  }
}

void link_switch_via(const CompilerConfig&, KnowledgeGraph& g, MapModel& model) {
  auto facing = [](const LaneSnippetRec& s, Side side) { return side == Side::Left ? s.left : s.right; };
  for (const auto& pair : model.adjacent_pairs) {
    const LaneModel& A = model.lanes[pair.a];
    const LaneModel& B = model.lanes[pair.b];
    const auto& adj = pair.adjacency;
    for (std::size_t i = 0; i < A.snippets.size(); ++i) {
      const auto& sa = A.snippets[i];
      for (std::size_t j = 0; j < B.snippets.size(); ++j) {
        const auto& sb = B.snippets[j];
        const double p0 = geom::project_point_to_polyline(B.centerline.point_at(sb.s_start), A.centerline).arc_s;
        const double p1 = geom::project_point_to_polyline(B.centerline.point_at(sb.s_end), A.centerline).arc_s;
        const double lo = std::max({sa.s_start, std::min(p0, p1), adj.shared_s0});
        const double hi = std::min({sa.s_end, std::max(p0, p1), adj.shared_s1});
        if (hi - lo <= kArcEps) continue;
        g.add_edge(switch_via_for(facing(sa, adj.side_a)), A.snippet_nodes[i], B.snippet_nodes[j]);
        g.add_edge(switch_via_for(facing(sb, adj.side_b)), B.snippet_nodes[j], A.snippet_nodes[i]);
      }
    }
  }
}

void build_road_blocks(const CompilerConfig& cfg, KnowledgeGraph& g, MapModel& model) {
  const std::size_t n = model.lanes.size();
  UnionFind uf(n);
  for (const auto& pair : model.adjacent_pairs) {
    if (pair.adjacency.same_direction) uf.unite(pair.a, pair.b);
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> group_of_root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const int r = uf.find(static_cast<int>(i));
    if (group_of_root[r] < 0) {
      group_of_root[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[group_of_root[r]].push_back(static_cast<int>(i));
  }

  for (auto& members : groups) {
    const LaneModel& ref = model.lanes[members.front()];
    const Vec2 ref_mid = ref.centerline.point_at(0.5 * ref.centerline.length());
    const double ref_h = ref.centerline.heading_at(0.5 * ref.centerline.length());
    const Vec2 dir{std::cos(ref_h), std::sin(ref_h)};
    std::vector<std::pair<double, int>> keyed;
    double sx = 0.0;
    double sy = 0.0;
    std::vector<Vec2> pts;
    for (int m : members) {
      const LaneModel& lane = model.lanes[m];
      const Vec2 mid = lane.centerline.point_at(0.5 * lane.centerline.length());
      keyed.emplace_back(-geom::cross(dir, mid - ref_mid), m);
      const Vec2 chord = lane.centerline.back() - lane.centerline.front();
      const double len = geom::norm(chord);
      sx += chord.x / len;
      sy += chord.y / len;
      pts.insert(pts.end(), lane.polygon.vertices().begin(), lane.polygon.vertices().end());
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> ordered;
    for (const auto& [_, m] : keyed) ordered.push_back(m);
    const std::string id = "roadblock_" + model.lanes[ordered.front()].id;
    RoadBlockRec block{id, ordered, std::atan2(sy, sx), geom::convex_hull(pts)};
    block.node = g.add_node(NodeType::RoadBlock, id);
    add_shape(g, block.node, block.hull, model.geo_origin);
    const int b = static_cast<int>(model.blocks.size());
    for (int m : ordered) {
      model.lanes[m].block = b;
      g.add_edge(EdgeType::isLaneOnRoadBlock, model.lanes[m].node, block.node);
    }
    model.block_grid.insert(static_cast<std::uint32_t>(b), block.hull.bounds());
    model.blocks.push_back(std::move(block));
  }

  for (auto& block : model.blocks) {
    for (int m : block.lanes) {
      for (int next : model.lanes[m].next) {
        const int nb = model.lanes[next].block;
        if (nb == model.lanes[m].block || std::find(block.next.begin(), block.next.end(), nb) != block.next.end()) continue;
        block.next.push_back(nb);
        g.add_edge(EdgeType::hasNextRoadBlock, block.node, model.blocks[nb].node);
      }
    }
  }

  const double min_diff = 180.0 - cfg.opposing_heading_tol_deg;
  for (std::size_t a = 0; a < model.blocks.size(); ++a) {
    auto& A = model.blocks[a];
    for (std::uint32_t bi : model.block_grid.query(A.hull.bounds().inflated(cfg.opposing_distance_m))) {
      if (bi <= a) continue;
      auto& B = model.blocks[bi];
      if (geom::heading_difference(A.heading, B.heading) < min_diff) continue;
      if (!(geom::polygon_distance(A.hull, B.hull) < cfg.opposing_distance_m)) continue;
      const Vec2 axis{std::cos(A.heading), std::sin(A.heading)};
      auto extent = [&](const Polygon& p) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const Vec2& v : p.vertices()) {
          lo = std::min(lo, geom::dot(v, axis));
          hi = std::max(hi, geom::dot(v, axis));
        }
        return std::pair{lo, hi};
      };
      const auto [alo, ahi] = extent(A.hull);
      const auto [blo, bhi] = extent(B.hull);
      if (std::min(ahi, bhi) - std::max(alo, blo) <= cfg.opposing_min_overlap_m) continue;
      A.opposing.push_back(static_cast<int>(bi));
      B.opposing.push_back(static_cast<int>(a));
      g.add_edge(EdgeType::hasOpposingRoadBlock, A.node, B.node);
      g.add_edge(EdgeType::hasOpposingRoadBlock, B.node, A.node);
    }
  }
}

void build_infrastructure(const RawMapBundle& raw, const CompilerConfig& cfg, KnowledgeGraph& g, MapModel& model) {
  auto add_area = [&](const std::string& id, NodeType type, const Polygon& poly) {
    const NodeIndex node = g.add_node(type, id);
    add_shape(g, node, poly, model.geo_origin);
    const int idx = static_cast<int>(model.areas.size());
    model.areas.push_back({id, type, poly, node});
    model.area_index.emplace(id, idx);
    model.area_grid.insert(static_cast<std::uint32_t>(idx), poly.bounds());
    return idx;
  };
  std::vector<int> walkways;
  std::vector<int> crossings;
  std::vector<int> carparks;
  std::vector<int> intersections;
  std::vector<int> stop_areas;
  for (const auto& a : raw.walkways) walkways.push_back(add_area(a.id, NodeType::Walkway, a.polygon));
  for (const auto& a : raw.ped_crossings) crossings.push_back(add_area(a.id, NodeType::PedCrossing, a.polygon));
  for (const auto& a : raw.carpark_areas) carparks.push_back(add_area(a.id, NodeType::CarparkArea, a.polygon));
  for (const auto& a : raw.road_segments) {
    if (a.is_intersection) intersections.push_back(add_area(a.id, NodeType::Intersection, a.polygon));
  }
  for (const auto& s : raw.stop_lines) stop_areas.push_back(add_area(s.id, stop_area_type_for(s.stop_type), s.polygon));

  for (const auto& tl : raw.traffic_lights) {
    const NodeIndex node = g.add_node(NodeType::TrafficLight, tl.id, {{"hasTrafficLightType", std::string(to_string(tl.tl_type))}});
    const NodeIndex pose = g.add_node(NodeType::Pose, tl.id + "#pose", pose_attrs(tl.pose));
    g.add_edge(EdgeType::trafficLightHasPose, node, pose);
  }

  for (const auto& s : raw.stop_lines) {
    if (!s.cause_ref) continue;
    const auto cause = g.find(*s.cause_ref);
    if (!cause) {
      model.warnings.push_back("stop line " + s.id + ": unresolved cause '" + *s.cause_ref + "'");
      continue;
    }
    const auto& domain = signature(EdgeType::causesStopAt).domain;
    const NodeType ct = g.node(*cause).type;
    if (std::none_of(domain.begin(), domain.end(), [&](NodeType t) { return is_a(ct, t); })) {
      model.warnings.push_back("stop line " + s.id + ": " + std::string(to_string(ct)) + " cannot cause a stop");
      continue;
    }
    g.add_edge(EdgeType::causesStopAt, *cause, g.at(s.id));
  }

  for (int c : crossings) {
    const AreaModel& crossing = model.areas[c];
    std::vector<std::pair<double, int>> near;
    for (int w : walkways) {
      const double d = geom::polygon_distance(crossing.polygon, model.areas[w].polygon);
      if (d < cfg.crossing_walkway_m) near.emplace_back(d, w);
    }
    std::stable_sort(near.begin(), near.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    const std::size_t keep = std::min<std::size_t>(near.size(), static_cast<std::size_t>(cfg.max_crossing_walkways));
    for (std::size_t k = 0; k < keep; ++k) g.add_edge(EdgeType::connectsWalkways, crossing.node, model.areas[near[k].second].node);
  }

  auto link_next_to = [&](const std::vector<int>& areas, EdgeType relation) {
    for (int a : areas) {
      const AreaModel& area = model.areas[a];
      for (std::uint32_t l : model.lane_grid.query(area.polygon.bounds().inflated(cfg.is_next_to_m))) {
        if (geom::polygon_distance(area.polygon, model.lanes[l].polygon) < cfg.is_next_to_m) {
          g.add_edge(relation, area.node, model.lanes[l].node);
        }
      }
    }
  };
  link_next_to(walkways, EdgeType::walkwayIsNextTo);
  link_next_to(carparks, EdgeType::carparkIsNextTo);

  for (int x : intersections) {
    const AreaModel& inter = model.areas[x];
    for (std::uint32_t c : model.connector_grid.query(inter.polygon.bounds().inflated(cfg.connector_buffer_m))) {
      ConnectorModel& conn = model.connectors[c];
      if (geom::buffered_polyline_overlaps(conn.centerline, cfg.connector_buffer_m, inter.polygon)) {
        conn.intersections.push_back(x);
        g.add_edge(EdgeType::isConnectorOnRoadSegment, conn.node, inter.node);
      }
    }
  }
  for (std::size_t a = 0; a < model.connectors.size(); ++a) {
    auto& A = model.connectors[a];
    for (std::size_t b = a + 1; b < model.connectors.size(); ++b) {
      auto& B = model.connectors[b];
      if (A.incoming == B.incoming) continue;
      const bool shared = std::any_of(A.intersections.begin(), A.intersections.end(), [&](int x) {
        return std::find(B.intersections.begin(), B.intersections.end(), x) != B.intersections.end();
      });
      if (!shared || geom::polyline_distance(A.centerline, B.centerline) >= 2.0 * cfg.connector_buffer_m) continue;
      A.conflicts.push_back(static_cast<int>(b));
      B.conflicts.push_back(static_cast<int>(a));
    }
  }

  std::vector<int> overlap_candidates = stop_areas;
  overlap_candidates.insert(overlap_candidates.end(), crossings.begin(), crossings.end());
  for (int a : overlap_candidates) {
    const AreaModel& area = model.areas[a];
    for (std::uint32_t l : model.lane_grid.query(area.polygon.bounds())) {
      if (geom::polygons_overlap(area.polygon, model.lanes[l].polygon)) model.lanes[l].overlapping_areas.push_back(a);
    }
  }
  for (auto& lane : model.lanes) std::sort(lane.overlapping_areas.begin(), lane.overlapping_areas.end());
}

MapModel compile_map(const RawMapBundle& raw, const CompilerConfig& cfg, KnowledgeGraph& g, unsigned jobs) {
  MapModel model;
  build_lane_graph(raw, cfg, g, model, jobs);
  link_switch_via(cfg, g, model);
  build_road_blocks(cfg, g, model);
  build_infrastructure(raw, cfg, g, model);
  for (const auto& w : raw.warnings) model.warnings.push_back(w);
  for (const auto& w : model.warnings) log::warn(w);
  return model;
}

}  // namespace scenekg
