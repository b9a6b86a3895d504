#include "scenekg/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "scenekg/geometry.hpp"
#include "scenekg/scene_ir.hpp"

namespace scenekg {
namespace {

using geom::Vec2;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

// SVG has y pointing down; world y points up.
std::string pt(Vec2 p) { return num(p.x) + "," + num(-p.y); }

std::string path_d(const std::vector<Vec2>& pts, bool closed) {
  std::string d;
  for (std::size_t i = 0; i < pts.size(); ++i) d += (i == 0 ? "M" : " L") + pt(pts[i]);
  if (closed && !pts.empty()) d += " Z";
  return d;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* divider_color(std::string_view name) {
  const auto d = divider_from_string(name);
  if (!d) return "#888888";
  switch (*d) {
    case DividerType::NoMarking: return "#bbbbbb";
    case DividerType::SingleDashed: return "#2b8cbe";
    case DividerType::DoubleDashed: return "#7bccc4";
    case DividerType::SingleSolid: return "#fdae61";
    case DividerType::DoubleSolid: return "#d7191c";
    case DividerType::SolidDashed: return "#a6611a";
    case DividerType::DashedSolid: return "#dfc27d";
    case DividerType::RoadEdge: return "#222222";
  }
  return "#888888";
}

std::vector<Vec2> oriented_rect(Vec2 c, double yaw, double length, double width) {
  const Vec2 f{std::cos(yaw) * 0.5 * length, std::sin(yaw) * 0.5 * length};
  const Vec2 l{-std::sin(yaw) * 0.5 * width, std::cos(yaw) * 0.5 * width};
  return {c + f + l, c - f + l, c - f - l, c + f - l};
}

class SvgWriter {
 public:
  void add(std::string element, const std::vector<Vec2>& pts) {
    for (const Vec2& p : pts) box_.extend(p);
    any_ = any_ || !pts.empty();
    body_.push_back(std::move(element));
  }
  void group(const std::string& name) { body_.push_back("<g id=\"" + name + "\">"); }
  void end_group() { body_.push_back("</g>"); }

  std::string finish() const {
    std::ostringstream out;
    double x0 = 0, y0 = 0, w = 100, h = 100;
    if (any_) {
      x0 = box_.min.x - 5;
      y0 = -box_.max.y - 5;
      w = box_.max.x - box_.min.x + 10;
      h = box_.max.y - box_.min.y + 10;
    }
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(x0) << " " << num(y0) << " " << num(w) << " "
        << num(h) << "\">\n";
    out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
        << "\" fill=\"#ffffff\"/>\n";
    for (const auto& e : body_) out << e << "\n";
    out << "</svg>\n";
    return out.str();
  }

 private:
  geom::BoundingBox box_;
  bool any_ = false;
  std::vector<std::string> body_;
};

std::optional<std::vector<Vec2>> shape_ring(const KnowledgeGraph& g, NodeIndex n) {
  for (NodeIndex s : g.neighbors(n, EdgeType::hasShape, Direction::Out)) {
    if (g.node(s).type != NodeType::Polygon) continue;
    const auto* wkt = g.attr(s, "wkt");
    if (wkt == nullptr || !std::holds_alternative<WktLiteral>(*wkt)) continue;
    const geom::Polygon poly = geom::polygon_from_wkt(std::get<WktLiteral>(*wkt).text);
    return std::vector<Vec2>(poly.vertices().begin(), poly.vertices().end());
  }
  return std::nullopt;
}

std::string str_attr(const KnowledgeGraph& g, NodeIndex n, std::string_view name) {
  const auto* v = g.attr(n, name);
  return v != nullptr && std::holds_alternative<std::string>(*v) ? std::get<std::string>(*v) : std::string();
}

Vec2 xy(const KnowledgeGraph& g, NodeIndex n) { return {g.number_attr(n, "x"), g.number_attr(n, "y")}; }

/// Positions of `owner`'s members in the order given by the `next` chain.
std::vector<Vec2> chain_points(const KnowledgeGraph& g, NodeIndex owner, EdgeType member, EdgeType next) {
  const auto nodes = g.neighbors(owner, member, Direction::Out);
  const std::set<NodeIndex> members(nodes.begin(), nodes.end());
  auto member_step = [&](NodeIndex n, Direction dir) -> std::optional<NodeIndex> {
    for (NodeIndex m : g.neighbors(n, next, dir)) {
      if (members.count(m)) return m;
    }
    return std::nullopt;
  };
  std::vector<Vec2> pts;
  for (NodeIndex n : nodes) {
    if (member_step(n, Direction::In)) continue;
    for (std::optional<NodeIndex> cur = n; cur && pts.size() < nodes.size(); cur = member_step(*cur, Direction::Out)) {
      pts.push_back(xy(g, *cur));
    }
    break;
  }
  return pts;
}

std::vector<NodeIndex> of_type(const KnowledgeGraph& g, NodeType t) {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (is_a(g.node(i).type, t)) out.push_back(i);
  }
  std::sort(out.begin(), out.end(), [&](NodeIndex a, NodeIndex b) { return g.node(a).id < g.node(b).id; });
  return out;
}

void draw_areas(const KnowledgeGraph& g, SvgWriter& svg, NodeType type, const char* cls, const char* fill) {
  svg.group(cls);
  for (NodeIndex n : of_type(g, type)) {
    const auto ring = shape_ring(g, n);
    if (!ring) continue;
    svg.add("<path class=\"" + std::string(cls) + "\" data-id=\"" + escape(g.node(n).id) + "\" d=\"" + path_d(*ring, true) +
                "\" fill=\"" + fill + "\" stroke=\"#555555\" stroke-width=\"0.1\"/>",
            *ring);
  }
  svg.end_group();
}

}  // namespace

std::string render_graph_svg(const KnowledgeGraph& g, std::optional<std::string_view> scene) {
  std::optional<NodeIndex> scene_node;
  if (scene) {
    scene_node = g.find(*scene);
    if (!scene_node || g.node(*scene_node).type != NodeType::Scene) {
      throw RenderError("unknown scene '" + std::string(*scene) + "'");
    }
  }
  SvgWriter svg;
  draw_areas(g, svg, NodeType::CarparkArea, "carpark", "#e5e0d0");
  draw_areas(g, svg, NodeType::Walkway, "walkway", "#d9d9d9");
  draw_areas(g, svg, NodeType::Intersection, "intersection", "#f0f0f0");
  draw_areas(g, svg, NodeType::Lane, "lane", "#f7f7f7");

  svg.group("snippets");
  for (NodeIndex n : of_type(g, NodeType::LaneSnippet)) {
    const auto ring = shape_ring(g, n);
    if (!ring) continue;
    const std::string left = str_attr(g, n, "leftDivider");
    const std::string right = str_attr(g, n, "rightDivider");
    svg.add("<path class=\"snippet\" data-id=\"" + escape(g.node(n).id) + "\" data-left=\"" + escape(left) +
                "\" data-right=\"" + escape(right) + "\" d=\"" + path_d(*ring, true) + "\" fill=\"none\" stroke=\"" +
                divider_color(left) + "\" stroke-width=\"0.15\"/>",
            *ring);
  }
  svg.end_group();

  draw_areas(g, svg, NodeType::PedCrossing, "crossing", "#fff3b0");
  draw_areas(g, svg, NodeType::StopArea, "stop-area", "#fcbba1");

  svg.group("centerlines");
  for (NodeIndex n : of_type(g, NodeType::Lane)) {
    const auto pts = chain_points(g, n, EdgeType::laneHasSlice, EdgeType::hasNextLaneSlice);
    if (pts.size() < 2) continue;
    svg.add("<path class=\"centerline\" data-id=\"" + escape(g.node(n).id) + "\" d=\"" + path_d(pts, false) +
                "\" fill=\"none\" stroke=\"#4d4d4d\" stroke-width=\"0.1\" stroke-dasharray=\"0.5,0.5\"/>",
            pts);
  }
  for (NodeIndex n : of_type(g, NodeType::LaneConnector)) {
    const auto pts = chain_points(g, n, EdgeType::connectorHasPose, EdgeType::hasNextPose);
    if (pts.size() < 2) continue;
    svg.add("<path class=\"connector\" data-id=\"" + escape(g.node(n).id) + "\" d=\"" + path_d(pts, false) +
                "\" fill=\"none\" stroke=\"#9e9ac8\" stroke-width=\"0.1\"/>",
            pts);
  }
  svg.end_group();

  svg.group("traffic-lights");
  for (NodeIndex n : of_type(g, NodeType::TrafficLight)) {
    for (NodeIndex p : g.neighbors(n, EdgeType::trafficLightHasPose, Direction::Out)) {
      const Vec2 c = xy(g, p);
      svg.add("<circle class=\"traffic-light\" data-id=\"" + escape(g.node(n).id) + "\" cx=\"" + num(c.x) + "\" cy=\"" +
                  num(-c.y) + "\" r=\"0.6\" fill=\"#31a354\"/>",
              {c});
    }
  }
  svg.end_group();

  if (scene_node) {
    std::vector<NodeIndex> sps = g.neighbors(*scene_node, EdgeType::hasSceneParticipant, Direction::Out);
    std::sort(sps.begin(), sps.end(), [&](NodeIndex a, NodeIndex b) { return g.node(a).id < g.node(b).id; });
    svg.group("relations");
    static constexpr std::pair<EdgeType, const char*> kRelations[] = {
        {EdgeType::longitudinal, "#1f78b4"}, {EdgeType::lateral, "#33a02c"}, {EdgeType::intersecting, "#e31a1c"}};
    for (NodeIndex a : sps) {
      for (const auto& [type, color] : kRelations) {
        auto targets = g.neighbors(a, type, Direction::Out);
        std::sort(targets.begin(), targets.end(), [&](NodeIndex x, NodeIndex y) { return g.node(x).id < g.node(y).id; });
        for (NodeIndex b : targets) {
          const Vec2 p = xy(g, a);
          const Vec2 q = xy(g, b);
          const Vec2 mid = (p + q) * 0.5 + geom::left_normal(q - p) * 0.2;
          svg.add("<path class=\"relation " + std::string(to_string(type)) + "\" d=\"M" + pt(p) + " Q" + pt(mid) + " " + pt(q) +
                      "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"0.15\"/>",
                  {p, q});
        }
      }
    }
    svg.end_group();
    svg.group("agents");
    for (NodeIndex sp : sps) {
      const auto owner = g.neighbors(sp, EdgeType::isSceneParticipantOf, Direction::Out);
      double length = 1.0, width = 1.0;
      if (!owner.empty()) {
        length = g.number_attr(owner.front(), "length");
        width = g.number_attr(owner.front(), "width");
      }
      const auto* ego = g.attr(sp, "is_ego");
      const bool is_ego = ego != nullptr && std::holds_alternative<bool>(*ego) && std::get<bool>(*ego);
      const auto rect = oriented_rect(xy(g, sp), g.number_attr(sp, "yaw"), length, width);
      svg.add("<path class=\"agent" + std::string(is_ego ? " ego" : "") + "\" data-id=\"" + escape(g.node(sp).id) +
                  "\" d=\"" + path_d(rect, true) + "\" fill=\"" + (is_ego ? "#6a3d9a" : "#ff7f00") +
                  "\" fill-opacity=\"0.8\" stroke=\"#000000\" stroke-width=\"0.05\"/>",
              rect);
    }
    svg.end_group();
  }
  return svg.finish();
}

std::string render_example_svg(const HetGraphExample& ex) {
  // Local-frame position of every row that has one.
  std::map<std::string, std::vector<std::optional<Vec2>>> pos;
  for (const auto& t : ex.tables) {
    auto col = [&](std::string_view name) -> std::optional<std::size_t> {
      for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (t.columns[c] == name) return c;
      }
      return std::nullopt;
    };
    std::optional<std::size_t> cx, cy;
    for (const auto& [xn, yn] : {std::pair{"x_local", "y_local"}, std::pair{"x", "y"}, std::pair{"centroid_x", "centroid_y"}}) {
      if (!cx && col(xn) && col(yn)) {
        cx = col(xn);
        cy = col(yn);
      }
    }
    auto& rows = pos[t.name];
    rows.assign(t.rows(), std::nullopt);
    if (!cx) continue;
    for (std::size_t r = 0; r < t.rows(); ++r) rows[r] = Vec2{t.at(r, *cx), t.at(r, *cy)};
  }
  SvgWriter svg;
  svg.group("edges");
  for (const auto& e : ex.edges) {
    const auto& src = pos[e.src_table];
    const auto& dst = pos[e.dst_table];
    for (const auto& [a, b] : e.pairs) {
      if (a >= src.size() || b >= dst.size() || !src[a] || !dst[b]) continue;
      svg.add("<line class=\"edge " + escape(e.relation) + "\" x1=\"" + num(src[a]->x) + "\" y1=\"" + num(-src[a]->y) +
                  "\" x2=\"" + num(dst[b]->x) + "\" y2=\"" + num(-dst[b]->y) + "\" stroke=\"#bdbdbd\" stroke-width=\"0.05\"/>",
              {*src[a], *dst[b]});
    }
  }
  svg.end_group();
  svg.group("nodes");
  for (const auto& t : ex.tables) {
    const auto& rows = pos[t.name];
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r]) continue;
      const bool target = t.name == ex.target_table && r == ex.target_row;
      svg.add("<circle class=\"node " + escape(t.name) + (target ? " target" : "") + "\" data-id=\"" + escape(t.node_ids[r]) +
                  "\" cx=\"" + num(rows[r]->x) + "\" cy=\"" + num(-rows[r]->y) + "\" r=\"" + (target ? "0.8" : "0.3") +
                  "\" fill=\"" + (target ? "#e31a1c" : "#3182bd") + "\"/>",
              {*rows[r]});
    }
  }
  svg.end_group();
  std::vector<Vec2> future{{0, 0}};
  for (const auto& p : ex.y) future.push_back({p[0], p[1]});
  if (future.size() > 1) {
    svg.add("<path class=\"future\" d=\"" + path_d(future, false) + "\" fill=\"none\" stroke=\"#e31a1c\" stroke-width=\"0.2\"/>",
            future);
  }
  return svg.finish();
}

}  // namespace scenekg
