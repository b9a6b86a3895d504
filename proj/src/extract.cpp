#include "scenekg/extract.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "scenekg/log.hpp"
#include "scenekg/parallel.hpp"

namespace scenekg {
namespace {

using CK = ColumnKind;

std::vector<ColumnSpec> polygon_columns() {
  return {{"centroid_x", "m", CK::PosX}, {"centroid_y", "m", CK::PosY}, {"area", "m2", CK::Scalar}};
}

std::vector<TableSchema> make_schema() {
  return {
      {"CarparkArea", polygon_columns()},
      {"Intersection", polygon_columns()},
      {"Lane", polygon_columns()},
      {"LaneConnector",
       {{"start_x", "m", CK::PosX},
        {"start_y", "m", CK::PosY},
        {"end_x", "m", CK::PosX},
        {"end_y", "m", CK::PosY},
        {"length", "m", CK::Scalar}}},
      {"LaneSlice", {{"x", "m", CK::PosX}, {"y", "m", CK::PosY}, {"yaw", "rad", CK::Yaw}, {"width", "m", CK::Scalar}}},
      {"LaneSnippet",
       {{"length", "m", CK::Scalar},
        {"left_divider_index", "index", CK::Scalar},
        {"right_divider_index", "index", CK::Scalar}}},
      {"OrderedPose", {{"x", "m", CK::PosX}, {"y", "m", CK::PosY}, {"yaw", "rad", CK::Yaw}}},
      {"Participant",
       {{"category_index", "index", CK::Scalar},
        {"length", "m", CK::Scalar},
        {"width", "m", CK::Scalar},
        {"height", "m", CK::Scalar}}},
      {"PedCrossing", polygon_columns()},
      {"RoadBlock", polygon_columns()},
      {"Scene", {{"time_offset", "s", CK::TimeOffset}}},
      {"SceneParticipant",
       {{"x_local", "m", CK::PosX},
        {"y_local", "m", CK::PosY},
        {"yaw_local", "rad", CK::Yaw},
        {"speed", "m/s", CK::Scalar},
        {"time_offset", "s", CK::TimeOffset},
        {"is_ego", "0/1", CK::Scalar}}},
      {"Sequence", {{"history_span", "s", CK::Scalar}}},
      {"StopArea",
       {{"subtype_index", "index", CK::Scalar},
        {"centroid_x", "m", CK::PosX},
        {"centroid_y", "m", CK::PosY},
        {"area", "m2", CK::Scalar}}},
      {"TrafficLight",
       {{"x", "m", CK::PosX}, {"y", "m", CK::PosY}, {"yaw", "rad", CK::Yaw}, {"tl_type_index", "index", CK::Scalar}}},
      {"Walkway", polygon_columns()},
  };
}

std::uint64_t sp_key(NodeIndex participant, NodeIndex scene) {
  return (static_cast<std::uint64_t>(participant) << 32) | scene;
}

double point_polygon_distance(Vec2 p, const geom::Polygon& poly) {
  if (geom::point_in_polygon(p, poly)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, geom::point_segment_distance(p, poly.vertex(i), poly.vertex(i + 1)));
  }
  return best;
}

bool is_drivable(NodeType t) {
  return t == NodeType::Lane || t == NodeType::LaneSnippet || t == NodeType::RoadBlock || t == NodeType::Intersection;
}

}  // namespace

const std::vector<TableSchema>& feature_schema() {
  static const std::vector<TableSchema> schema = make_schema();
  return schema;
}

const TableSchema* find_table_schema(std::string_view table) {
  for (const auto& s : feature_schema()) {
    if (s.table == table) return &s;
  }
  return nullptr;
}

std::optional<std::string> table_for(NodeType t) {
  if (is_a(t, NodeType::Participant)) return "Participant";
  if (is_a(t, NodeType::StopArea)) return "StopArea";
  if (find_table_schema(to_string(t)) != nullptr) return std::string(to_string(t));
  return std::nullopt;
}

const NodeTable* HetGraphExample::table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::size_t HetGraphExample::node_count() const {
  std::size_t n = 0;
  for (const auto& t : tables) n += t.rows();
  return n;
}

std::size_t HetGraphExample::edge_count() const {
  std::size_t n = 0;
  for (const auto& e : edges) n += e.pairs.size();
  return n;
}

HetGraphExample HetGraphExample::quantized() const {
  HetGraphExample q = *this;
  for (auto& t : q.tables) {
    for (double& v : t.data) v = static_cast<double>(static_cast<float>(v));
  }
  return q;
}

Extractor::Extractor(const KnowledgeGraph& g, const CompilerConfig& cfg) : g_(g), cfg_(cfg) {
  const std::size_t n = g.node_count();
  shapes_.resize(n);
  raw_rows_.resize(n);

  auto ts = [&](NodeIndex scene) { return static_cast<double>(std::get<std::int64_t>(*g.attr(scene, "hasTimestamp"))); };
  auto str = [&](NodeIndex node, std::string_view name) -> std::string {
    const AttrValue* v = g.attr(node, name);
    return v && std::holds_alternative<std::string>(*v) ? std::get<std::string>(*v) : std::string();
  };
  auto flag = [&](NodeIndex node, std::string_view name) {
    const AttrValue* v = g.attr(node, name);
    return v && std::holds_alternative<bool>(*v) && std::get<bool>(*v);
  };

  for (NodeIndex i = 0; i < n; ++i) {
    if (!is_a(g.node(i).type, NodeType::AreaElement)) continue;
    for (NodeIndex s : g.neighbors(i, EdgeType::hasShape, Direction::Out)) {
      const AttrValue* w = g.attr(s, "wkt");
      if (g.node(s).type == NodeType::Polygon && w && std::holds_alternative<WktLiteral>(*w)) {
        shapes_[i] = geom::polygon_from_wkt(std::get<WktLiteral>(*w).text);
      }
    }
  }

  for (NodeIndex i = 0; i < n; ++i) {
    const Node& node = g.node(i);
    const NodeType t = node.type;
    auto& row = raw_rows_[i];
    auto num = [&](std::string_view name) { return g.number_attr(i, name); };
    switch (t) {
      case NodeType::Sequence: {
        std::vector<std::pair<std::int64_t, NodeIndex>> scenes;
        for (NodeIndex s : g.neighbors(i, EdgeType::hasScene, Direction::Out)) {
          scenes.emplace_back(std::get<std::int64_t>(*g.attr(s, "hasTimestamp")), s);
        }
        std::sort(scenes.begin(), scenes.end());
        SequenceInfo info{i, {}, {}};
        for (const auto& [stamp, s] : scenes) {
          info.scenes.push_back(s);
          info.timestamps.push_back(stamp);
        }
        sequences_.emplace(node.id, std::move(info));
        row = {0.0};
        break;
      }
      case NodeType::SceneParticipant: {
        const auto scene = g.neighbors(i, EdgeType::hasSceneParticipant, Direction::In);
        const auto part = g.neighbors(i, EdgeType::isSceneParticipantOf, Direction::Out);
        if (scene.size() != 1 || part.size() != 1) throw ExtractError("scene participant " + node.id + " is not anchored");
        sp_index_[sp_key(part[0], scene[0])] = i;
        const AttrValue* speed = g.attr(i, "speed");
        row = {num("x"), num("y"), num("yaw"), speed ? num("speed") : 0.0, ts(scene[0]), flag(i, "is_ego") ? 1.0 : 0.0};
        break;
      }
      case NodeType::Scene: row = {ts(i)}; break;
      case NodeType::LaneSlice: row = {num("x"), num("y"), num("poseHasOrientation"), num("laneSliceHasWidth")}; break;
      case NodeType::OrderedPose: row = {num("x"), num("y"), num("poseHasOrientation")}; break;
      case NodeType::LaneSnippet: {
        auto divider = [&](std::string_view name) {
          const auto d = divider_from_string(str(i, name));
          return d ? static_cast<double>(*d) : -1.0;
        };
        row = {num("snippetHasLength"), divider("leftDivider"), divider("rightDivider")};
        break;
      }
      case NodeType::TrafficLight: {
        const auto poses = g.neighbors(i, EdgeType::trafficLightHasPose, Direction::Out);
        if (poses.empty()) throw ExtractError("traffic light " + node.id + " has no pose");
        const NodeIndex p = poses.front();
        row = {g.number_attr(p, "x"), g.number_attr(p, "y"), g.number_attr(p, "poseHasOrientation"),
               str(i, "hasTrafficLightType") == "V" ? 1.0 : 0.0};
        break;
      }
      case NodeType::LaneConnector: {
        const auto poses = g.neighbors(i, EdgeType::connectorHasPose, Direction::Out);
        std::optional<NodeIndex> first;
        std::optional<NodeIndex> last;
        for (NodeIndex p : poses) {
          if (g.degree(p, EdgeType::hasNextPose, Direction::In) == 0) first = p;
          if (g.degree(p, EdgeType::hasNextPose, Direction::Out) == 0) last = p;
        }
        if (!first || !last) throw ExtractError("connector " + node.id + " has no ordered poses");
        row = {g.number_attr(*first, "x"), g.number_attr(*first, "y"), g.number_attr(*last, "x"),
               g.number_attr(*last, "y"), num("length")};
        break;
      }
      default:
        if (is_a(t, NodeType::Participant)) {
          const auto c = category_for(t);
          row = {c ? static_cast<double>(*c) : -1.0, num("length"), num("width"), num("height")};
        } else if (is_a(t, NodeType::AreaElement) && table_for(t)) {
          if (!shapes_[i]) throw ExtractError(std::string(to_string(t)) + " " + node.id + " has no polygon shape");
          const Vec2 c = shapes_[i]->centroid();
          if (is_a(t, NodeType::StopArea)) {
            row = {static_cast<double>(static_cast<int>(t) - static_cast<int>(NodeType::PedCrossingStopArea)), c.x, c.y,
                   shapes_[i]->area()};
          } else {
            row = {c.x, c.y, shapes_[i]->area()};
          }
        }
        break;
    }
    if (t == NodeType::RoadBlock) blocks_.push_back(i);
  }

  geom::SpatialGrid grid;
  std::vector<NodeIndex> lanes;
  for (NodeIndex i = 0; i < n; ++i) {
    if (g.node(i).type == NodeType::Lane && shapes_[i]) {
      grid.insert(static_cast<std::uint32_t>(lanes.size()), shapes_[i]->bounds());
      lanes.push_back(i);
    }
  }
  for (NodeIndex i = 0; i < n; ++i) {
    const NodeType t = g.node(i).type;
    if (!(is_a(t, NodeType::StopArea) || t == NodeType::PedCrossing) || !shapes_[i]) continue;
    for (std::uint32_t k : grid.query(shapes_[i]->bounds())) {
      if (geom::polygons_overlap(*shapes_[i], *shapes_[lanes[k]])) lane_overlaps_[lanes[k]].push_back(i);
    }
  }
}

std::vector<std::string> Extractor::sequences() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : sequences_) out.push_back(id);
  return out;
}

const Extractor::SequenceInfo& Extractor::sequence_info(std::string_view id) const {
  const auto it = sequences_.find(id);
  if (it == sequences_.end()) throw ExtractError("unknown sequence " + std::string(id));
  return it->second;
}

std::optional<NodeIndex> Extractor::sp_of(NodeIndex participant, NodeIndex scene) const {
  const auto it = sp_index_.find(sp_key(participant, scene));
  if (it == sp_index_.end()) return std::nullopt;
  return it->second;
}

bool Extractor::drivable_at(NodeIndex sp) const {
  for (NodeIndex e : g_.neighbors(sp, EdgeType::isOn, Direction::Out)) {
    if (is_drivable(g_.node(e).type)) return true;
  }
  return false;
}

std::vector<TargetSpec> Extractor::select_targets(std::string_view sequence) const {
  const SequenceInfo& info = sequence_info(sequence);
  const int n = static_cast<int>(info.scenes.size());
  const int hist = cfg_.history_scenes;
  const int fut = cfg_.future_steps;

  std::set<NodeIndex> candidates;
  for (NodeIndex scene : info.scenes) {
    for (NodeIndex sp : g_.neighbors(scene, EdgeType::hasSceneParticipant, Direction::Out)) {
      const NodeIndex p = g_.neighbors(sp, EdgeType::isSceneParticipantOf, Direction::Out).front();
      const auto cat = category_for(g_.node(p).type);
      const AttrValue* ego = g_.attr(p, "is_ego");
      const bool is_ego = ego && std::holds_alternative<bool>(*ego) && std::get<bool>(*ego);
      if (cat && is_vehicle(*cat) && !is_ego) candidates.insert(p);
    }
  }
  std::vector<bool> gap_ok(n > 0 ? n - 1 : 0);
  for (int k = 0; k + 1 < n; ++k) {
    const double dt = 1e-6 * static_cast<double>(info.timestamps[k + 1] - info.timestamps[k]);
    gap_ok[k] = std::abs(dt - cfg_.scene_step_s) <= cfg_.scene_step_tolerance_s + 1e-12;
  }

  std::vector<TargetSpec> out;
  for (NodeIndex p : candidates) {
    for (int a = hist - 1; a + fut < n; ++a) {
      bool ok = true;
      for (int k = a - hist + 1; k <= a + fut && ok; ++k) {
        ok = sp_of(p, info.scenes[k]).has_value() && (k == a + fut || gap_ok[k]);
      }
      if (!ok || !drivable_at(*sp_of(p, info.scenes[a]))) continue;
      out.push_back({g_.node(p).id, std::string(sequence), g_.node(info.scenes[a]).id, a});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const TargetSpec& x, const TargetSpec& y) {
    return std::tie(x.participant, x.anchor_index) < std::tie(y.participant, y.anchor_index);
  });
  return out;
}

std::vector<TargetSpec> Extractor::select_all_targets() const {
  std::vector<TargetSpec> out;
  for (const auto& [id, _] : sequences_) {
    auto t = select_targets(id);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

FrameWindow Extractor::window(const TargetSpec& t) const {
  const SequenceInfo& info = sequence_info(t.sequence);
  const int n = static_cast<int>(info.scenes.size());
  const int a = t.anchor_index;
  if (a - cfg_.history_scenes + 1 < 0 || a + cfg_.future_steps >= n) {
    throw ExtractError("anchor " + t.anchor_scene + " leaves no room for the observation window");
  }
  FrameWindow w;
  for (int k = a - cfg_.history_scenes + 1; k <= a; ++k) w.history.push_back(info.scenes[k]);
  for (int k = a + 1; k <= a + cfg_.future_steps; ++k) w.future.push_back(info.scenes[k]);
  return w;
}

NodeIndex Extractor::seed_block(const TargetSpec& t, const FrameWindow& w, std::vector<std::string>* warnings) const {
  const NodeIndex participant = g_.at(t.participant);
  for (auto it = w.history.rbegin(); it != w.history.rend(); ++it) {
    const auto sp = sp_of(participant, *it);
    if (!sp) continue;
    std::optional<NodeIndex> best;
    for (NodeIndex e : g_.neighbors(*sp, EdgeType::isOn, Direction::Out)) {
      if (g_.node(e).type == NodeType::RoadBlock && (!best || g_.node(e).id < g_.node(*best).id)) best = e;
    }
    if (best) return *best;
  }
  const auto sp = sp_of(participant, w.history.back());
  if (!sp) throw ExtractError("target " + t.participant + " is absent at " + t.anchor_scene);
  const Vec2 p{g_.number_attr(*sp, "x"), g_.number_attr(*sp, "y")};
  std::optional<std::pair<double, NodeIndex>> nearest;
  for (NodeIndex b : blocks_) {
    if (!shapes_[b]) continue;
    const double d = point_polygon_distance(p, *shapes_[b]);
    if (!nearest || d < nearest->first) nearest = {d, b};
  }
  if (!nearest) throw ExtractError("no road block to seed the map around " + t.participant);
  const std::string msg = "target " + t.participant + " at " + t.anchor_scene + " is on no road block; seeding from " +
                          g_.node(nearest->second).id;
  log::warn(msg);
  if (warnings) warnings->push_back(msg);
  return nearest->second;
}

std::vector<NodeIndex> Extractor::map_around(NodeIndex seed) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (const auto it = map_cache_.find(seed); it != map_cache_.end()) return *it->second;
  }
  std::set<NodeIndex> out;
  std::map<NodeIndex, int> depth{{seed, 0}};
  std::deque<NodeIndex> queue{seed};
  while (!queue.empty()) {
    const NodeIndex b = queue.front();
    queue.pop_front();
    if (depth[b] == cfg_.road_block_hops) continue;
    for (NodeIndex next : g_.neighbors(b, EdgeType::hasNextRoadBlock, Direction::Out)) {
      if (depth.emplace(next, depth[b] + 1).second) queue.push_back(next);
    }
  }
  std::set<NodeIndex> lanes;
  for (const auto& [b, _] : depth) {
    out.insert(b);
    for (NodeIndex o : g_.neighbors(b, EdgeType::hasOpposingRoadBlock, Direction::Out)) out.insert(o);
    for (NodeIndex l : g_.neighbors(b, EdgeType::isLaneOnRoadBlock, Direction::In)) lanes.insert(l);
  }
  auto add_all = [&](NodeIndex n, EdgeType e, Direction d) {
    for (NodeIndex m : g_.neighbors(n, e, d)) out.insert(m);
  };
  for (NodeIndex l : lanes) {
    out.insert(l);
    add_all(l, EdgeType::hasLaneSnippet, Direction::Out);
    add_all(l, EdgeType::laneHasSlice, Direction::Out);
    add_all(l, EdgeType::walkwayIsNextTo, Direction::In);
    add_all(l, EdgeType::carparkIsNextTo, Direction::In);
    for (NodeIndex c : g_.neighbors(l, EdgeType::hasIncomingLane, Direction::In)) {
      const auto outgoing = g_.neighbors(c, EdgeType::hasOutgoingLane, Direction::Out);
      if (outgoing.empty() || !lanes.count(outgoing.front())) continue;
      out.insert(c);
      add_all(c, EdgeType::connectorHasPose, Direction::Out);
      add_all(c, EdgeType::isConnectorOnRoadSegment, Direction::Out);
    }
    if (const auto it = lane_overlaps_.find(l); it != lane_overlaps_.end()) {
      for (NodeIndex a : it->second) {
        out.insert(a);
        for (NodeIndex cause : g_.neighbors(a, EdgeType::causesStopAt, Direction::In)) {
          const NodeType ct = g_.node(cause).type;
          if (ct == NodeType::TrafficLight || ct == NodeType::PedCrossing) out.insert(cause);
        }
      }
    }
  }
  auto result = std::make_shared<const std::vector<NodeIndex>>(out.begin(), out.end());
  std::lock_guard lock(cache_mutex_);
  map_cache_.emplace(seed, result);
  return *result;
}

std::vector<NodeIndex> Extractor::extract_map_subgraph(const TargetSpec& t, std::vector<std::string>* warnings) const {
  return map_around(seed_block(t, window(t), warnings));
}

std::vector<NodeIndex> Extractor::extract_history(const TargetSpec& t, const std::vector<NodeIndex>& map_nodes) const {
  const FrameWindow w = window(t);
  const NodeIndex target = g_.at(t.participant);
  std::set<NodeIndex> out{sequence_info(t.sequence).node};
  for (NodeIndex scene : w.history) {
    out.insert(scene);
    for (NodeIndex sp : g_.neighbors(scene, EdgeType::hasSceneParticipant, Direction::Out)) {
      const NodeIndex p = g_.neighbors(sp, EdgeType::isSceneParticipantOf, Direction::Out).front();
      const AttrValue* ego = g_.attr(sp, "is_ego");
      bool keep = p == target || (ego && std::holds_alternative<bool>(*ego) && std::get<bool>(*ego));
      if (!keep) {
        for (NodeIndex e : g_.neighbors(sp, EdgeType::isOn, Direction::Out)) {
          if (std::binary_search(map_nodes.begin(), map_nodes.end(), e)) {
            keep = true;
            break;
          }
        }
      }
      if (keep) {
        out.insert(sp);
        out.insert(p);
      }
    }
  }
  return {out.begin(), out.end()};
}

HetGraphExample Extractor::build_example(const TargetSpec& t, std::vector<std::string>* warnings) const {
  const FrameWindow w = window(t);
  const NodeIndex participant = g_.at(t.participant);
  const auto target_sp = sp_of(participant, w.history.back());
  if (!target_sp) throw ExtractError("target " + t.participant + " is absent at " + t.anchor_scene);
  std::vector<Vec2> future;
  for (NodeIndex scene : w.future) {
    const auto sp = sp_of(participant, scene);
    if (!sp) throw ExtractError("target " + t.participant + " is absent from future scene " + g_.node(scene).id);
    future.push_back({g_.number_attr(*sp, "x"), g_.number_attr(*sp, "y")});
  }

  const auto map_nodes = map_around(seed_block(t, w, warnings));
  const auto history = extract_history(t, map_nodes);
  std::vector<NodeIndex> nodes;
  std::set_union(map_nodes.begin(), map_nodes.end(), history.begin(), history.end(), std::back_inserter(nodes));

  const geom::RigidFrame frame({g_.number_attr(*target_sp, "x"), g_.number_attr(*target_sp, "y")},
                               g_.number_attr(*target_sp, "yaw"));
  const double t0 = raw_rows_[*target_sp][4];
  const double span = 1e-6 * (t0 - raw_rows_[w.history.front()][0]);

  std::map<std::string, std::vector<NodeIndex>> grouped;
  for (NodeIndex n : nodes) {
    if (auto table = table_for(g_.node(n).type)) grouped[*table].push_back(n);
  }
  HetGraphExample ex;
  ex.sequence = t.sequence;
  ex.participant = t.participant;
  ex.anchor_scene = t.anchor_scene;
  ex.anchor_index = t.anchor_index;
  std::unordered_map<NodeIndex, std::pair<std::size_t, std::uint32_t>> where;  // node -> (table, row)
  for (auto& [name, members] : grouped) {
    std::sort(members.begin(), members.end(), [&](NodeIndex a, NodeIndex b) { return g_.node(a).id < g_.node(b).id; });
    const TableSchema& schema = *find_table_schema(name);
    NodeTable table{name, {}, {}, {}};
    for (const auto& c : schema.columns) table.columns.push_back(c.name);
    const std::size_t cols = schema.columns.size();
    table.data.reserve(members.size() * cols);
    for (NodeIndex n : members) {
      where[n] = {ex.tables.size(), static_cast<std::uint32_t>(table.node_ids.size())};
      table.node_ids.push_back(g_.node(n).id);
      const auto& raw = raw_rows_[n];
      for (std::size_t c = 0; c < cols; ++c) {
        switch (schema.columns[c].kind) {
          case CK::Scalar: table.data.push_back(name == "Sequence" ? span : raw[c]); break;
          case CK::PosX: {
            const Vec2 local = geom::to_local({raw[c], raw[c + 1]}, frame);
            table.data.push_back(local.x);
            table.data.push_back(local.y);
            ++c;
            break;
          }
          case CK::PosY: throw ExtractError("feature schema for " + name + " has an unpaired y column");
          case CK::Yaw: table.data.push_back(geom::yaw_to_local(raw[c], frame)); break;
          case CK::TimeOffset: table.data.push_back(1e-6 * (raw[c] - t0)); break;
        }
      }
    }
    ex.tables.push_back(std::move(table));
  }

  std::map<std::tuple<std::size_t, EdgeType, std::size_t>, std::vector<std::pair<std::uint32_t, std::uint32_t>>> lists;
  for (NodeIndex n : nodes) {
    const auto src = where.find(n);
    if (src == where.end()) continue;
    for (std::uint32_t e : g_.incident(n, Direction::Out)) {
      const Edge& edge = g_.edges()[e];
      const auto dst = where.find(edge.dst);
      if (dst == where.end()) continue;
      lists[{src->second.first, edge.type, dst->second.first}].emplace_back(src->second.second, dst->second.second);
    }
  }
  for (auto& [key, pairs] : lists) {
    std::sort(pairs.begin(), pairs.end());
    ex.edges.push_back({ex.tables[std::get<0>(key)].name, std::string(to_string(std::get<1>(key))),
                        ex.tables[std::get<2>(key)].name, std::move(pairs)});
  }
  std::sort(ex.edges.begin(), ex.edges.end(), [](const EdgeList& a, const EdgeList& b) {
    return std::tie(a.src_table, a.relation, a.dst_table) < std::tie(b.src_table, b.relation, b.dst_table);
  });

  const auto& [table, row] = where.at(*target_sp);
  ex.target_table = ex.tables[table].name;
  ex.target_row = row;
  for (const Vec2& p : future) {
    const Vec2 local = geom::to_local(p, frame);
    ex.y.push_back({local.x, local.y});
  }
  return ex;
}

std::vector<HetGraphExample> Extractor::build_examples(const std::vector<TargetSpec>& targets, unsigned jobs,
                                                       std::vector<std::string>* warnings) const {
  std::vector<HetGraphExample> out(targets.size());
  std::vector<std::vector<std::string>> notes(targets.size());
  parallel_for(targets.size(), jobs, [&](std::size_t i) { out[i] = build_example(targets[i], &notes[i]); });
  if (warnings) {
    for (auto& n : notes) warnings->insert(warnings->end(), n.begin(), n.end());
  }
  return out;
}

}  // namespace scenekg
