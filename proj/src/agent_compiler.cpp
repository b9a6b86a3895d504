#include "scenekg/agent_compiler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "scenekg/parallel.hpp"

namespace scenekg {
namespace {

constexpr double kSnapHeadingTolDeg = 45.0;

std::vector<Vec2> test_points(const SceneParticipantRec& sp, const ParticipantRec& p, bool footprint) {
  std::vector<Vec2> pts{sp.pose.position()};
  if (!footprint) return pts;
  const double c = std::cos(sp.pose.yaw);
  const double s = std::sin(sp.pose.yaw);
  for (const auto& [fl, fw] : {std::pair{1.0, 1.0}, {1.0, -1.0}, {-1.0, -1.0}, {-1.0, 1.0}}) {
    const double lx = 0.5 * fl * p.size.length;
    const double ly = 0.5 * fw * p.size.width;
    pts.push_back({sp.pose.x + c * lx - s * ly, sp.pose.y + s * lx + c * ly});
  }
  return pts;
}

std::optional<LanePosition> locate(const MapModel& map, const CompilerConfig& cfg, const Pose2D& pose) {
  const Vec2 p = pose.position();
  struct Candidate {
    bool against;
    double distance;
    int lane;
    double s;
  };
  std::optional<Candidate> best;
  for (std::uint32_t l : map.lane_grid.query(p)) {
    const LaneModel& lane = map.lanes[l];
    if (!geom::point_in_polygon(p, lane.polygon)) continue;
    const auto proj = geom::project_point_to_polyline(p, lane.centerline);
    const Candidate c{geom::heading_difference(pose.yaw, lane.centerline.heading_at(proj.arc_s)) >= 90.0, proj.distance,
                      static_cast<int>(l), proj.arc_s};
    if (!best || std::tie(c.against, c.distance, c.lane) < std::tie(best->against, best->distance, best->lane)) best = c;
  }
  if (best) return LanePosition{false, best->lane, best->s};

  std::optional<std::pair<double, LanePosition>> snap;
  const geom::BoundingBox box = geom::BoundingBox{p, p}.inflated(cfg.connector_snap_m);
  for (std::uint32_t c : map.connector_grid.query(box)) {
    const ConnectorModel& conn = map.connectors[c];
    const auto proj = geom::project_point_to_polyline(p, conn.centerline);
    if (!(proj.distance < cfg.connector_snap_m)) continue;
    if (geom::heading_difference(pose.yaw, conn.centerline.heading_at(proj.arc_s)) >= kSnapHeadingTolDeg) continue;
    if (!snap || proj.distance < snap->first) snap = {proj.distance, LanePosition{true, static_cast<int>(c), proj.arc_s}};
  }
  if (snap) return snap->second;
  return std::nullopt;
}

// Lanes and connectors share one index space: lanes first, then connectors.
int element_of(const MapModel& map, const LanePosition& pos) {
  return pos.on_connector ? static_cast<int>(map.lanes.size()) + pos.element : pos.element;
}

/// Steps along lane -> connector -> lane successor links, up to max_steps.
std::map<int, int> reach(const MapModel& map, int start, int max_steps) {
  const int lanes = static_cast<int>(map.lanes.size());
  std::map<int, int> dist{{start, 0}};
  std::deque<int> queue{start};
  while (!queue.empty()) {
    const int e = queue.front();
    queue.pop_front();
    const int d = dist[e];
    if (d == max_steps) continue;
    auto visit = [&](int next) {
      if (dist.emplace(next, d + 1).second) queue.push_back(next);
    };
    if (e < lanes) {
      for (int c : map.lanes[e].connectors_out) visit(lanes + c);
    } else {
      visit(map.connectors[e - lanes].outgoing);
    }
  }
  return dist;
}

}  // namespace

EdgeType edge_type_for(RelationKind k) {
  switch (k) {
    case RelationKind::Longitudinal: return EdgeType::longitudinal;
    case RelationKind::Intersecting: return EdgeType::intersecting;
    case RelationKind::Lateral: return EdgeType::lateral;
  }
  return EdgeType::lateral;
}

std::string scene_node_id(std::string_view sequence, std::size_t index) {
  return std::string(sequence) + "#" + std::to_string(index);
}

std::string scene_participant_node_id(std::string_view scene, std::string_view agent) {
  return std::string(scene) + "@" + std::string(agent);
}

void build_temporal(const RawTripSet& trips, const std::vector<RawLocation>& map_locations, KnowledgeGraph& g,
                    AgentModel& model) {
  std::unordered_map<std::string, const RawLocation*> locations;
  for (const auto& l : trips.locations) locations.emplace(l.id, &l);
  for (const auto& l : map_locations) locations.emplace(l.id, &l);
  std::unordered_map<std::string, NodeIndex> location_nodes;

  for (const RawTrip& trip : trips.trips) {
    const auto loc = locations.find(trip.location_id);
    if (loc == locations.end()) throw ReferenceError({trip.location_id});
    auto [it, fresh] = location_nodes.emplace(trip.location_id, 0);
    if (fresh) {
      it->second = g.add_node(NodeType::Location, trip.location_id,
                              {{"name", loc->second->name}, {"hasRightHandTraffic", loc->second->right_hand_traffic}});
    }
    const NodeIndex trip_node = g.add_node(NodeType::Trip, trip.id);
    g.add_edge(EdgeType::hasLocation, trip_node, it->second);
    for (const RawSequence& seq : trip.sequences) {
      SequenceRec rec{seq.id, trip.id, g.add_node(NodeType::Sequence, seq.id)};
      g.add_edge(EdgeType::hasSequence, trip_node, rec.node);
      const int seq_index = static_cast<int>(model.sequences.size());
      for (std::size_t k = 0; k < seq.scenes.size(); ++k) {
        const std::string id = scene_node_id(seq.id, k);
        const NodeIndex n = g.add_node(NodeType::Scene, id, {{"hasTimestamp", seq.scenes[k].timestamp_us}});
        g.add_edge(EdgeType::hasScene, rec.node, n);
        if (k > 0) {
          const NodeIndex prev = model.scenes.back().node;
          g.add_edge(EdgeType::hasNextScene, prev, n);
          g.add_edge(EdgeType::hasPreviousScene, n, prev);
        }
        rec.scenes.push_back(static_cast<int>(model.scenes.size()));
        model.scenes.push_back({id, seq_index, seq.scenes[k].timestamp_us, n, {}});
      }
      model.sequences.push_back(std::move(rec));
    }
  }
}

void build_participants(const RawTripSet& trips, KnowledgeGraph& g, AgentModel& model) {
  std::size_t seq_index = 0;
  for (const RawTrip& trip : trips.trips) {
    for (const RawSequence& seq : trip.sequences) {
      const SequenceRec& rec = model.sequences.at(seq_index++);
      std::map<int, std::vector<int>> appearances;  // participant -> scene participants in order
      for (std::size_t k = 0; k < seq.scenes.size(); ++k) {
        const int scene = rec.scenes[k];
        for (const RawAnnotation& a : seq.scenes[k].annotations) {
          auto [it, fresh] = model.participant_index.emplace(a.agent_id, static_cast<int>(model.participants.size()));
          if (fresh) {
            ParticipantRec p{a.agent_id, a.category, a.size, a.is_ego};
            p.node = g.add_node(node_type_for(a.category), a.agent_id,
                                {{"length", a.size.length},
                                 {"width", a.size.width},
                                 {"height", a.size.height},
                                 {"category", std::string(to_string(a.category))},
                                 {"is_ego", a.is_ego}});
            model.participants.push_back(std::move(p));
          } else if (a.is_ego && !model.participants[it->second].is_ego) {
            model.participants[it->second].is_ego = true;
            g.set_attr(model.participants[it->second].node, "is_ego", true);
          }
          const int pi = it->second;
          SceneParticipantRec sp{pi, scene, a.pose, 0.0, a.is_ego};
          sp.node = g.add_node(NodeType::SceneParticipant,
                               scene_participant_node_id(model.scenes[scene].id, a.agent_id),
                               {{"x", a.pose.x},
                                {"y", a.pose.y},
                                {"yaw", geom::normalize_angle(a.pose.yaw)},
                                {"is_ego", a.is_ego}});
          g.add_edge(EdgeType::hasSceneParticipant, model.scenes[scene].node, sp.node);
          g.add_edge(EdgeType::isSceneParticipantOf, sp.node, model.participants[pi].node);
          const int spi = static_cast<int>(model.scene_participants.size());
          model.scenes[scene].participants.push_back(spi);
          appearances[pi].push_back(spi);
          model.scene_participants.push_back(sp);
        }
      }
      for (const auto& [_, chain] : appearances) {
        auto speed_between = [&](int a, int b) {
          const auto& A = model.scene_participants[a];
          const auto& B = model.scene_participants[b];
          const double dt = 1e-6 * static_cast<double>(model.scenes[B.scene].timestamp_us - model.scenes[A.scene].timestamp_us);
          return geom::distance(A.pose.position(), B.pose.position()) / dt;
        };
        for (std::size_t i = 0; i < chain.size(); ++i) {
          auto& sp = model.scene_participants[chain[i]];
          if (chain.size() > 1) sp.speed = i == 0 ? speed_between(chain[0], chain[1]) : speed_between(chain[i - 1], chain[i]);
          g.set_attr(sp.node, "speed", sp.speed);
          if (i + 1 < chain.size()) {
            sp.next = chain[i + 1];
            g.add_edge(EdgeType::inNextScene, sp.node, model.scene_participants[chain[i + 1]].node);
          }
        }
      }
    }
  }
}

void link_is_on(const MapModel& map, const CompilerConfig& cfg, KnowledgeGraph& g, AgentModel& model, unsigned jobs) {
  const std::size_t n = model.scene_participants.size();
  model.is_on.assign(n, {});
  model.lane_position.assign(n, std::nullopt);
  parallel_for(n, jobs, [&](std::size_t i) {
    const SceneParticipantRec& sp = model.scene_participants[i];
    std::vector<NodeIndex> hits;
    for (const Vec2& p : test_points(sp, model.participants[sp.participant], cfg.footprint_is_on)) {
      for (std::uint32_t l : map.lane_grid.query(p)) {
        const LaneModel& lane = map.lanes[l];
        if (!geom::point_in_polygon(p, lane.polygon)) continue;
        hits.push_back(lane.node);
        if (lane.block >= 0) hits.push_back(map.blocks[lane.block].node);
        const double s = geom::project_point_to_polyline(p, lane.centerline).arc_s;
        std::size_t k = 0;
        while (k + 1 < lane.snippets.size() && lane.snippets[k].s_end < s) ++k;
        if (!lane.snippet_nodes.empty()) hits.push_back(lane.snippet_nodes[k]);
      }
      for (std::uint32_t a : map.area_grid.query(p)) {
        if (geom::point_in_polygon(p, map.areas[a].polygon)) hits.push_back(map.areas[a].node);
      }
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    model.is_on[i] = std::move(hits);
    model.lane_position[i] = locate(map, cfg, sp.pose);
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (NodeIndex target : model.is_on[i]) g.add_edge(EdgeType::isOn, model.scene_participants[i].node, target);
  }
}

std::vector<AgentRelation> compute_agent_relations(const MapModel& map, const CompilerConfig& cfg,
                                                   const AgentModel& model, int scene) {
  const auto& members = model.scenes.at(scene).participants;
  const int lanes = static_cast<int>(map.lanes.size());
  const int long_steps = 2 * cfg.relation_hops;
  const int cross_steps = 2 * cfg.relation_hops - 1;

  struct Agent {
    int sp;
    LanePosition pos;
    int element;
    std::map<int, int> reach;
    std::vector<int> connectors;
  };
  std::vector<Agent> agents;
  for (int sp : members) {
    const auto& pos = model.lane_position.at(sp);
    if (!pos) continue;
    Agent a{sp, *pos, element_of(map, *pos), reach(map, element_of(map, *pos), long_steps), {}};
    for (const auto& [e, d] : a.reach) {
      if (e >= lanes && d <= cross_steps) a.connectors.push_back(e - lanes);
    }
    agents.push_back(std::move(a));
  }

  auto longitudinal = [&](const Agent& a, const Agent& b) {
    if (a.element == b.element) return b.pos.s > a.pos.s;
    const auto it = a.reach.find(b.element);
    return it != a.reach.end() && it->second >= 1;
  };
  auto intersecting = [&](const Agent& a, const Agent& b) {
    for (int ca : a.connectors) {
      const auto& conflicts = map.connectors[ca].conflicts;
      for (int cb : b.connectors) {
        if (std::find(conflicts.begin(), conflicts.end(), cb) != conflicts.end()) return true;
      }
    }
    return false;
  };
  auto lateral = [&](const Agent& a, const Agent& b) {
    if (a.pos.on_connector || b.pos.on_connector || a.element == b.element) return false;
    const auto& A = map.lanes[a.element];
    const int block = map.lanes[b.element].block;
    if (block >= 0 && block == A.block) return true;
    return std::find(A.left.begin(), A.left.end(), b.element) != A.left.end() ||
           std::find(A.right.begin(), A.right.end(), b.element) != A.right.end();
  };

  std::vector<AgentRelation> out;
  for (const Agent& a : agents) {
    for (const Agent& b : agents) {
      if (a.sp == b.sp) continue;
      if (longitudinal(a, b)) {
        out.push_back({RelationKind::Longitudinal, a.sp, b.sp, scene});
      } else if (!longitudinal(b, a) && intersecting(a, b)) {
        out.push_back({RelationKind::Intersecting, a.sp, b.sp, scene});
      } else if (lateral(a, b)) {
        out.push_back({RelationKind::Lateral, a.sp, b.sp, scene});
      }
    }
  }
  return out;
}

void link_agent_relations(const MapModel& map, const CompilerConfig& cfg, KnowledgeGraph& g, AgentModel& model,
                          unsigned jobs) {
  std::vector<std::vector<AgentRelation>> per_scene(model.scenes.size());
  parallel_for(model.scenes.size(), jobs, [&](std::size_t s) {
    per_scene[s] = compute_agent_relations(map, cfg, model, static_cast<int>(s));
  });
  model.relations.clear();
  for (auto& rels : per_scene) {
    for (const auto& r : rels) {
      g.add_edge(edge_type_for(r.kind), model.scene_participants[r.src].node, model.scene_participants[r.dst].node);
      model.relations.push_back(r);
    }
  }
}

AgentModel compile_agents(const RawTripSet& trips, const RawMapBundle& raw_map, const MapModel& map,
                          const CompilerConfig& cfg, KnowledgeGraph& g, unsigned jobs) {
  AgentModel model;
  build_temporal(trips, raw_map.locations, g, model);
  build_participants(trips, g, model);
  link_is_on(map, cfg, g, model, jobs);
  link_agent_relations(map, cfg, g, model, jobs);
  return model;
}

}  // namespace scenekg
