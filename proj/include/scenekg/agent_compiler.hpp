#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "scenekg/config.hpp"
#include "scenekg/kg.hpp"
#include "scenekg/map_compiler.hpp"
#include "scenekg/scene_ir.hpp"

namespace scenekg {

struct ParticipantRec {
  std::string id;
  Category category = Category::Car;
  Size3 size;
  bool is_ego = false;
  NodeIndex node = 0;
};

struct SceneParticipantRec {
  int participant = -1;
  int scene = -1;
  Pose2D pose;
  double speed = 0.0;
  bool is_ego = false;
  NodeIndex node = 0;
  int next = -1;  // same participant, next appearance in the sequence
};

struct SceneRec {
  std::string id;
  int sequence = -1;
  std::int64_t timestamp_us = 0;
  NodeIndex node = 0;
  std::vector<int> participants;  // scene participant indices
};

struct SequenceRec {
  std::string id;
  std::string trip;
  NodeIndex node = 0;
  std::vector<int> scenes;
};

enum class RelationKind { Longitudinal, Intersecting, Lateral };
EdgeType edge_type_for(RelationKind k);

struct AgentRelation {
  RelationKind kind;
  int src;  // scene participant indices
  int dst;
  int scene;
};

/// Where an agent sits on the lane graph: a lane or, failing that, a connector.
struct LanePosition {
  bool on_connector = false;
  int element = -1;
  double s = 0.0;
};

struct AgentModel {
  std::vector<SequenceRec> sequences;
  std::vector<SceneRec> scenes;
  std::vector<ParticipantRec> participants;
  std::vector<SceneParticipantRec> scene_participants;
  std::unordered_map<std::string, int> participant_index;
  /// Per scene participant: isOn targets, sorted by node index.
  std::vector<std::vector<NodeIndex>> is_on;
  std::vector<std::optional<LanePosition>> lane_position;
  std::vector<AgentRelation> relations;
};

std::string scene_node_id(std::string_view sequence, std::size_t index);
std::string scene_participant_node_id(std::string_view scene, std::string_view agent);

/// Trips, locations, sequences and chained scenes. Location records come from
/// the trip log first and the map bundle second.
void build_temporal(const RawTripSet& trips, const std::vector<RawLocation>& map_locations, KnowledgeGraph& g,
                    AgentModel& model);
/// Participants and their per-scene appearances, with speed by finite difference.
void build_participants(const RawTripSet& trips, KnowledgeGraph& g, AgentModel& model);
void link_is_on(const MapModel& map, const CompilerConfig& cfg, KnowledgeGraph& g, AgentModel& model,
                unsigned jobs = 1);
/// Relations between the scene's participants that sit on the lane graph.
std::vector<AgentRelation> compute_agent_relations(const MapModel& map, const CompilerConfig& cfg,
                                                   const AgentModel& model, int scene);
void link_agent_relations(const MapModel& map, const CompilerConfig& cfg, KnowledgeGraph& g, AgentModel& model,
                          unsigned jobs = 1);

AgentModel compile_agents(const RawTripSet& trips, const RawMapBundle& raw_map, const MapModel& map,
                          const CompilerConfig& cfg, KnowledgeGraph& g, unsigned jobs = 1);

}  // namespace scenekg
