#pragma once

#include <string>
#include <vector>

#include "scenekg/agent_compiler.hpp"
#include "scenekg/config.hpp"
#include "scenekg/kg.hpp"
#include "scenekg/map_compiler.hpp"
#include "scenekg/scene_ir.hpp"
#include "scenekg/schema.hpp"

namespace scenekg {

/// A compiled map plus trips: the graph and the indexes used to build it.
struct World {
  KnowledgeGraph graph;
  MapModel map;
  AgentModel agents;
  std::vector<std::string> warnings;
};

World compile_world(const RawMapBundle& map, const RawTripSet& trips, const CompilerConfig& cfg, unsigned jobs = 1);

SchemaOptions schema_options(const CompilerConfig& cfg);

}  // namespace scenekg
