#include "scenekg/pipeline.hpp"

namespace scenekg {

World compile_world(const RawMapBundle& map, const RawTripSet& trips, const CompilerConfig& cfg, unsigned jobs) {
  validate_config(cfg);
  World w;
  w.map = compile_map(map, cfg, w.graph, jobs);
  w.agents = compile_agents(trips, map, w.map, cfg, w.graph, jobs);
  w.warnings = w.map.warnings;
  return w;
}

SchemaOptions schema_options(const CompilerConfig& cfg) {
  return {cfg.is_next_to_m, cfg.max_crossing_walkways, cfg.snippet_max_len_m};
}

}  // namespace scenekg
