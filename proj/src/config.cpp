#include "scenekg/config.hpp"

#include <stdexcept>

#include "json.hpp"
#include "scenekg/scene_ir.hpp"

namespace scenekg {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename F>
void for_each_field(CompilerConfig& c, F&& f) {
  f("pose_resolution_m", c.pose_resolution_m);
  f("snippet_max_len_m", c.snippet_max_len_m);
  f("is_next_to_m", c.is_next_to_m);
  f("crossing_walkway_m", c.crossing_walkway_m);
  f("lateral_adjacency_m", c.lateral_adjacency_m);
  f("opposing_heading_tol_deg", c.opposing_heading_tol_deg);
  f("opposing_distance_m", c.opposing_distance_m);
  f("connector_buffer_m", c.connector_buffer_m);
  f("max_crossing_walkways", c.max_crossing_walkways);
  f("min_shared_border_m", c.min_shared_border_m);
  f("opposing_min_overlap_m", c.opposing_min_overlap_m);
  f("border_gap_tolerance_m", c.border_gap_tolerance_m);
  f("connector_snap_m", c.connector_snap_m);
  f("relation_hops", c.relation_hops);
  f("footprint_is_on", c.footprint_is_on);
  f("road_block_hops", c.road_block_hops);
  f("history_scenes", c.history_scenes);
  f("future_steps", c.future_steps);
  f("scene_step_s", c.scene_step_s);
  f("scene_step_tolerance_s", c.scene_step_tolerance_s);
}

}  // namespace

void validate_config(const CompilerConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw std::invalid_argument(std::string("config: ") + name + " must be > 0");
  };
  positive(c.pose_resolution_m, "pose_resolution_m");
  positive(c.snippet_max_len_m, "snippet_max_len_m");
  positive(c.is_next_to_m, "is_next_to_m");
  positive(c.crossing_walkway_m, "crossing_walkway_m");
  positive(c.lateral_adjacency_m, "lateral_adjacency_m");
  positive(c.opposing_distance_m, "opposing_distance_m");
  positive(c.connector_buffer_m, "connector_buffer_m");
  positive(c.scene_step_s, "scene_step_s");
  if (c.opposing_heading_tol_deg < 0 || c.opposing_heading_tol_deg > 90) {
    throw std::invalid_argument("config: opposing_heading_tol_deg must lie in [0, 90]");
  }
  if (c.history_scenes < 1 || c.future_steps < 1 || c.road_block_hops < 0 || c.relation_hops < 0 ||
      c.max_crossing_walkways < 0) {
    throw std::invalid_argument("config: counts out of range");
  }
}

CompilerConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0, 0, "config");
  }
  if (!doc.is_object()) throw ParseError("config must be a JSON object", 0, 0, "config");
  CompilerConfig cfg;
  std::size_t matched = 0;
  for_each_field(cfg, [&](const char* name, auto& field) {
    const auto it = doc.find(name);
    if (it == doc.end()) return;
    ++matched;
    using T = std::decay_t<decltype(field)>;
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ParseError("expected a boolean", 0, 0, std::string("config.") + name);
    } else if constexpr (std::is_same_v<T, int>) {
      if (!it->is_number_integer()) throw ParseError("expected an integer", 0, 0, std::string("config.") + name);
    } else {
      if (!it->is_number()) throw ParseError("expected a number", 0, 0, std::string("config.") + name);
    }
    field = it->get<T>();
  });
  if (matched != doc.size()) {
    for (const auto& [key, _] : doc.items()) {
      bool known = false;
      for_each_field(cfg, [&](const char* name, auto&) { known = known || key == name; });
      if (!known) throw ParseError("unknown config key '" + key + "'", 0, 0, "config");
    }
  }
  validate_config(cfg);
  return cfg;
}

std::string config_to_json(const CompilerConfig& cfg) {
  ordered_json doc = ordered_json::object();
  CompilerConfig copy = cfg;
  for_each_field(copy, [&](const char* name, auto& field) { doc[name] = field; });
  return doc.dump();
}

}  // namespace scenekg
