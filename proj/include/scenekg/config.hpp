#pragma once

#include <string>
#include <string_view>

namespace scenekg {

/// Every threshold used by the compilers and the extractor.
struct CompilerConfig {
  double pose_resolution_m = 2.0;
  double snippet_max_len_m = 20.0;
  double is_next_to_m = 4.0;
  double crossing_walkway_m = 5.0;
  double lateral_adjacency_m = 0.5;
  double opposing_heading_tol_deg = 30.0;
  double opposing_distance_m = 6.0;
  double connector_buffer_m = 0.5;

  int max_crossing_walkways = 2;
  /// Minimum length of border two lanes must share to count as neighbours.
  double min_shared_border_m = 1.0;
  /// Minimum longitudinal overlap of two antiparallel blocks to be opposing.
  double opposing_min_overlap_m = 1.0;
  /// Largest tolerated hole when border pieces are stitched along a lane.
  double border_gap_tolerance_m = 0.05;
  /// Agents off every lane are attached to a connector this close.
  double connector_snap_m = 1.0;
  int relation_hops = 2;
  /// Test the four footprint corners as well as the centre for isOn.
  bool footprint_is_on = false;

  int road_block_hops = 4;
  int history_scenes = 5;
  int future_steps = 12;
  double scene_step_s = 0.5;
  double scene_step_tolerance_s = 0.05;
};

/// Unknown keys and non-positive thresholds are rejected.
CompilerConfig parse_config(std::string_view json_text);
std::string config_to_json(const CompilerConfig& cfg);
void validate_config(const CompilerConfig& cfg);

}  // namespace scenekg
