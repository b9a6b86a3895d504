#pragma once

// Scenarios and comparisons shared by the extraction tests and the acceptance run.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scenekg/extract.hpp"
#include "scenekg/pipeline.hpp"
#include "scenekg/synthgen.hpp"

namespace extract_fixtures {

using namespace scenekg;

inline std::string sp_id(const std::string& seq, int k, const std::string& agent) {
  return scene_participant_node_id(scene_node_id(seq, static_cast<std::size_t>(k)), agent);
}

/// Straight 300 m road cut into six forward blocks F0_0..F0_5. The target
/// creeps along F0_0; one car is parked on F0_5 and one on the opposing lane B0_0.
inline synth::Scenario six_block_chain() {
  synth::ScenarioTemplate tpl;
  tpl.name = "six-blocks";
  tpl.layout = synth::StraightRoad{1, 300};
  const std::vector<std::string> fwd{"F0_0", "F0_1", "F0_2", "F0_3", "F0_4", "F0_5"};
  tpl.agents.push_back({"ego", Category::Car, fwd, 1.0, 2.0, 0.0, std::nullopt, true});
  tpl.agents.push_back({"tgt", Category::Car, fwd, 1.0, 10.0});
  tpl.agents.push_back({"far", Category::Car, {}, 0.0, 0.0, 0.0, Pose2D{275.0, -1.75, 0.0}});
  tpl.agents.push_back({"oncoming_far", Category::Car, {}, 0.0, 0.0, 0.0, Pose2D{275.0, 1.75, geom::kPi}});
  return synth::generate(tpl, 0, 10.0);
}

inline std::string block_of_lane(const World& w, const std::string& lane) {
  return w.map.blocks[w.map.lanes[w.map.lane_index.at(lane)].block].id;
}

/// Straight lane along x = 5 heading +y; the target passes (5, 5) with yaw 90 deg
/// at scene 4 and moves 2 m per scene.
inline synth::Scenario rotated_lane_case() {
  RawMapBundle map = synth::build_layout(synth::StraightRoad{1, 100});
  RawTripSet none;
  synth::apply_rigid_transform(map, none, geom::kPi / 2, {3.25, 0.0});
  RawSequence seq{"seq0", {}};
  for (int k = 0; k < 17; ++k) {
    const Pose2D tgt{5.0, -3.0 + 2.0 * k, geom::kPi / 2};
    const Pose2D ego{5.0, -13.0 + 2.0 * k, geom::kPi / 2};
    seq.scenes.push_back({synth::kBaseTimestampUs + k * 500000,
                          ego,
                          {{"ego", Category::Car, ego, synth::default_size(Category::Car), true},
                           {"tgt", Category::Car, tgt, synth::default_size(Category::Car), false}}});
  }
  RawTripSet trips;
  trips.trips.push_back({"trip0", map.locations.front().id, {seq}});
  return {std::move(map), std::move(trips)};
}

inline bool is_yaw_column(const NodeTable& t, std::size_t col) {
  const TableSchema* s = find_table_schema(t.name);
  return s != nullptr && col < s->columns.size() && s->columns[col].kind == ColumnKind::Yaw;
}

/// Same structure, and every feature and label within tol; yaw compared modulo 2 pi.
inline bool examples_close(const HetGraphExample& a, const HetGraphExample& b, double tol, std::string* why) {
  std::ostringstream msg;
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (a.sequence != b.sequence || a.participant != b.participant || a.anchor_index != b.anchor_index) {
    return fail("different target");
  }
  if (a.target_table != b.target_table || a.target_row != b.target_row) return fail("different target row");
  if (a.edges != b.edges) return fail("different edge lists");
  if (a.tables.size() != b.tables.size()) return fail("different table count");
  for (std::size_t t = 0; t < a.tables.size(); ++t) {
    const NodeTable& x = a.tables[t];
    const NodeTable& y = b.tables[t];
    if (x.name != y.name || x.columns != y.columns || x.node_ids != y.node_ids) return fail("table " + x.name + " differs");
    for (std::size_t i = 0; i < x.data.size(); ++i) {
      const std::size_t col = i % x.columns.size();
      double d = x.data[i] - y.data[i];
      if (is_yaw_column(x, col)) d = oracle::wrap(d);
      if (!(std::abs(d) <= tol)) {
        msg << x.name << "[" << x.node_ids[i / x.columns.size()] << "]." << x.columns[col] << ": " << x.data[i] << " vs "
            << y.data[i];
        return fail(msg.str());
      }
    }
  }
  if (a.y.size() != b.y.size()) return fail("different label length");
  for (std::size_t i = 0; i < a.y.size(); ++i) {
    for (int c = 0; c < 2; ++c) {
      if (!(std::abs(a.y[i][c] - b.y[i][c]) <= tol)) {
        msg << "y[" << i << "][" << c << "]: " << a.y[i][c] << " vs " << b.y[i][c];
        return fail(msg.str());
      }
    }
  }
  return true;
}

/// Row of the target's anchor scene participant: (x_local, y_local, yaw_local).
inline std::array<double, 3> target_row(const HetGraphExample& ex) {
  const NodeTable* t = ex.table(ex.target_table);
  return {t->at(ex.target_row, 0), t->at(ex.target_row, 1), t->at(ex.target_row, 2)};
}

}  // namespace extract_fixtures
