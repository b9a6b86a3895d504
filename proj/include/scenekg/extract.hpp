#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "scenekg/config.hpp"
#include "scenekg/geometry.hpp"
#include "scenekg/kg.hpp"

namespace scenekg {

class ExtractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TargetSpec {
  std::string participant;
  std::string sequence;
  std::string anchor_scene;
  int anchor_index = 0;  // position of the anchor scene in its sequence
};

struct FrameWindow {
  std::vector<NodeIndex> history;  // oldest first, anchor last
  std::vector<NodeIndex> future;
};

/// How a feature column reacts to the local frame.
enum class ColumnKind : std::uint8_t { Scalar, PosX, PosY, Yaw, TimeOffset };

struct ColumnSpec {
  std::string name;
  std::string unit;
  ColumnKind kind;
};

struct TableSchema {
  std::string table;
  std::vector<ColumnSpec> columns;
};

/// Versioned feature layout of every node table an example can contain.
inline constexpr int kFeatureSchemaVersion = 1;
const std::vector<TableSchema>& feature_schema();
const TableSchema* find_table_schema(std::string_view table);
/// Table a node type is stored in: participant and stop-area subtypes are grouped.
std::optional<std::string> table_for(NodeType t);

struct NodeTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::string> node_ids;
  std::vector<double> data;  // row-major, rows() x columns.size()

  std::size_t rows() const { return node_ids.size(); }
  double at(std::size_t row, std::size_t col) const { return data[row * columns.size() + col]; }
  friend bool operator==(const NodeTable&, const NodeTable&) = default;
};

struct EdgeList {
  std::string src_table;
  std::string relation;
  std::string dst_table;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  friend bool operator==(const EdgeList&, const EdgeList&) = default;
};

struct HetGraphExample {
  std::string sequence;
  std::string participant;
  std::string anchor_scene;
  int anchor_index = 0;
  std::vector<NodeTable> tables;  // sorted by name
  std::vector<EdgeList> edges;    // sorted by (src, relation, dst)
  std::string target_table;
  std::uint32_t target_row = 0;
  std::vector<std::array<double, 2>> y;

  const NodeTable* table(std::string_view name) const;
  std::size_t node_count() const;
  std::size_t edge_count() const;
  /// Features rounded through 32-bit floats, as stored on disk.
  HetGraphExample quantized() const;
  friend bool operator==(const HetGraphExample&, const HetGraphExample&) = default;
};

/// Read-only view over a compiled graph that selects targets and cuts
/// examples. Safe to use from several threads once constructed.
class Extractor {
 public:
  Extractor(const KnowledgeGraph& g, const CompilerConfig& cfg);

  std::vector<std::string> sequences() const;
  std::vector<TargetSpec> select_targets(std::string_view sequence) const;
  std::vector<TargetSpec> select_all_targets() const;

  FrameWindow window(const TargetSpec& t) const;
  /// Sorted node indices of the relevant map. A fallback seed is reported in `warnings`.
  std::vector<NodeIndex> extract_map_subgraph(const TargetSpec& t, std::vector<std::string>* warnings = nullptr) const;
  std::vector<NodeIndex> extract_history(const TargetSpec& t, const std::vector<NodeIndex>& map_nodes) const;
  HetGraphExample build_example(const TargetSpec& t, std::vector<std::string>* warnings = nullptr) const;
  std::vector<HetGraphExample> build_examples(const std::vector<TargetSpec>& targets, unsigned jobs,
                                              std::vector<std::string>* warnings = nullptr) const;

  const KnowledgeGraph& graph() const { return g_; }

 private:
  struct SequenceInfo {
    NodeIndex node;
    std::vector<NodeIndex> scenes;  // in chain order
    std::vector<std::int64_t> timestamps;
  };

  std::optional<NodeIndex> sp_of(NodeIndex participant, NodeIndex scene) const;
  NodeIndex seed_block(const TargetSpec& t, const FrameWindow& w, std::vector<std::string>* warnings) const;
  std::vector<NodeIndex> map_around(NodeIndex seed) const;
  const SequenceInfo& sequence_info(std::string_view id) const;
  bool drivable_at(NodeIndex sp) const;

  const KnowledgeGraph& g_;
  CompilerConfig cfg_;
  std::map<std::string, SequenceInfo, std::less<>> sequences_;
  std::unordered_map<std::uint64_t, NodeIndex> sp_index_;  // (participant, scene) -> scene participant
  std::vector<std::optional<geom::Polygon>> shapes_;       // per node, parsed hasShape polygon
  std::vector<std::vector<double>> raw_rows_;              // per node, global-frame features
  std::unordered_map<NodeIndex, std::vector<NodeIndex>> lane_overlaps_;  // lane -> stop areas and crossings
  std::vector<NodeIndex> blocks_;

  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<NodeIndex, std::shared_ptr<const std::vector<NodeIndex>>> map_cache_;
};

}  // namespace scenekg
