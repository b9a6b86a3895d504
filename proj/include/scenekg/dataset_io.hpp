#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenekg/config.hpp"
#include "scenekg/extract.hpp"
#include "scenekg/scene_ir.hpp"

namespace scenekg {

inline constexpr std::uint32_t kRecordVersion = 1;

/// Malformed or truncated example record; `offset` is the byte where reading stopped.
class RecordError : public std::runtime_error {
 public:
  RecordError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class MissingSplitError : public std::runtime_error {
 public:
  explicit MissingSplitError(std::string sequence);
  const std::string& sequence() const { return sequence_; }

 private:
  std::string sequence_;
};

std::vector<std::uint8_t> encode_example(const HetGraphExample& ex);
HetGraphExample decode_example(std::span<const std::uint8_t> bytes);
std::size_t write_example(const HetGraphExample& ex, std::ostream& sink);
HetGraphExample read_example(std::istream& source);
HetGraphExample read_example_file(const std::filesystem::path& path);

/// `<sequence>_<participant>_<anchor index>.skgx`, with unsafe characters replaced.
std::string example_file_name(const HetGraphExample& ex);

struct DatasetManifest {
  std::uint32_t format_version = kRecordVersion;
  CompilerConfig config;
  std::map<std::string, std::size_t> split_counts;
  std::string schema_digest;
  std::vector<std::string> files;  // relative to the dataset root
};

/// 64-bit FNV-1a over the canonical JSON of the feature schema, as hex.
std::string feature_schema_digest();
std::string feature_schema_json();

/// Writes train/, val/ and test/ plus manifest.json. Stale records in the split
/// directories are removed first so reruns yield identical trees.
DatasetManifest write_dataset(const std::vector<HetGraphExample>& examples, const SplitTable& splits,
                              const std::filesystem::path& dir, const CompilerConfig& cfg, unsigned jobs = 1);
std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest read_manifest(const std::filesystem::path& dir);

struct DatasetStats {
  std::map<std::string, std::size_t> split_counts;
  /// Lower bin edge (multiples of kHistogramBin nodes) to example count.
  std::map<std::size_t, std::size_t> node_histogram;
  std::map<std::string, double> mean_rows_per_table;
  double mean_nodes = 0.0;
  double mean_edges = 0.0;
  std::vector<std::pair<std::string, std::string>> corrupt;  // file, reason
  static constexpr std::size_t kHistogramBin = 100;
};

DatasetStats dataset_stats(const std::filesystem::path& dir);
std::string stats_to_json(const DatasetStats& s);

}  // namespace scenekg
