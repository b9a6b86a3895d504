#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "scenekg/dataset_io.hpp"
#include "scenekg/pipeline.hpp"
#include "scenekg/synthgen.hpp"

using namespace scenekg;
namespace fs = std::filesystem;

namespace {

HetGraphExample tiny_example(const std::string& seq = "seq0", const std::string& who = "car", int anchor = 4) {
  HetGraphExample ex;
  ex.sequence = seq;
  ex.participant = who;
  ex.anchor_scene = seq + "#" + std::to_string(anchor);
  ex.anchor_index = anchor;
  ex.tables.push_back({"Scene", {"time_offset"}, {ex.anchor_scene}, {0.0}});
  ex.tables.push_back({"SceneParticipant",
                       {"x_local", "y_local", "yaw_local", "speed", "time_offset", "is_ego"},
                       {ex.anchor_scene + "@" + who},
                       {0.0, 0.0, 0.0, 4.0, 0.0, 0.0}});
  ex.edges.push_back({"Scene", "hasSceneParticipant", "SceneParticipant", {{0, 0}}});
  ex.target_table = "SceneParticipant";
  ex.target_row = 0;
  for (int k = 1; k <= 12; ++k) ex.y.push_back({2.0 * k, 0.1});
  return ex;
}

std::uint32_t le32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).generic_string()] = ss.str();
  }
  return out;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("scenekg_test_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("record layout is little-endian and length-prefixed") {
  const auto bytes = encode_example(tiny_example());
  REQUIRE(bytes.size() > 16);
  CHECK(std::memcmp(bytes.data(), "SKGX", 4) == 0);
  CHECK(le32(bytes, 4) == kRecordVersion);
  CHECK(le32(bytes, 8) == 4);  // "seq0"
  CHECK(std::string(bytes.begin() + 12, bytes.begin() + 16) == "seq0");
  CHECK(std::memcmp(bytes.data() + bytes.size() - 4, "SKGE", 4) == 0);
  // The last label pair (24, 0.1) sits in front of the end marker as two doubles.
  double x = 0;
  double y = 0;
  std::uint64_t ux = 0;
  std::uint64_t uy = 0;
  for (int i = 0; i < 8; ++i) {
    ux |= static_cast<std::uint64_t>(bytes[bytes.size() - 20 + i]) << (8 * i);
    uy |= static_cast<std::uint64_t>(bytes[bytes.size() - 12 + i]) << (8 * i);
  }
  std::memcpy(&x, &ux, 8);
  std::memcpy(&y, &uy, 8);
  CHECK(x == 24.0);
  CHECK(y == 0.1);
}

TEST_CASE("records round trip through float32 features") {
  HetGraphExample ex = tiny_example();
  ex.tables[1].data[3] = 0.1;  // not representable in float32
  const HetGraphExample back = decode_example(encode_example(ex));
  CHECK(back == ex.quantized());
  CHECK(back.tables[1].data[3] == static_cast<double>(0.1f));
  CHECK(back.y == ex.y);
  std::stringstream ss;
  const std::size_t n = write_example(ex, ss);
  CHECK(n == encode_example(ex).size());
  CHECK(read_example(ss) == back);
}

TEST_CASE("every truncation is reported") {
  const auto bytes = encode_example(tiny_example());
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    CAPTURE(n);
    CHECK_THROWS_AS(decode_example(std::span(bytes.data(), n)), RecordError);
  }
  auto extra = bytes;
  extra.push_back(0);
  CHECK_THROWS_AS(decode_example(extra), RecordError);
  auto bad = bytes;
  bad[0] = 'X';
  try {
    decode_example(bad);
    FAIL("accepted a bad magic");
  } catch (const RecordError& e) {
    CHECK(e.offset() == 0);
  }
  auto version = bytes;
  version[4] = 9;
  CHECK_THROWS_AS(decode_example(version), RecordError);
}

TEST_CASE("out-of-range edge indices are rejected") {
  HetGraphExample ex = tiny_example();
  ex.edges[0].pairs[0].second = 1;
  CHECK_THROWS_AS(decode_example(encode_example(ex)), RecordError);
  HetGraphExample t = tiny_example();
  t.target_row = 3;
  CHECK_THROWS_AS(decode_example(encode_example(t)), RecordError);
}

TEST_CASE("example file names are sanitized") {
  CHECK(example_file_name(tiny_example("seq0", "car", 7)) == "seq0_car_7.skgx");
  CHECK(example_file_name(tiny_example("a/b c", "x#y", 0)) == "a-b-c_x-y_0.skgx");
}

TEST_CASE("schema digest is FNV-1a of the schema json") {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : feature_schema_json()) {
    h = (h ^ c) * 1099511628211ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  CHECK(feature_schema_digest() == hex);
}

TEST_CASE("ten examples over a 6/2/2 split") {
  TempDir dir("split");
  std::vector<HetGraphExample> exs;
  SplitTable splits;
  for (int i = 0; i < 10; ++i) {
    const std::string seq = "s" + std::to_string(i);
    exs.push_back(tiny_example(seq));
    splits[seq] = i < 6 ? Split::Train : (i < 8 ? Split::Val : Split::Test);
  }
  const auto m = write_dataset(exs, splits, dir.path, CompilerConfig{}, 2);
  CHECK(m.split_counts.at("train") == 6);
  CHECK(m.split_counts.at("val") == 2);
  CHECK(m.split_counts.at("test") == 2);
  CHECK(m.files.size() == 10);
  const auto files = tree(dir.path);
  CHECK(files.size() == 11);
  CHECK(files.count("manifest.json") == 1);
  CHECK(files.count("val/s6_car_4.skgx") == 1);
  CHECK(read_example_file(dir.path / "test/s9_car_4.skgx") == exs[9].quantized());

  const DatasetManifest back = read_manifest(dir.path);
  CHECK(back.files == m.files);
  CHECK(back.split_counts == m.split_counts);
  CHECK(back.schema_digest == feature_schema_digest());
  CHECK(config_to_json(back.config) == config_to_json(CompilerConfig{}));

  const DatasetStats s = dataset_stats(dir.path);
  CHECK(s.split_counts.at("train") == 6);
  CHECK(s.corrupt.empty());
  CHECK(s.mean_nodes == doctest::Approx(2.0));
  CHECK(s.mean_edges == doctest::Approx(1.0));
  CHECK(s.node_histogram.at(0) == 10);
}

TEST_CASE("missing split assignment") {
  TempDir dir("missing");
  SplitTable splits{{"seq0", Split::Train}};
  try {
    write_dataset({tiny_example("seq0"), tiny_example("seq1")}, splits, dir.path, CompilerConfig{});
    FAIL("wrote a dataset with an unassigned sequence");
  } catch (const MissingSplitError& e) {
    CHECK(e.sequence() == "seq1");
  }
}

TEST_CASE("rewrites remove stale records") {
  TempDir dir("stale");
  SplitTable splits{{"a", Split::Train}, {"b", Split::Train}};
  write_dataset({tiny_example("a"), tiny_example("b")}, splits, dir.path, CompilerConfig{});
  const auto first = tree(dir.path);
  write_dataset({tiny_example("a")}, splits, dir.path, CompilerConfig{});
  const auto second = tree(dir.path);
  CHECK(second.size() == 2);
  CHECK(second.count("train/b_car_4.skgx") == 0);
  CHECK(second.at("train/a_car_4.skgx") == first.at("train/a_car_4.skgx"));
}

TEST_CASE("corrupt records are listed and the rest counted") {
  TempDir dir("corrupt");
  SplitTable splits{{"a", Split::Val}, {"b", Split::Val}};
  write_dataset({tiny_example("a"), tiny_example("b")}, splits, dir.path, CompilerConfig{});
  fs::resize_file(dir.path / "val/b_car_4.skgx", 20);
  const DatasetStats s = dataset_stats(dir.path);
  CHECK(s.split_counts.at("val") == 1);
  REQUIRE(s.corrupt.size() == 1);
  CHECK(s.corrupt[0].first == "val/b_car_4.skgx");
  CHECK(stats_to_json(s).find("b_car_4") != std::string::npos);
}

TEST_CASE("synthetic pipeline writes identical trees twice") {
  const auto sc = synth::generate(synth::template_from_spec("intersection"), 11, 10.0);
  const World w = compile_world(sc.map, sc.trips, CompilerConfig{}, 1);
  const Extractor ex(w.graph, CompilerConfig{});
  const auto examples = ex.build_examples(ex.select_all_targets(), 2);
  REQUIRE(!examples.empty());
  SplitTable splits;
  for (const auto& id : ex.sequences()) splits[id] = Split::Test;
  TempDir a("tree_a");
  TempDir b("tree_b");
  write_dataset(examples, splits, a.path, CompilerConfig{}, 1);
  write_dataset(examples, splits, b.path, CompilerConfig{}, 3);
  CHECK(tree(a.path) == tree(b.path));
  for (const auto& e : examples) {
    CHECK(read_example_file(a.path / "test" / example_file_name(e)) == e.quantized());
  }
}
