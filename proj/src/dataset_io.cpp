#include "scenekg/dataset_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"

#include "scenekg/kg.hpp"
#include "scenekg/parallel.hpp"

namespace scenekg {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr char kMagic[4] = {'S', 'K', 'G', 'X'};
constexpr char kEndMagic[4] = {'S', 'K', 'G', 'E'};
constexpr std::array<std::string_view, 3> kSplitDirs = {"train", "val", "test"};

class Writer {
 public:
  void raw(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : b_(bytes) {}

  void need(std::size_t n, const char* what) const {
    if (b_.size() - pos_ < n) throw RecordError(std::string("truncated record while reading ") + what, pos_);
  }
  void magic(const char (&m)[4], const char* what) {
    need(4, what);
    if (std::memcmp(b_.data() + pos_, m, 4) != 0) throw RecordError(std::string("bad ") + what, pos_);
    pos_ += 4;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::string str(const char* what) {
    const std::uint32_t n = u32(what);
    need(n, what);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  /// Guards element counts against the bytes that remain.
  std::uint32_t count(const char* what, std::size_t min_bytes_each) {
    const std::size_t at = pos_;
    const std::uint32_t n = u32(what);
    if (min_bytes_each > 0 && static_cast<std::uint64_t>(n) * min_bytes_each > b_.size() - pos_) {
      throw RecordError(std::string("truncated record: ") + what + " exceeds remaining bytes", at);
    }
    return n;
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == b_.size(); }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '.';
    out.push_back(ok ? c : '-');
  }
  return out;
}

ordered_json schema_json() {
  ordered_json tables = ordered_json::array();
  for (const auto& t : feature_schema()) {
    ordered_json cols = ordered_json::array();
    for (const auto& c : t.columns) {
      static constexpr std::array<const char*, 5> kinds = {"scalar", "pos_x", "pos_y", "yaw", "time_offset"};
      cols.push_back({{"name", c.name}, {"unit", c.unit}, {"frame", kinds[static_cast<std::size_t>(c.kind)]}});
    }
    tables.push_back({{"table", t.table}, {"columns", cols}});
  }
  return {{"version", kFeatureSchemaVersion}, {"tables", tables}};
}

ordered_json index_tables() {
  ordered_json cats = ordered_json::array();
  for (std::size_t i = 0; i < kCategoryCount; ++i) cats.push_back(to_string(static_cast<Category>(i)));
  ordered_json dividers = ordered_json::array();
  for (std::size_t i = 0; i < kDividerTypeCount; ++i) dividers.push_back(to_string(static_cast<DividerType>(i)));
  ordered_json stops = ordered_json::array();
  for (std::size_t i = 0; i < kStopTypeCount; ++i) stops.push_back(to_string(stop_area_type_for(static_cast<StopType>(i))));
  return {{"category_index", cats},
          {"divider_index", dividers},
          {"subtype_index", stops},
          {"tl_type_index", {"H", "V"}}};
}

}  // namespace

RecordError::RecordError(const std::string& message, std::size_t offset)
    : std::runtime_error(message + " (byte " + std::to_string(offset) + ")"), offset_(offset) {}

MissingSplitError::MissingSplitError(std::string sequence)
    : std::runtime_error("sequence " + sequence + " has no split assignment"), sequence_(std::move(sequence)) {}

std::vector<std::uint8_t> encode_example(const HetGraphExample& ex) {
  Writer w;
  w.raw(kMagic, 4);
  w.u32(kRecordVersion);
  w.str(ex.sequence);
  w.str(ex.participant);
  w.str(ex.anchor_scene);
  w.u32(static_cast<std::uint32_t>(ex.anchor_index));
  w.u32(static_cast<std::uint32_t>(ex.tables.size()));
  for (const auto& t : ex.tables) {
    w.str(t.name);
    w.u32(static_cast<std::uint32_t>(t.columns.size()));
    for (const auto& c : t.columns) w.str(c);
    w.u32(static_cast<std::uint32_t>(t.rows()));
    for (const auto& id : t.node_ids) w.str(id);
    for (double v : t.data) w.f32(static_cast<float>(v));
  }
  w.u32(static_cast<std::uint32_t>(ex.edges.size()));
  for (const auto& e : ex.edges) {
    w.str(e.src_table);
    w.str(e.relation);
    w.str(e.dst_table);
    w.u32(static_cast<std::uint32_t>(e.pairs.size()));
    for (const auto& [a, b] : e.pairs) {
      w.u32(a);
      w.u32(b);
    }
  }
  w.str(ex.target_table);
  w.u32(ex.target_row);
  w.u32(static_cast<std::uint32_t>(ex.y.size()));
  for (const auto& row : ex.y) {
    w.f64(row[0]);
    w.f64(row[1]);
  }
  w.raw(kEndMagic, 4);
  return w.take();
}

HetGraphExample decode_example(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.magic(kMagic, "magic");
  const std::size_t version_at = r.pos();
  if (const auto v = r.u32("version"); v != kRecordVersion) {
    throw RecordError("unsupported record version " + std::to_string(v), version_at);
  }
  HetGraphExample ex;
  ex.sequence = r.str("sequence");
  ex.participant = r.str("participant");
  ex.anchor_scene = r.str("anchor scene");
  ex.anchor_index = static_cast<int>(r.u32("anchor index"));
  const std::uint32_t tables = r.count("table count", 12);
  for (std::uint32_t i = 0; i < tables; ++i) {
    NodeTable t;
    const std::size_t at = r.pos();
    t.name = r.str("table name");
    const TableSchema* schema = find_table_schema(t.name);
    if (schema == nullptr) throw RecordError("unknown table " + t.name, at);
    const std::uint32_t cols = r.count("column count", 4);
    for (std::uint32_t c = 0; c < cols; ++c) t.columns.push_back(r.str("column name"));
    if (cols != schema->columns.size()) throw RecordError("table " + t.name + " has the wrong column count", at);
    const std::uint32_t rows = r.count("row count", 4 + 4 * static_cast<std::size_t>(cols));
    for (std::uint32_t k = 0; k < rows; ++k) t.node_ids.push_back(r.str("node id"));
    t.data.reserve(static_cast<std::size_t>(rows) * cols);
    for (std::size_t k = 0; k < static_cast<std::size_t>(rows) * cols; ++k) t.data.push_back(r.f32("feature"));
    ex.tables.push_back(std::move(t));
  }
  auto rows_of = [&](const std::string& name, std::size_t at) -> std::size_t {
    if (const NodeTable* t = ex.table(name)) return t->rows();
    throw RecordError("edge list refers to missing table " + name, at);
  };
  const std::uint32_t lists = r.count("edge list count", 16);
  for (std::uint32_t i = 0; i < lists; ++i) {
    const std::size_t at = r.pos();
    EdgeList e;
    e.src_table = r.str("edge source table");
    e.relation = r.str("edge relation");
    e.dst_table = r.str("edge target table");
    const std::size_t src_rows = rows_of(e.src_table, at);
    const std::size_t dst_rows = rows_of(e.dst_table, at);
    const std::uint32_t n = r.count("edge count", 8);
    e.pairs.reserve(n);
    for (std::uint32_t k = 0; k < n; ++k) {
      const std::size_t pair_at = r.pos();
      const std::uint32_t a = r.u32("edge source");
      const std::uint32_t b = r.u32("edge target");
      if (a >= src_rows || b >= dst_rows) throw RecordError("edge index out of range", pair_at);
      e.pairs.emplace_back(a, b);
    }
    ex.edges.push_back(std::move(e));
  }
  const std::size_t target_at = r.pos();
  ex.target_table = r.str("target table");
  ex.target_row = r.u32("target row");
  if (ex.target_row >= rows_of(ex.target_table, target_at)) throw RecordError("target row out of range", target_at);
  const std::uint32_t y_rows = r.count("label rows", 16);
  for (std::uint32_t k = 0; k < y_rows; ++k) {
    const double x = r.f64("label");
    const double y = r.f64("label");
    ex.y.push_back({x, y});
  }
  r.magic(kEndMagic, "end marker");
  if (!r.done()) throw RecordError("trailing bytes after end marker", r.pos());
  return ex;
}

std::size_t write_example(const HetGraphExample& ex, std::ostream& sink) {
  const auto bytes = encode_example(ex);
  sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw std::runtime_error("failed to write example record");
  return bytes.size();
}

HetGraphExample read_example(std::istream& source) {
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  return decode_example(bytes);
}

HetGraphExample read_example_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_example(in);
}

std::string example_file_name(const HetGraphExample& ex) {
  return sanitize(ex.sequence) + "_" + sanitize(ex.participant) + "_" + std::to_string(ex.anchor_index) + ".skgx";
}

std::string feature_schema_json() { return schema_json().dump(); }

std::string feature_schema_digest() {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : feature_schema_json()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DatasetManifest write_dataset(const std::vector<HetGraphExample>& examples, const SplitTable& splits,
                              const fs::path& dir, const CompilerConfig& cfg, unsigned jobs) {
  std::vector<std::string> rel(examples.size());
  std::set<std::string> seen;
  DatasetManifest m;
  m.config = cfg;
  m.schema_digest = feature_schema_digest();
  for (auto name : kSplitDirs) m.split_counts[std::string(name)] = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto it = splits.find(examples[i].sequence);
    if (it == splits.end()) throw MissingSplitError(examples[i].sequence);
    const std::string split(to_string(it->second));
    rel[i] = split + "/" + example_file_name(examples[i]);
    if (!seen.insert(rel[i]).second) throw std::runtime_error("duplicate example file " + rel[i]);
    ++m.split_counts[split];
  }

  fs::create_directories(dir);
  for (auto name : kSplitDirs) {
    const fs::path sub = dir / name;
    fs::create_directories(sub);
    std::vector<fs::path> stale;
    for (const auto& entry : fs::directory_iterator(sub)) {
      if (entry.is_regular_file() && entry.path().extension() == ".skgx") stale.push_back(entry.path());
    }
    for (const auto& p : stale) fs::remove(p);
  }
  parallel_for(examples.size(), jobs, [&](std::size_t i) {
    std::ofstream out(dir / rel[i], std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir / rel[i]).string());
    write_example(examples[i], out);
  });
  m.files = rel;
  std::sort(m.files.begin(), m.files.end());
  std::ofstream manifest(dir / "manifest.json", std::ios::trunc);
  manifest << manifest_to_json(m) << "\n";
  if (!manifest) throw std::runtime_error("cannot write manifest in " + dir.string());
  return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
  ordered_json doc;
  doc["format_version"] = m.format_version;
  doc["config"] = ordered_json::parse(config_to_json(m.config));
  ordered_json counts = ordered_json::object();
  for (auto name : kSplitDirs) {
    const auto it = m.split_counts.find(std::string(name));
    counts[std::string(name)] = it == m.split_counts.end() ? 0 : it->second;
  }
  doc["split_counts"] = counts;
  doc["feature_schema"] = schema_json();
  doc["feature_schema_digest"] = m.schema_digest;
  doc["index_tables"] = index_tables();
  doc["files"] = m.files;
  return doc.dump(2);
}

DatasetManifest read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("no manifest.json in " + dir.string());
  const auto doc = nlohmann::json::parse(in);
  DatasetManifest m;
  m.format_version = doc.at("format_version").get<std::uint32_t>();
  m.config = parse_config(doc.at("config").dump());
  for (const auto& [k, v] : doc.at("split_counts").items()) m.split_counts[k] = v.get<std::size_t>();
  m.schema_digest = doc.at("feature_schema_digest").get<std::string>();
  m.files = doc.at("files").get<std::vector<std::string>>();
  return m;
}

DatasetStats dataset_stats(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + " is not a directory");
  DatasetStats s;
  std::map<std::string, double> row_sums;
  std::size_t valid = 0;
  double nodes = 0.0;
  double edges = 0.0;
  for (auto name : kSplitDirs) {
    s.split_counts[std::string(name)] = 0;
    const fs::path sub = dir / name;
    if (!fs::is_directory(sub)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(sub)) {
      if (entry.is_regular_file() && entry.path().extension() == ".skgx") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      try {
        const HetGraphExample ex = read_example_file(f);
        ++s.split_counts[std::string(name)];
        ++valid;
        const std::size_t n = ex.node_count();
        nodes += static_cast<double>(n);
        edges += static_cast<double>(ex.edge_count());
        ++s.node_histogram[n / DatasetStats::kHistogramBin * DatasetStats::kHistogramBin];
        for (const auto& t : ex.tables) row_sums[t.name] += static_cast<double>(t.rows());
      } catch (const std::exception& e) {
        s.corrupt.emplace_back(fs::relative(f, dir).generic_string(), e.what());
      }
    }
  }
  if (valid > 0) {
    s.mean_nodes = nodes / static_cast<double>(valid);
    s.mean_edges = edges / static_cast<double>(valid);
    for (const auto& [t, sum] : row_sums) s.mean_rows_per_table[t] = sum / static_cast<double>(valid);
  }
  return s;
}

std::string stats_to_json(const DatasetStats& s) {
  ordered_json doc;
  doc["split_counts"] = s.split_counts;
  ordered_json hist = ordered_json::object();
  for (const auto& [bin, count] : s.node_histogram) hist[std::to_string(bin)] = count;
  doc["node_histogram"] = hist;
  doc["mean_nodes"] = s.mean_nodes;
  doc["mean_edges"] = s.mean_edges;
  doc["mean_rows_per_table"] = s.mean_rows_per_table;
  ordered_json corrupt = ordered_json::array();
  for (const auto& [file, reason] : s.corrupt) corrupt.push_back({{"file", file}, {"reason", reason}});
  doc["corrupt"] = corrupt;
  return doc.dump();
}

}  // namespace scenekg
