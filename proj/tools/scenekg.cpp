// scenekg: compile traffic scenes into a knowledge graph and cut graph datasets.
//
// Exit codes:
//   0   success
//   1   unreadable or malformed input (parse, reference, record or config errors)
//   2   schema violations (suppressed by --allow-violations)
//   3   a sequence has no split assignment
//   64  usage error

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "scenekg/config.hpp"
#include "scenekg/dataset_io.hpp"
#include "scenekg/extract.hpp"
#include "scenekg/log.hpp"
#include "scenekg/ntriples.hpp"
#include "scenekg/parallel.hpp"
#include "scenekg/pipeline.hpp"
#include "scenekg/render.hpp"
#include "scenekg/synthgen.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace scenekg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitViolations = 2;
constexpr int kExitMissingSplit = 3;
constexpr int kExitUsage = 64;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw InputError("cannot write " + path.string());
}

struct Options {
  bool json = false;
  unsigned jobs = 0;
  std::string map;
  std::string trips;
  std::string config;
  std::string splits;
  std::string kg;
  std::string out;
  std::string scene;
  std::string example;
  std::string dataset;
  std::string tpl = "straight";
  std::uint64_t seed = 0;
  double duration = 20.0;
  bool allow_violations = false;
};

CompilerConfig load_config(const Options& o) {
  if (o.config.empty()) return {};
  try {
    return parse_config(read_file(o.config));
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(o.config + ": " + e.what());
  }
}

World load_world(const Options& o, const CompilerConfig& cfg) {
  if (o.map.empty() || o.trips.empty()) throw UsageError("--map and --trips are required");
  RawMapBundle map;
  RawTripSet trips;
  try {
    map = parse_map_bundle(read_file(o.map));
  } catch (const ParseError& e) {
    throw InputError(o.map + ": " + e.what());
  }
  try {
    trips = parse_trip_log(read_file(o.trips));
  } catch (const ParseError& e) {
    throw InputError(o.trips + ": " + e.what());
  }
  const ValidationReport report = validate_raw(map, trips);
  for (const auto& issue : report.issues) {
    const bool err = issue.severity == ValidationIssue::Severity::Error;
    log::write(err ? log::Level::Error : log::Level::Warn, issue.code + ": " + issue.message);
  }
  if (report.error_count() > 0) throw InputError(std::to_string(report.error_count()) + " input validation error(s)");
  World w = compile_world(map, trips, cfg, o.jobs);
  for (const auto& msg : w.warnings) log::warn(msg);
  return w;
}

KnowledgeGraph load_kg(const std::string& path) {
  try {
    return parse_ntriples(read_file(path));
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

/// Prints violations to stderr; true if the caller should stop with exit 2.
bool report_violations(const std::vector<Violation>& violations, bool allow) {
  for (const auto& v : violations) {
    std::string ids;
    for (const auto& id : v.ids) ids += (ids.empty() ? "" : ",") + id;
    std::cerr << "violation " << v.rule << " [" << ids << "]: " << v.message << "\n";
  }
  return !violations.empty() && !allow;
}

void emit(const Options& o, const json& summary, const std::string& human) {
  if (o.json) {
    std::cout << summary.dump() << "\n";
  } else {
    std::cout << human;
  }
}

int cmd_build_kg(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  const CompilerConfig cfg = load_config(o);
  World w = load_world(o, cfg);
  const auto violations = validate_schema(w.graph, schema_options(cfg));
  const bool fail = report_violations(violations, o.allow_violations);
  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw InputError("cannot write " + o.out);
  const std::size_t triples = export_ntriples(w.graph, out);
  out.close();
  json s{{"command", "build-kg"},
         {"nodes", w.graph.node_count()},
         {"edges", w.graph.edge_count()},
         {"triples", triples},
         {"violations", violations.size()}};
  emit(o, s,
       "nodes " + std::to_string(w.graph.node_count()) + "\nedges " + std::to_string(w.graph.edge_count()) + "\ntriples " +
           std::to_string(triples) + "\nviolations " + std::to_string(violations.size()) + "\n");
  return fail ? kExitViolations : kExitOk;
}

int cmd_extract(const Options& o) {
  if (o.out.empty() || o.splits.empty()) throw UsageError("--splits and --out are required");
  const CompilerConfig cfg = load_config(o);
  SplitTable splits;
  try {
    splits = parse_splits(read_file(o.splits));
  } catch (const ParseError& e) {
    throw InputError(o.splits + ": " + e.what());
  }
  World w = load_world(o, cfg);
  const auto violations = validate_schema(w.graph, schema_options(cfg));
  if (report_violations(violations, o.allow_violations)) return kExitViolations;

  Extractor ex(w.graph, cfg);
  const auto targets = ex.select_all_targets();
  if (targets.empty()) log::warn("no eligible targets; writing an empty dataset");
  std::vector<std::string> warnings;
  const auto examples = ex.build_examples(targets, o.jobs, &warnings);
  for (const auto& msg : warnings) log::warn(msg);
  DatasetManifest m;
  try {
    m = write_dataset(examples, splits, o.out, cfg, o.jobs);
  } catch (const MissingSplitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingSplit;
  }
  json counts = json::object();
  std::string human;
  for (const auto& [split, n] : m.split_counts) {
    counts[split] = n;
    human += split + " " + std::to_string(n) + "\n";
  }
  emit(o, {{"command", "extract"}, {"examples", examples.size()}, {"split_counts", counts}, {"schema_digest", m.schema_digest}},
       human);
  return kExitOk;
}

int cmd_validate(const Options& o) {
  const CompilerConfig cfg = load_config(o);
  KnowledgeGraph g;
  if (!o.kg.empty()) {
    g = load_kg(o.kg);
  } else {
    g = std::move(load_world(o, cfg).graph);
  }
  const auto violations = validate_schema(g, schema_options(cfg));
  report_violations(violations, false);
  json by_rule = json::object();
  for (const auto& v : violations) by_rule[v.rule] = by_rule.value(v.rule, 0) + 1;
  emit(o, {{"command", "validate"}, {"nodes", g.node_count()}, {"edges", g.edge_count()}, {"violations", violations.size()},
           {"by_rule", by_rule}},
       "violations " + std::to_string(violations.size()) + "\n");
  return violations.empty() ? kExitOk : kExitViolations;
}

int cmd_stats(const Options& o) {
  if (!o.dataset.empty()) {
    if (!fs::is_directory(o.dataset)) throw InputError(o.dataset + " is not a directory");
    const DatasetStats s = dataset_stats(o.dataset);
    if (o.json) {
      std::cout << stats_to_json(s) << "\n";
    } else {
      for (const auto& [split, n] : s.split_counts) std::cout << split << " " << n << "\n";
      std::cout << "mean_nodes " << s.mean_nodes << "\nmean_edges " << s.mean_edges << "\n";
      for (const auto& [bin, n] : s.node_histogram) std::cout << "nodes[" << bin << ",+100) " << n << "\n";
      for (const auto& [file, reason] : s.corrupt) std::cout << "corrupt " << file << ": " << reason << "\n";
    }
    return kExitOk;
  }
  KnowledgeGraph g;
  if (!o.kg.empty()) {
    g = load_kg(o.kg);
  } else {
    g = std::move(load_world(o, load_config(o)).graph);
  }
  const GraphStats s = stats(g);
  if (o.json) {
    json doc{{"command", "stats"}, {"nodes", s.node_total}, {"edges", s.edge_total}};
    doc["nodes_by_type"] = s.nodes_by_type;
    doc["edges_by_type"] = s.edges_by_type;
    std::cout << doc.dump() << "\n";
  } else {
    std::cout << "nodes " << s.node_total << "\nedges " << s.edge_total << "\n";
    for (const auto& [t, n] : s.nodes_by_type) std::cout << "node " << t << " " << n << "\n";
    for (const auto& [t, n] : s.edges_by_type) std::cout << "edge " << t << " " << n << "\n";
  }
  return kExitOk;
}

int cmd_render(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  std::string svg;
  if (!o.example.empty()) {
    try {
      svg = render_example_svg(read_example_file(o.example));
    } catch (const RecordError& e) {
      throw InputError(o.example + ": " + e.what());
    }
  } else {
    KnowledgeGraph g;
    if (!o.kg.empty()) {
      g = load_kg(o.kg);
    } else {
      g = std::move(load_world(o, load_config(o)).graph);
    }
    std::optional<std::string_view> scene;
    if (!o.scene.empty()) scene = o.scene;
    svg = render_graph_svg(g, scene);
  }
  write_file(o.out, svg);
  emit(o, {{"command", "render"}, {"out", o.out}, {"bytes", svg.size()}}, "wrote " + o.out + "\n");
  return kExitOk;
}

int cmd_synth(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  synth::ScenarioTemplate tpl;
  try {
    tpl = synth::template_from_spec(o.tpl);
  } catch (const synth::SynthError& e) {
    throw UsageError(e.what());
  }
  const synth::Scenario sc = synth::generate(tpl, o.seed, o.duration);
  SplitTable splits;
  std::size_t scenes = 0;
  for (const auto& trip : sc.trips.trips) {
    for (const auto& seq : trip.sequences) {
      splits[seq.id] = Split::Train;
      scenes += seq.scenes.size();
    }
  }
  const fs::path dir(o.out);
  write_file(dir / "map.json", serialize_map_bundle(sc.map));
  write_file(dir / "trips.jsonl", serialize_trip_log(sc.trips));
  write_file(dir / "splits.json", serialize_splits(splits));
  emit(o, {{"command", "synth"}, {"template", o.tpl}, {"seed", o.seed}, {"lanes", sc.map.lanes.size()},
           {"connectors", sc.map.connectors.size()}, {"scenes", scenes}},
       "lanes " + std::to_string(sc.map.lanes.size()) + "\nconnectors " + std::to_string(sc.map.connectors.size()) +
           "\nscenes " + std::to_string(scenes) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  log::threshold();
  Options o;
  CLI::App app{"Compile traffic scenes into a knowledge graph and graph-learning datasets"};
  app.require_subcommand(1);
  app.add_flag("--json", o.json, "Print one JSON summary line on stdout");
  app.add_option("--jobs,-j", o.jobs, "Worker threads (0 = all cores)");

  auto inputs = [&](CLI::App* c) {
    c->add_option("--map", o.map, "Map bundle JSON");
    c->add_option("--trips", o.trips, "Trip log JSONL");
    c->add_option("--config", o.config, "Compiler config JSON");
  };
  auto* build = app.add_subcommand("build-kg", "Compile map and trips to N-Triples");
  inputs(build);
  build->add_option("--out", o.out, "Output .nt file");
  build->add_flag("--allow-violations", o.allow_violations, "Exit 0 even if the schema check fails");

  auto* extract = app.add_subcommand("extract", "Cut per-target graph examples into a dataset tree");
  inputs(extract);
  extract->add_option("--splits", o.splits, "Sequence to split assignment JSON");
  extract->add_option("--out", o.out, "Dataset directory");
  extract->add_flag("--allow-violations", o.allow_violations, "Extract even if the schema check fails");

  auto* validate = app.add_subcommand("validate", "Check a graph against the ontology axioms");
  inputs(validate);
  validate->add_option("--kg", o.kg, "N-Triples file instead of map and trips");

  auto* stat = app.add_subcommand("stats", "Graph or dataset statistics");
  inputs(stat);
  stat->add_option("--kg", o.kg, "N-Triples file");
  stat->add_option("--dataset", o.dataset, "Dataset directory");

  auto* render = app.add_subcommand("render", "Write an SVG of a scene or an example");
  inputs(render);
  render->add_option("--kg", o.kg, "N-Triples file");
  render->add_option("--scene", o.scene, "Scene id; omit for the map alone");
  render->add_option("--example", o.example, "Example record (.skgx)");
  render->add_option("--out", o.out, "Output .svg");

  auto* syn = app.add_subcommand("synth", "Generate a synthetic map, trip log and split table");
  syn->add_option("--template", o.tpl, "straight|curved|intersection|parking|city[:key=value,...]");
  syn->add_option("--seed", o.seed, "Random seed");
  syn->add_option("--duration", o.duration, "Seconds of 2 Hz scenes");
  syn->add_option("--out", o.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (o.jobs == 0) o.jobs = resolve_jobs(0);
    if (*build) return cmd_build_kg(o);
    if (*extract) return cmd_extract(o);
    if (*validate) return cmd_validate(o);
    if (*stat) return cmd_stats(o);
    if (*render) return cmd_render(o);
    if (*syn) return cmd_synth(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    // Parse, reference, record, render and config errors all land here.
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}
