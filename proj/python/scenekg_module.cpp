#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "scenekg/config.hpp"
#include "scenekg/dataset_io.hpp"
#include "scenekg/extract.hpp"
#include "scenekg/ntriples.hpp"
#include "scenekg/parallel.hpp"
#include "scenekg/pipeline.hpp"
#include "scenekg/render.hpp"
#include "scenekg/synthgen.hpp"

namespace py = pybind11;
using namespace scenekg;

namespace {

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

CompilerConfig config_from(const std::string& text) { return text.empty() ? CompilerConfig{} : parse_config(text); }

struct PyGraph {
  KnowledgeGraph graph;
  CompilerConfig config;
  std::vector<std::string> warnings;
};

py::object attr_to_py(const AttrValue& v) {
  return std::visit(
      [](const auto& x) -> py::object {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, WktLiteral>) {
          return py::str(x.text);
        } else {
          return py::cast(x);
        }
      },
      v);
}

EdgeType edge_type_arg(const std::string& name) {
  const auto t = edge_type_from_string(name);
  if (!t) throw py::value_error("unknown edge type '" + name + "'");
  return *t;
}

py::dict tables_to_py(const HetGraphExample& ex) {
  py::dict out;
  for (const auto& t : ex.tables) {
    py::array_t<double> x({t.rows(), t.columns.size()});
    std::copy(t.data.begin(), t.data.end(), x.mutable_data());
    py::dict d;
    d["columns"] = t.columns;
    d["node_ids"] = t.node_ids;
    d["x"] = x;
    out[py::str(t.name)] = d;
  }
  return out;
}

py::list edges_to_py(const HetGraphExample& ex) {
  py::list out;
  for (const auto& e : ex.edges) {
    py::array_t<std::uint32_t> idx({std::size_t{2}, e.pairs.size()});
    auto r = idx.mutable_unchecked<2>();
    for (std::size_t i = 0; i < e.pairs.size(); ++i) {
      r(0, i) = e.pairs[i].first;
      r(1, i) = e.pairs[i].second;
    }
    py::dict d;
    d["src"] = e.src_table;
    d["relation"] = e.relation;
    d["dst"] = e.dst_table;
    d["index"] = idx;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Traffic-scene knowledge graph compiler and graph dataset extractor";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ReferenceError>(m, "ReferenceError", PyExc_ValueError);
  py::register_exception<RecordError>(m, "RecordError", PyExc_ValueError);
  py::register_exception<MissingSplitError>(m, "MissingSplitError", PyExc_KeyError);
  py::register_exception<synth::SynthError>(m, "SynthError", PyExc_ValueError);
  py::register_exception<RenderError>(m, "RenderError", PyExc_KeyError);
  py::register_exception<ExtractError>(m, "ExtractError", PyExc_RuntimeError);

  m.def(
      "generate_scenario",
      [](const std::string& spec, std::uint64_t seed, double duration_s) {
        const auto sc = synth::generate(synth::template_from_spec(spec), seed, duration_s);
        SplitTable splits;
        for (const auto& trip : sc.trips.trips) {
          for (const auto& seq : trip.sequences) splits[seq.id] = Split::Train;
        }
        py::dict d;
        d["map"] = serialize_map_bundle(sc.map);
        d["trips"] = serialize_trip_log(sc.trips);
        d["splits"] = serialize_splits(splits);
        return d;
      },
      py::arg("template") = "straight", py::arg("seed") = 0, py::arg("duration_s") = 20.0,
      "Synthetic map, trip log and all-train split table as text.");

  py::class_<HetGraphExample>(m, "Example")
      .def_readonly("sequence", &HetGraphExample::sequence)
      .def_readonly("participant", &HetGraphExample::participant)
      .def_readonly("anchor_scene", &HetGraphExample::anchor_scene)
      .def_readonly("anchor_index", &HetGraphExample::anchor_index)
      .def_readonly("target_table", &HetGraphExample::target_table)
      .def_readonly("target_row", &HetGraphExample::target_row)
      .def_property_readonly("y",
                             [](const HetGraphExample& ex) {
                               py::array_t<double> y({ex.y.size(), std::size_t{2}});
                               auto r = y.mutable_unchecked<2>();
                               for (std::size_t i = 0; i < ex.y.size(); ++i) {
                                 r(i, 0) = ex.y[i][0];
                                 r(i, 1) = ex.y[i][1];
                               }
                               return y;
                             })
      .def_property_readonly("tables", &tables_to_py)
      .def_property_readonly("edges", &edges_to_py)
      .def_property_readonly("node_count", &HetGraphExample::node_count)
      .def_property_readonly("edge_count", &HetGraphExample::edge_count)
      .def("quantized", &HetGraphExample::quantized)
      .def("to_bytes",
           [](const HetGraphExample& ex) {
             const auto bytes = encode_example(ex);
             return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
           })
      .def_static("from_bytes",
                  [](const py::bytes& b) {
                    const std::string s = b;
                    return decode_example(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
                  })
      .def("render_svg", &render_example_svg)
      .def("file_name", &example_file_name)
      .def(py::self == py::self)
      .def("__repr__", [](const HetGraphExample& ex) {
        return "<Example " + ex.sequence + "/" + ex.participant + "@" + std::to_string(ex.anchor_index) + " nodes=" +
               std::to_string(ex.node_count()) + ">";
      });

  py::class_<PyGraph>(m, "Graph")
      .def_static(
          "compile",
          [](const std::string& map_json, const std::string& trips_jsonl, const std::string& config_json, unsigned jobs) {
            auto out = std::make_unique<PyGraph>();
            out->config = config_from(config_json);
            const RawMapBundle map = parse_map_bundle(map_json);
            const RawTripSet trips = parse_trip_log(trips_jsonl);
            py::gil_scoped_release release;
            World w = compile_world(map, trips, out->config, resolve_jobs(jobs));
            out->graph = std::move(w.graph);
            out->warnings = std::move(w.warnings);
            return out;
          },
          py::arg("map_json"), py::arg("trips_jsonl"), py::arg("config_json") = "", py::arg("jobs") = 0)
      .def_static(
          "from_ntriples",
          [](const std::string& text, const std::string& config_json) {
            auto out = std::make_unique<PyGraph>();
            out->config = config_from(config_json);
            out->graph = parse_ntriples(text);
            return out;
          },
          py::arg("text"), py::arg("config_json") = "")
      .def_property_readonly("node_count", [](const PyGraph& g) { return g.graph.node_count(); })
      .def_property_readonly("edge_count", [](const PyGraph& g) { return g.graph.edge_count(); })
      .def_readonly("warnings", &PyGraph::warnings)
      .def("to_ntriples", [](const PyGraph& g) { return to_ntriples(g.graph); })
      .def("has_node", [](const PyGraph& g, const std::string& id) { return g.graph.find(id).has_value(); })
      .def("node",
           [](const PyGraph& g, const std::string& id) {
             const auto n = g.graph.find(id);
             if (!n) throw py::key_error(id);
             py::dict attrs;
             for (const auto& [k, v] : g.graph.node(*n).attrs) attrs[py::str(k)] = attr_to_py(v);
             py::dict d;
             d["id"] = id;
             d["type"] = std::string(to_string(g.graph.node(*n).type));
             d["attrs"] = attrs;
             return d;
           })
      .def(
          "neighbors",
          [](const PyGraph& g, const std::string& id, const std::string& edge, const std::string& direction) {
            if (!g.graph.find(id)) throw py::key_error(id);
            const Direction dir = direction == "in" ? Direction::In : Direction::Out;
            return g.graph.neighbors(id, edge_type_arg(edge), dir);
          },
          py::arg("id"), py::arg("edge"), py::arg("direction") = "out")
      .def("ids_of_type",
           [](const PyGraph& g, const std::string& type) {
             const auto t = node_type_from_string(type);
             if (!t) throw py::value_error("unknown node type '" + type + "'");
             std::vector<std::string> ids;
             for (const Node& n : g.graph.nodes()) {
               if (is_a(n.type, *t)) ids.push_back(n.id);
             }
             return ids;
           })
      .def("validate",
           [](const PyGraph& g) {
             py::list out;
             for (const auto& v : validate_schema(g.graph, schema_options(g.config))) {
               py::dict d;
               d["rule"] = v.rule;
               d["ids"] = v.ids;
               d["message"] = v.message;
               out.append(d);
             }
             return out;
           })
      .def("stats",
           [](const PyGraph& g) {
             const GraphStats s = stats(g.graph);
             py::dict d;
             d["nodes"] = s.node_total;
             d["edges"] = s.edge_total;
             d["nodes_by_type"] = s.nodes_by_type;
             d["edges_by_type"] = s.edges_by_type;
             return d;
           })
      .def(
          "render_svg",
          [](const PyGraph& g, std::optional<std::string> scene) {
            return scene ? render_graph_svg(g.graph, std::string_view(*scene)) : render_graph_svg(g.graph);
          },
          py::arg("scene") = py::none())
      .def("targets",
           [](const PyGraph& g) {
             py::list out;
             for (const auto& t : Extractor(g.graph, g.config).select_all_targets()) {
               py::dict d;
               d["participant"] = t.participant;
               d["sequence"] = t.sequence;
               d["anchor_scene"] = t.anchor_scene;
               d["anchor_index"] = t.anchor_index;
               out.append(d);
             }
             return out;
           })
      .def(
          "extract",
          [](const PyGraph& g, unsigned jobs) {
            py::gil_scoped_release release;
            Extractor ex(g.graph, g.config);
            return ex.build_examples(ex.select_all_targets(), resolve_jobs(jobs));
          },
          py::arg("jobs") = 0, "One example per eligible target, in target order.");

  m.def(
      "write_dataset",
      [](const std::vector<HetGraphExample>& examples, const std::string& splits_json, const std::string& dir,
         const std::string& config_json, unsigned jobs) {
        const SplitTable splits = parse_splits(splits_json);
        const CompilerConfig cfg = config_from(config_json);
        DatasetManifest m;
        {
          py::gil_scoped_release release;
          m = write_dataset(examples, splits, dir, cfg, resolve_jobs(jobs));
        }
        return json_loads(manifest_to_json(m));
      },
      py::arg("examples"), py::arg("splits_json"), py::arg("dir"), py::arg("config_json") = "", py::arg("jobs") = 0);
  m.def("read_example", [](const std::string& path) { return read_example_file(path); });
  m.def("dataset_stats", [](const std::string& dir) { return json_loads(stats_to_json(dataset_stats(dir))); });
  m.def("feature_schema", [] { return json_loads(feature_schema_json()); });
  m.def("feature_schema_digest", &feature_schema_digest);
  m.def("default_config", [] { return json_loads(config_to_json(CompilerConfig{})); });
  m.def("schema_rules", [] {
    py::list out;
    for (const auto& r : schema_rules()) {
      py::dict d;
      d["id"] = std::string(r.id);
      d["description"] = std::string(r.description);
      d["axiom"] = r.axiom;
      out.append(d);
    }
    return out;
  });
}
