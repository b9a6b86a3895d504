#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "scenekg/extract.hpp"
#include "scenekg/kg.hpp"

namespace scenekg {

class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Static SVG of the map stored in `g`. With a scene id, that scene's
/// participants are drawn as oriented rectangles and their relations as arcs.
/// Every lane polygon is one `<path class="lane">`. Output is byte-stable.
std::string render_graph_svg(const KnowledgeGraph& g, std::optional<std::string_view> scene = std::nullopt);

/// Nodes of an example at their local-frame positions, edges as lines and the
/// target's future as a polyline.
std::string render_example_svg(const HetGraphExample& ex);

}  // namespace scenekg
