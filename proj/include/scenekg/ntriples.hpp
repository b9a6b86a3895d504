#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>

#include "scenekg/kg.hpp"

namespace scenekg {

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kWktLiteral = "http://www.opengis.net/ont/geosparql#wktLiteral";

/// urn:nskg:<Type>:<percent-encoded id>
std::string node_iri(NodeType type, std::string_view id);
std::string class_iri(NodeType type);
std::string property_iri(std::string_view name);

/// Writes every triple sorted by (subject, predicate, object); returns the count.
std::size_t export_ntriples(const KnowledgeGraph& g, std::ostream& sink);
std::string to_ntriples(const KnowledgeGraph& g);

/// Inverse of export_ntriples. Edges are re-checked against their signatures.
KnowledgeGraph parse_ntriples(std::string_view text);

}  // namespace scenekg
