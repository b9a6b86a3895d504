#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scenekg/kg.hpp"

namespace scenekg {

struct Violation {
  std::string rule;
  std::vector<std::string> ids;
  std::string message;
};

struct RuleInfo {
  std::string_view id;
  std::string_view description;
  /// False for generation invariants that are not ontology axioms.
  bool axiom;
};

/// Every rule validate_schema can report, axioms first.
std::span<const RuleInfo> schema_rules();

struct SchemaOptions {
  double is_next_to_m = 4.0;
  int max_crossing_walkways = 2;
  double snippet_max_len_m = 20.0;
};

/// Closed-world check: each axiom is read as an integrity constraint over the
/// data actually present. Violations are sorted by (rule, ids).
std::vector<Violation> validate_schema(const KnowledgeGraph& g, const SchemaOptions& options = {});

}  // namespace scenekg
