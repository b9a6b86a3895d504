"""Traffic-scene knowledge graph compiler and per-target graph dataset extractor."""

from ._core import (
    Example,
    ExtractError,
    Graph,
    MissingSplitError,
    ParseError,
    RecordError,
    ReferenceError,
    RenderError,
    SynthError,
    dataset_stats,
    default_config,
    feature_schema,
    feature_schema_digest,
    generate_scenario,
    read_example,
    schema_rules,
    write_dataset,
)

__all__ = [
    "Example",
    "ExtractError",
    "Graph",
    "MissingSplitError",
    "ParseError",
    "RecordError",
    "ReferenceError",
    "RenderError",
    "SynthError",
    "dataset_stats",
    "default_config",
    "feature_schema",
    "feature_schema_digest",
    "generate_scenario",
    "read_example",
    "schema_rules",
    "write_dataset",
]
