"""ontomerge: integrate business-component models through ontology alignment.

Component models are turned into small ontologies, aligned pairwise
against a support (domain) ontology to detect synonym and homonym naming
conflicts, merged into one result component, and the support ontology is
enriched with the relations inferred along the way.
"""

from .errors import (
    ArityTooLarge,
    CyclicComposition,
    EmptyTerm,
    HomonymClusterCollision,
    InfeasibleSpec,
    IntegrationError,
    MalformedFile,
    ScenarioMismatch,
    SchemaViolation,
)
from .model import (
    Association,
    BusinessComponent,
    Cluster,
    ComponentRelation,
    Concept,
    Correspondence,
    EnrichmentRecord,
    Entity,
    Evidence,
    MappingEntry,
    MergeResult,
    Ontology,
    Relation,
    Report,
)
from .enrichment import enrich, find_direct_relation, infer_via_children, infer_via_equivalents
from .evalgen import GroundTruth, ScenarioSpec, evaluate, generate_scenario
from .integrator import align, build_clusters, integrate, merge
from .model_io import (
    export_dot,
    parse_component,
    parse_ontology,
    parse_report,
    serialize_component,
    serialize_ontology,
    serialize_report,
)
from .similarity import (
    lookup_relations,
    normalize_term,
    semantic_similarity,
    syntactic_similarity,
)
from .transform import component_to_ontology, ontology_to_component

__version__ = "0.1.0"

__all__ = [
    "ArityTooLarge",
    "Association",
    "BusinessComponent",
    "Cluster",
    "ComponentRelation",
    "Concept",
    "Correspondence",
    "CyclicComposition",
    "EmptyTerm",
    "EnrichmentRecord",
    "Entity",
    "Evidence",
    "GroundTruth",
    "HomonymClusterCollision",
    "InfeasibleSpec",
    "IntegrationError",
    "MalformedFile",
    "MappingEntry",
    "MergeResult",
    "Ontology",
    "Relation",
    "Report",
    "ScenarioMismatch",
    "ScenarioSpec",
    "SchemaViolation",
    "align",
    "build_clusters",
    "component_to_ontology",
    "enrich",
    "evaluate",
    "export_dot",
    "find_direct_relation",
    "generate_scenario",
    "infer_via_children",
    "infer_via_equivalents",
    "integrate",
    "lookup_relations",
    "merge",
    "normalize_term",
    "ontology_to_component",
    "parse_component",
    "parse_ontology",
    "parse_report",
    "semantic_similarity",
    "serialize_component",
    "serialize_ontology",
    "serialize_report",
    "syntactic_similarity",
]
