"""File formats: component, ontology, and report documents plus DOT export.

All three formats are JSON with an explicit ``"format_version": 1`` field.
Serializers emit keys and list elements in sorted order, so equal values
produce byte-identical output; ``parse(serialize(v))`` is the identity.
Every invariant violation is detected at parse time and reported as a
SchemaViolation naming the offending path or field; broken JSON or
encodings raise MalformedFile.

Component document::

    {"format_version": 1, "id": "CM1", "name": "...",
     "entities": [{"name": "...", "attributes": ["..."],
                   "associations": [{"target": "...", "label": "..."}],
                   "components": ["..."]}],
     "relations": [{"a": "...", "b": "...", "kind": "synonymy"}]}

``relations`` declares optional semantic relations (synonymy / homonymy /
equivalence) between entities; ``associations`` and ``components`` name
entities of the same document.

Ontology document::

    {"format_version": 1, "id": "Od",
     "concepts": [{"id": "...", "term": "...", "children": ["..."]}],
     "relations": [{"a": "...", "b": "...", "kind": "...",
                    "provenance": "declared"}]}

Relation kinds are synonymy, homonymy, equivalence, part_of; provenance
defaults to "declared".  part_of edges may be omitted (they are derived
from concept children); a part_of edge that contradicts the children is
rejected.  Concepts accept optional ``attributes``, ``associations`` and
``aliases`` keys, which carry component metadata through round trips.

Report documents mirror the Report type; scores are exact fraction
strings such as "1", "0" or "1/2".
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import MalformedFile, SchemaViolation
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
    Ontology,
    Relation,
    Report,
)

FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# low-level helpers


def _load_document(path) -> Any:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise MalformedFile(f"{path}: cannot read file: {exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedFile(f"{path}: not valid UTF-8: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"{path}: invalid JSON: {exc}") from exc


def _expect(condition: bool, context: str, message: str) -> None:
    if not condition:
        raise SchemaViolation(f"{context}: {message}")


def _get(obj: dict, key: str, types, context: str, default=_expect):
    if key not in obj:
        if default is not _expect:
            return default
        raise SchemaViolation(f"{context}: missing field {key!r}")
    value = obj[key]
    if not isinstance(value, types):
        names = types.__name__ if isinstance(types, type) else "/".join(
            t.__name__ for t in types
        )
        raise SchemaViolation(f"{context}: field {key!r} must be {names}")
    return value


def _check_version(doc: Any, context: str) -> None:
    _expect(isinstance(doc, dict), context, "document root must be an object")
    version = _get(doc, "format_version", int, context)
    _expect(
        version == FORMAT_VERSION,
        context,
        f"unsupported format_version {version} (expected {FORMAT_VERSION})",
    )


def _string_list(obj: dict, key: str, context: str) -> tuple[str, ...]:
    values = _get(obj, key, list, context, default=[])
    for index, value in enumerate(values):
        _expect(isinstance(value, str), context, f"{key}[{index}] must be a string")
    return tuple(values)


def _dumps(document: dict) -> bytes:
    return (
        json.dumps(document, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    ).encode("utf-8")


# ---------------------------------------------------------------------------
# components


def parse_component(path) -> BusinessComponent:
    """Read and validate one component document."""
    doc = _load_document(path)
    context = str(path)
    _check_version(doc, context)
    component_id = _get(doc, "id", str, context)
    name = _get(doc, "name", str, context)
    entities = []
    raw_entities = _get(doc, "entities", list, context)
    for index, raw in enumerate(raw_entities):
        ectx = f"{context}: entities[{index}]"
        _expect(isinstance(raw, dict), ectx, "entity must be an object")
        associations = []
        for aindex, assoc in enumerate(_get(raw, "associations", list, ectx, default=[])):
            actx = f"{ectx}.associations[{aindex}]"
            _expect(isinstance(assoc, dict), actx, "association must be an object")
            associations.append(
                Association(
                    target=_get(assoc, "target", str, actx),
                    label=_get(assoc, "label", str, actx),
                )
            )
        entities.append(
            Entity(
                name=_get(raw, "name", str, ectx),
                attributes=_string_list(raw, "attributes", ectx),
                associations=tuple(associations),
                components=_string_list(raw, "components", ectx),
            )
        )
    relations = []
    for index, raw in enumerate(_get(doc, "relations", list, context, default=[])):
        rctx = f"{context}: relations[{index}]"
        _expect(isinstance(raw, dict), rctx, "relation must be an object")
        relations.append(
            ComponentRelation(
                a=_get(raw, "a", str, rctx),
                b=_get(raw, "b", str, rctx),
                kind=_get(raw, "kind", str, rctx),
            )
        )
    try:
        return BusinessComponent(
            id=component_id, name=name,
            entities=tuple(entities), relations=tuple(relations),
        )
    except SchemaViolation as exc:
        raise SchemaViolation(f"{context}: {exc}") from exc


def serialize_component(bc: BusinessComponent) -> bytes:
    """Canonical bytes for a component document."""
    return _dumps(
        {
            "format_version": FORMAT_VERSION,
            "id": bc.id,
            "name": bc.name,
            "entities": [
                {
                    "name": entity.name,
                    "attributes": list(entity.attributes),
                    "associations": [
                        {"target": a.target, "label": a.label}
                        for a in entity.associations
                    ],
                    "components": list(entity.components),
                }
                for entity in bc.entities
            ],
            "relations": [
                {"a": r.a, "b": r.b, "kind": r.kind} for r in bc.relations
            ],
        }
    )


# ---------------------------------------------------------------------------
# ontologies


def parse_ontology(path) -> Ontology:
    """Read and validate one ontology document."""
    doc = _load_document(path)
    context = str(path)
    _check_version(doc, context)
    ontology_id = _get(doc, "id", str, context)
    concepts = []
    for index, raw in enumerate(_get(doc, "concepts", list, context)):
        cctx = f"{context}: concepts[{index}]"
        _expect(isinstance(raw, dict), cctx, "concept must be an object")
        associations = []
        for aindex, assoc in enumerate(_get(raw, "associations", list, cctx, default=[])):
            actx = f"{cctx}.associations[{aindex}]"
            _expect(isinstance(assoc, dict), actx, "association must be an object")
            associations.append(
                Association(
                    target=_get(assoc, "target", str, actx),
                    label=_get(assoc, "label", str, actx),
                )
            )
        concepts.append(
            Concept(
                id=_get(raw, "id", str, cctx),
                term=_get(raw, "term", str, cctx),
                children=_string_list(raw, "children", cctx),
                attributes=_string_list(raw, "attributes", cctx),
                associations=tuple(associations),
                aliases=_string_list(raw, "aliases", cctx),
            )
        )
    relations = []
    for index, raw in enumerate(_get(doc, "relations", list, context, default=[])):
        rctx = f"{context}: relations[{index}]"
        _expect(isinstance(raw, dict), rctx, "relation must be an object")
        try:
            relations.append(
                Relation(
                    a=_get(raw, "a", str, rctx),
                    b=_get(raw, "b", str, rctx),
                    kind=_get(raw, "kind", str, rctx),
                    provenance=_get(raw, "provenance", str, rctx, default="declared"),
                )
            )
        except SchemaViolation as exc:
            raise SchemaViolation(f"{rctx}: {exc}") from exc
    try:
        ontology = Ontology(ontology_id, concepts=concepts, relations=relations)
        ontology.validate()
    except SchemaViolation as exc:
        raise SchemaViolation(f"{context}: {exc}") from exc
    return ontology


def serialize_ontology(ontology: Ontology) -> bytes:
    """Canonical bytes for an ontology document (part_of edges included)."""
    concepts = []
    for cid in sorted(ontology.concepts):
        concept = ontology.concepts[cid]
        entry: dict[str, Any] = {
            "id": concept.id,
            "term": concept.term,
            "children": list(concept.children),
        }
        if concept.attributes:
            entry["attributes"] = list(concept.attributes)
        if concept.associations:
            entry["associations"] = [
                {"target": a.target, "label": a.label} for a in concept.associations
            ]
        if concept.aliases:
            entry["aliases"] = list(concept.aliases)
        concepts.append(entry)
    return _dumps(
        {
            "format_version": FORMAT_VERSION,
            "id": ontology.id,
            "concepts": concepts,
            "relations": [r.to_dict() for r in ontology.relations],
        }
    )


# ---------------------------------------------------------------------------
# reports


def serialize_report(report: Report) -> bytes:
    """Canonical bytes for a report document.

    Scores are exact fraction strings; every list is sorted by its
    primary key.
    """
    return _dumps(
        {
            "format_version": FORMAT_VERSION,
            "correspondences": [
                {
                    "c1": corr.c1,
                    "c2": corr.c2,
                    "score": str(corr.score),
                    "verdict": corr.verdict,
                    "evidence": {
                        "kind": corr.evidence.kind,
                        "relations_used": [
                            r.to_dict() for r in corr.evidence.relations_used
                        ],
                    },
                }
                for corr in sorted(report.correspondences, key=lambda c: c.pair)
            ],
            "enrichments": [
                {
                    "pair": list(record.pair),
                    "injected": record.injected.to_dict(),
                    "evidence": [r.to_dict() for r in record.evidence],
                }
                for record in sorted(
                    report.enrichments, key=lambda r: (r.pair, r.injected)
                )
            ],
            "clusters": [
                {
                    "term": cluster.term,
                    "members": list(cluster.members),
                    "aliases": list(cluster.aliases),
                }
                for cluster in sorted(
                    report.clusters, key=lambda cl: (cl.term, cl.members)
                )
            ],
            "warnings": sorted(report.warnings),
        }
    )


def parse_report(path) -> Report:
    """Read a report document back into memory (the serializer's inverse)."""
    doc = _load_document(path)
    context = str(path)
    _check_version(doc, context)
    correspondences = []
    for index, raw in enumerate(_get(doc, "correspondences", list, context)):
        cctx = f"{context}: correspondences[{index}]"
        _expect(isinstance(raw, dict), cctx, "correspondence must be an object")
        evidence_raw = _get(raw, "evidence", dict, cctx)
        try:
            score = Fraction(_get(raw, "score", str, cctx))
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaViolation(f"{cctx}: bad score: {exc}") from exc
        correspondences.append(
            Correspondence(
                c1=_get(raw, "c1", str, cctx),
                c2=_get(raw, "c2", str, cctx),
                score=score,
                verdict=_get(raw, "verdict", str, cctx),
                evidence=Evidence(
                    kind=_get(evidence_raw, "kind", str, cctx),
                    relations_used=tuple(
                        Relation.from_dict(r)
                        for r in _get(evidence_raw, "relations_used", list, cctx, default=[])
                    ),
                ),
            )
        )
    enrichments = []
    for index, raw in enumerate(_get(doc, "enrichments", list, context, default=[])):
        ectx = f"{context}: enrichments[{index}]"
        _expect(isinstance(raw, dict), ectx, "enrichment must be an object")
        pair = _get(raw, "pair", list, ectx)
        _expect(
            len(pair) == 2 and all(isinstance(p, str) for p in pair),
            ectx,
            "pair must hold two concept ids",
        )
        enrichments.append(
            EnrichmentRecord(
                injected=Relation.from_dict(_get(raw, "injected", dict, ectx)),
                evidence=tuple(
                    Relation.from_dict(r)
                    for r in _get(raw, "evidence", list, ectx, default=[])
                ),
                pair=(pair[0], pair[1]),
            )
        )
    clusters = []
    for index, raw in enumerate(_get(doc, "clusters", list, context, default=[])):
        clctx = f"{context}: clusters[{index}]"
        _expect(isinstance(raw, dict), clctx, "cluster must be an object")
        clusters.append(
            Cluster(
                term=_get(raw, "term", str, clctx),
                members=_string_list(raw, "members", clctx),
                aliases=_string_list(raw, "aliases", clctx),
            )
        )
    return Report(
        correspondences=correspondences,
        enrichments=enrichments,
        clusters=clusters,
        warnings=list(_string_list(doc, "warnings", context)),
    )


# ---------------------------------------------------------------------------
# DOT export


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(ontology: Ontology) -> bytes:
    """Render an ontology as a DOT digraph for inspection.

    Concepts become nodes labeled with their terms; part_of edges are
    directed, the symmetric kinds undirected, each labeled with its kind.
    """
    lines = [f'digraph "{_dot_escape(ontology.id)}" {{']
    for cid in sorted(ontology.concepts):
        concept = ontology.concepts[cid]
        lines.append(f'  "{_dot_escape(cid)}" [label="{_dot_escape(concept.term)}"];')
    for relation in ontology.relations:
        arrow = (
            f'  "{_dot_escape(relation.a)}" -> "{_dot_escape(relation.b)}"'
            f' [label="{relation.kind}"'
        )
        if relation.kind != "part_of":
            arrow += ", dir=none"
        lines.append(arrow + "];")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")
