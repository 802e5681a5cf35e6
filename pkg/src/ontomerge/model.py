"""Core data model: business components, ontologies, and alignment artifacts.

All collection-valued fields are kept in a canonical sorted order at
construction time so that structural equality, serialization determinism,
and round-trips line up without per-call sorting.  Every structural
invariant is checked eagerly; a value that constructs successfully is
valid.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, NamedTuple

from .errors import SchemaViolation
from .terms import name_sort_key, normalize_term

RELATION_KINDS = ("equivalence", "homonymy", "part_of", "synonymy")
SEMANTIC_KINDS = ("equivalence", "homonymy", "synonymy")
PROVENANCES = ("declared", "inferred_case1", "inferred_case2", "inferred_case3")
VERDICTS = ("Distinct", "Homonym", "Identical", "Synonym")
EVIDENCE_KINDS = ("enriched", "od_homonymy", "od_synonymy", "syntactic")


@dataclass(frozen=True, order=True)
class Relation:
    """A typed semantic edge between two concepts.

    Semantic kinds (synonymy, homonymy, equivalence) are symmetric and
    stored once per unordered pair: endpoints are swapped into sorted
    order on construction.  part_of is directed composite -> child.
    """

    a: str
    b: str
    kind: str
    provenance: str = "declared"

    def __post_init__(self):
        if self.kind not in RELATION_KINDS:
            raise SchemaViolation(f"unknown relation kind {self.kind!r}")
        if self.provenance not in PROVENANCES:
            raise SchemaViolation(f"unknown relation provenance {self.provenance!r}")
        if self.a == self.b:
            raise SchemaViolation(f"relation may not join a concept to itself: {self.a!r}")
        if self.kind in SEMANTIC_KINDS and self.b < self.a:
            low, high = self.b, self.a
            object.__setattr__(self, "a", low)
            object.__setattr__(self, "b", high)

    @property
    def key(self) -> tuple[str, str, str]:
        """Identity of the edge: canonical endpoints plus kind."""
        return (self.a, self.b, self.kind)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "kind": self.kind, "provenance": self.provenance}

    @classmethod
    def from_dict(cls, data: dict) -> "Relation":
        return cls(
            a=data["a"],
            b=data["b"],
            kind=data["kind"],
            provenance=data.get("provenance", "declared"),
        )


class Association(NamedTuple):
    """An entity association carried through as opaque metadata."""

    target: str
    label: str


@dataclass
class Concept:
    """A node in an ontology: a term plus optional composition children.

    A concept with no children is atomic.  ``attributes``, ``associations``
    and ``aliases`` carry component metadata through transformation and
    merging; they play no role in similarity.
    """

    id: str
    term: str
    children: tuple[str, ...] = ()
    attributes: tuple[str, ...] = ()
    associations: tuple[Association, ...] = ()
    aliases: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise SchemaViolation("concept id must be nonempty")
        normalize_term(self.term)  # raises EmptyTerm on blank terms
        self.children = tuple(sorted(self.children))
        if len(set(self.children)) != len(self.children):
            raise SchemaViolation(f"concept {self.id!r} lists a duplicate child")
        if self.id in self.children:
            raise SchemaViolation(f"concept {self.id!r} lists itself as a child")
        self.attributes = tuple(sorted(self.attributes))
        self.associations = tuple(sorted(Association(*a) for a in self.associations))
        self.aliases = tuple(sorted(self.aliases, key=name_sort_key))

    @property
    def is_atomic(self) -> bool:
        return not self.children

    def copy(self) -> "Concept":
        return replace(self)


class Ontology:
    """A concept graph with typed semantic relations.

    part_of edges are derived from concept children and kept in sync
    automatically; adding a part_of relation that does not match a
    composition link is rejected.  Duplicate semantic relations (same
    unordered endpoint pair and kind) and synonymy/homonymy coexistence
    on one concept pair are rejected as well.
    """

    def __init__(self, id: str, concepts: Iterable[Concept] = (), relations: Iterable[Relation] = ()):
        if not id:
            raise SchemaViolation("ontology id must be nonempty")
        self.id = id
        self.concepts: dict[str, Concept] = {}
        self._relations: dict[tuple[str, str, str], Relation] = {}
        for concept in concepts:
            self.add_concept(concept)
        for relation in relations:
            self.add_relation(relation)

    @property
    def relations(self) -> tuple[Relation, ...]:
        """All relations, including derived part_of edges, in sorted order."""
        return tuple(sorted(self._relations.values()))

    def add_concept(self, concept: Concept) -> None:
        if concept.id in self.concepts:
            raise SchemaViolation(f"duplicate concept id {concept.id!r} in ontology {self.id!r}")
        self.concepts[concept.id] = concept
        for child in concept.children:
            self._relations[(concept.id, child, "part_of")] = Relation(
                concept.id, child, "part_of"
            )

    def add_relation(self, relation: Relation) -> None:
        if relation.kind == "part_of":
            # part_of is owned by concept children; accept only matching edges.
            if relation.key in self._relations:
                return
            raise SchemaViolation(
                f"part_of relation {relation.a!r} -> {relation.b!r} does not match "
                "any composition link"
            )
        for endpoint in (relation.a, relation.b):
            if endpoint not in self.concepts:
                raise SchemaViolation(
                    f"relation endpoint {endpoint!r} is not a concept of ontology {self.id!r}"
                )
        if relation.key in self._relations:
            raise SchemaViolation(
                f"duplicate {relation.kind} relation between {relation.a!r} and {relation.b!r}"
            )
        sibling = {"synonymy": "homonymy", "homonymy": "synonymy"}.get(relation.kind)
        if sibling and (relation.a, relation.b, sibling) in self._relations:
            raise SchemaViolation(
                f"concept pair ({relation.a!r}, {relation.b!r}) cannot carry both "
                "synonymy and homonymy"
            )
        self._relations[relation.key] = relation

    def has_relation(self, relation: Relation) -> bool:
        return relation.key in self._relations

    def validate(self) -> None:
        """Check cross-concept invariants: child references and acyclicity."""
        for concept in self.concepts.values():
            for child in concept.children:
                if child not in self.concepts:
                    raise SchemaViolation(
                        f"concept {concept.id!r} references unknown child {child!r}"
                    )
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        state: dict[str, int] = {}  # 1 = on stack, 2 = done

        def visit(node: str, trail: tuple[str, ...]) -> None:
            mark = state.get(node)
            if mark == 2:
                return
            if mark == 1:
                cycle = trail[trail.index(node):] + (node,)
                raise SchemaViolation(
                    "composition cycle: " + " -> ".join(cycle)
                )
            state[node] = 1
            for child in self.concepts[node].children:
                if child in self.concepts:
                    visit(child, trail + (node,))
            state[node] = 2

        for cid in sorted(self.concepts):
            visit(cid, ())

    def concepts_by_term(self, normalized: str) -> list[Concept]:
        """All concepts whose normalized term equals ``normalized``, by id."""
        found = [
            c for c in self.concepts.values() if normalize_term(c.term) == normalized
        ]
        return sorted(found, key=lambda c: c.id)

    def term_present(self, normalized: str) -> bool:
        return any(
            normalize_term(c.term) == normalized for c in self.concepts.values()
        )

    def copy(self) -> "Ontology":
        clone = Ontology(self.id)
        for concept in self.concepts.values():
            clone.add_concept(concept.copy())
        clone._relations = dict(self._relations)
        return clone

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ontology):
            return NotImplemented
        return (
            self.id == other.id
            and self.concepts == other.concepts
            and self._relations == other._relations
        )

    def __repr__(self) -> str:
        return (
            f"Ontology(id={self.id!r}, concepts={len(self.concepts)}, "
            f"relations={len(self._relations)})"
        )


def find_owner(ontologies: Iterable[Ontology], concept_id: str) -> Ontology:
    """Return the ontology that contains ``concept_id``."""
    for ontology in ontologies:
        if concept_id in ontology.concepts:
            return ontology
    raise KeyError(f"concept {concept_id!r} not found in any given ontology")


class ComponentRelation(NamedTuple):
    """A semantic relation declared between two entities of a component."""

    a: str
    b: str
    kind: str


@dataclass
class Entity:
    """A named entity of a business component."""

    name: str
    attributes: tuple[str, ...] = ()
    associations: tuple[Association, ...] = ()
    components: tuple[str, ...] = ()

    def __post_init__(self):
        normalize_term(self.name)
        self.attributes = tuple(sorted(self.attributes))
        self.associations = tuple(sorted(Association(*a) for a in self.associations))
        self.components = tuple(sorted(self.components, key=name_sort_key))
        seen = set()
        for child in self.components:
            key = normalize_term(child)
            if key == normalize_term(self.name):
                raise SchemaViolation(
                    f"entity {self.name!r} lists itself among its composition children"
                )
            if key in seen:
                raise SchemaViolation(
                    f"entity {self.name!r} lists duplicate composition child {child!r}"
                )
            seen.add(key)


@dataclass
class BusinessComponent:
    """One source model: a set of entities plus declared semantic relations.

    Invariants checked on construction:

    * entity names are unique after term normalization;
    * every association, composition, and relation endpoint names an
      entity of this component;
    * the composition graph is acyclic;
    * declared relation kinds are semantic (synonymy/homonymy/equivalence)
      and no entity pair carries both synonymy and homonymy.
    """

    id: str
    name: str
    entities: tuple[Entity, ...] = ()
    relations: tuple[ComponentRelation, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise SchemaViolation("component id must be nonempty")
        self.entities = tuple(sorted(self.entities, key=lambda e: name_sort_key(e.name)))
        by_name: dict[str, Entity] = {}
        for entity in self.entities:
            key = normalize_term(entity.name)
            if key in by_name:
                raise SchemaViolation(
                    f"component {self.id!r}: duplicate entity name {entity.name!r}"
                )
            by_name[key] = entity
        for entity in self.entities:
            for association in entity.associations:
                if normalize_term(association.target) not in by_name:
                    raise SchemaViolation(
                        f"component {self.id!r}: association of {entity.name!r} targets "
                        f"undeclared entity {association.target!r}"
                    )
            for child in entity.components:
                if normalize_term(child) not in by_name:
                    raise SchemaViolation(
                        f"component {self.id!r}: composition child {child!r} of "
                        f"{entity.name!r} is not a declared entity"
                    )
        self.relations = tuple(
            sorted(self._canonical_relation(rel, by_name) for rel in self.relations)
        )
        seen_pairs: dict[tuple[str, str], str] = {}
        for rel in self.relations:
            pair = (normalize_term(rel.a), normalize_term(rel.b))
            prev = seen_pairs.get(pair)
            if prev == rel.kind:
                raise SchemaViolation(
                    f"component {self.id!r}: duplicate {rel.kind} relation "
                    f"between {rel.a!r} and {rel.b!r}"
                )
            if {prev, rel.kind} == {"synonymy", "homonymy"}:
                raise SchemaViolation(
                    f"component {self.id!r}: entity pair ({rel.a!r}, {rel.b!r}) "
                    "cannot carry both synonymy and homonymy"
                )
            seen_pairs[pair] = rel.kind
        self._check_composition_acyclic(by_name)

    def _canonical_relation(
        self, rel: ComponentRelation, by_name: dict[str, Entity]
    ) -> ComponentRelation:
        rel = ComponentRelation(*rel)
        if rel.kind not in SEMANTIC_KINDS:
            raise SchemaViolation(
                f"component {self.id!r}: relation kind {rel.kind!r} is not one of "
                f"{SEMANTIC_KINDS}"
            )
        na, nb = normalize_term(rel.a), normalize_term(rel.b)
        for endpoint, raw in ((na, rel.a), (nb, rel.b)):
            if endpoint not in by_name:
                raise SchemaViolation(
                    f"component {self.id!r}: relation endpoint {raw!r} is not a "
                    "declared entity"
                )
        if na == nb:
            raise SchemaViolation(
                f"component {self.id!r}: relation may not join entity {rel.a!r} to itself"
            )
        if nb < na:
            rel = ComponentRelation(rel.b, rel.a, rel.kind)
        return rel

    def _check_composition_acyclic(self, by_name: dict[str, Entity]) -> None:
        state: dict[str, int] = {}

        def visit(key: str, trail: tuple[str, ...]) -> None:
            mark = state.get(key)
            if mark == 2:
                return
            if mark == 1:
                cycle = trail[trail.index(key):] + (key,)
                raise SchemaViolation(
                    f"component {self.id!r}: composition cycle: " + " -> ".join(cycle)
                )
            state[key] = 1
            for child in by_name[key].components:
                visit(normalize_term(child), trail + (key,))
            state[key] = 2

        for key in sorted(by_name):
            visit(key, ())

    def entity(self, name: str) -> Entity:
        """Look an entity up by (normalized) name."""
        wanted = normalize_term(name)
        for entity in self.entities:
            if normalize_term(entity.name) == wanted:
                return entity
        raise KeyError(f"component {self.id!r} has no entity named {name!r}")


@dataclass(frozen=True)
class Evidence:
    """Why a similarity score came out the way it did."""

    kind: str
    relations_used: tuple[Relation, ...] = ()

    def __post_init__(self):
        if self.kind not in EVIDENCE_KINDS:
            raise SchemaViolation(f"unknown evidence kind {self.kind!r}")
        if self.kind in ("od_synonymy", "od_homonymy") and not self.relations_used:
            raise SchemaViolation(
                f"evidence of kind {self.kind!r} must reference at least one relation"
            )


@dataclass(frozen=True)
class Correspondence:
    """The verdict on one cross-component concept pair."""

    c1: str
    c2: str
    score: Fraction
    verdict: str
    evidence: Evidence

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise SchemaViolation(f"unknown verdict {self.verdict!r}")
        if not 0 <= self.score <= 1:
            raise SchemaViolation(f"similarity score {self.score} out of [0, 1]")
        if self.verdict == "Synonym" and (
            self.score != 1 or self.evidence.kind not in ("od_synonymy", "enriched")
        ):
            raise SchemaViolation("Synonym verdict requires score 1 and ontology evidence")
        if self.verdict == "Homonym" and (
            self.score != 0 or self.evidence.kind not in ("od_homonymy", "enriched")
        ):
            raise SchemaViolation("Homonym verdict requires score 0 and ontology evidence")
        if self.verdict == "Identical" and self.evidence.kind != "syntactic":
            raise SchemaViolation("Identical verdict requires syntactic evidence")

    @property
    def pair(self) -> tuple[str, str]:
        return (self.c1, self.c2)


@dataclass(frozen=True)
class EnrichmentRecord:
    """A relation injected into the support ontology, with its justification."""

    injected: Relation
    evidence: tuple[Relation, ...]
    pair: tuple[str, str]

    def __post_init__(self):
        if self.injected.kind not in SEMANTIC_KINDS:
            raise SchemaViolation(
                f"only semantic relations can be injected, not {self.injected.kind!r}"
            )
        if not self.injected.provenance.startswith("inferred_case"):
            raise SchemaViolation(
                f"injected relation must carry inferred provenance, "
                f"got {self.injected.provenance!r}"
            )

    @property
    def case(self) -> str:
        return self.injected.provenance


@dataclass(frozen=True)
class Cluster:
    """A group of concepts realized as a single merged concept."""

    term: str
    members: tuple[str, ...]
    aliases: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(self.members)))
        object.__setattr__(self, "aliases", tuple(sorted(self.aliases, key=name_sort_key)))
        if not self.members:
            raise SchemaViolation("cluster must have at least one member")


@dataclass
class Report:
    """Everything the pipeline found: verdicts, injections, clusters, warnings."""

    correspondences: list[Correspondence] = field(default_factory=list)
    enrichments: list[EnrichmentRecord] = field(default_factory=list)
    clusters: list[Cluster] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def validate(self, concept_ids: Iterable[str]) -> None:
        """Every given concept must appear in exactly one cluster."""
        placed: dict[str, int] = {}
        for cluster in self.clusters:
            for member in cluster.members:
                placed[member] = placed.get(member, 0) + 1
        expected = set(concept_ids)
        missing = sorted(expected - placed.keys())
        if missing:
            raise SchemaViolation(f"concepts missing from clusters: {missing}")
        doubled = sorted(cid for cid, n in placed.items() if n > 1)
        if doubled:
            raise SchemaViolation(f"concepts appear in several clusters: {doubled}")


class MappingEntry(NamedTuple):
    """Where a source concept ended up in the merged ontology."""

    cluster_id: str
    term: str
    aliases: tuple[str, ...]


@dataclass
class MergeResult:
    """Output bundle of the merge step."""

    merged: Ontology
    mapping: dict[str, MappingEntry]
    enriched_od: Ontology
    report: Report


def as_fraction(value) -> Fraction:
    """Coerce thresholds/scores to exact Fractions.

    Floats go through their decimal string form so that a CLI value such
    as 0.75 means exactly 3/4.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)
