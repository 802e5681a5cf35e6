"""Infer missing support-ontology relations from the component ontologies.

When the support ontology has no relation for a concept pair, three cases
are tried in order:

* case 1 - some single source ontology already declares a semantic
  relation between the two terms; it is copied into the support ontology.
* case 2 - each term has a declared equivalent in the sources and a
  synonymy or homonymy relation bridges the two equivalents (in the
  support ontology or any source); the bridge's kind is propagated to
  the pair.
* case 3 - both concepts are composites of the same arity whose children
  can be perfectly paired through known synonymy/equivalence relations or
  term equality; the pair is inferred synonymous.

Enrichment only ever adds relations, never modifies or removes one, and
refuses any injection that would make a pair carry both synonymy and
homonymy.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from .errors import ArityTooLarge
from .matching import max_weight_assignment
from .model import Concept, EnrichmentRecord, Ontology, Relation, find_owner
from .similarity import lookup_relations
from .terms import normalize_term

# Exhaustive child-matching bound; wider pairs must be resolved manually.
MAX_CHILD_ARITY = 8


class ResolvedEndpoints(NamedTuple):
    """Support-ontology endpoints for an injected relation.

    ``create`` lists concepts that must be added first (a second
    same-termed concept when a homonymy needs two distinct endpoints, or
    a fresh concept when the term has no explicit one yet).  ``notes``
    carries ambiguity warnings.
    """

    a: str
    b: str
    create: tuple[Concept, ...]
    notes: tuple[str, ...]


def resolve_endpoints(od: Ontology, t1: str, t2: str) -> ResolvedEndpoints:
    """Pick the support-ontology concepts an injected relation should join.

    Existing concepts bearing the terms are reused, preferring the
    lexicographically smallest ids; missing endpoints are materialized
    with deterministic ids derived from the ontology id and the term.
    """
    create: list[Concept] = []
    notes: list[str] = []

    def fresh_id(term: str) -> str:
        base = f"{od.id}#{term}"
        candidate = base
        suffix = 2
        taken = set(od.concepts) | {c.id for c in create}
        while candidate in taken:
            candidate = f"{base}~{suffix}"
            suffix += 1
        return candidate

    def endpoint(term: str, skip: Optional[str] = None) -> str:
        existing = [c.id for c in od.concepts_by_term(term) if c.id != skip]
        if existing:
            if len(existing) > 1:
                notes.append(
                    f"term {term!r} names several support-ontology concepts "
                    f"({', '.join(existing)}); attaching to {existing[0]!r}"
                )
            return existing[0]
        cid = fresh_id(term)
        create.append(Concept(id=cid, term=term))
        return cid

    a = endpoint(t1)
    if t1 == t2:
        b = endpoint(t2, skip=a)  # same term needs two distinct endpoints
    else:
        b = endpoint(t2)
    return ResolvedEndpoints(a=a, b=b, create=tuple(create), notes=tuple(notes))


def find_direct_relation(
    t1: str, t2: str, sources: list[Ontology]
) -> Optional[tuple[Relation, Ontology]]:
    """First declared semantic relation between the two terms in one source."""
    wanted = {t1, t2}
    for source in sources:
        for relation in source.relations:
            if relation.kind == "part_of":
                continue
            terms = {
                normalize_term(source.concepts[relation.a].term),
                normalize_term(source.concepts[relation.b].term),
            }
            if terms == wanted:
                return relation, source
    return None


def _equivalence_partners(
    term: str, sources: list[Ontology]
) -> list[tuple[str, Relation]]:
    """(partner term, equivalence relation) pairs touching ``term``, sorted."""
    partners = []
    for source in sources:
        for relation in source.relations:
            if relation.kind != "equivalence":
                continue
            ta = normalize_term(source.concepts[relation.a].term)
            tb = normalize_term(source.concepts[relation.b].term)
            if ta == term:
                partners.append((tb, relation))
            elif tb == term:
                partners.append((ta, relation))
    return sorted(partners)


def _find_bridge(
    s1: str, s2: str, od: Ontology, sources: list[Ontology]
) -> Optional[Relation]:
    """Synonymy or homonymy between two terms, support ontology first."""
    for relation in lookup_relations(od, s1, s2):
        if relation.kind in ("synonymy", "homonymy"):
            return relation
    wanted = {s1, s2}
    for source in sources:
        for relation in source.relations:
            if relation.kind not in ("synonymy", "homonymy"):
                continue
            terms = {
                normalize_term(source.concepts[relation.a].term),
                normalize_term(source.concepts[relation.b].term),
            }
            if terms == wanted:
                return relation
    return None


def infer_via_equivalents(
    t1: str,
    t2: str,
    sources: list[Ontology],
    od: Ontology,
    pair: Optional[tuple[str, str]] = None,
) -> Optional[EnrichmentRecord]:
    """Case 2: propagate a bridge relation between declared equivalents.

    Candidates are scanned lexicographically by (partner-of-t1 term,
    partner-of-t2 term); the first pair with a bridge wins and the
    bridge's kind is what gets injected.
    """
    for s1, rel1 in _equivalence_partners(t1, sources):
        for s2, rel2 in _equivalence_partners(t2, sources):
            if rel2 == rel1:
                continue  # each side needs its own equivalence edge
            bridge = _find_bridge(s1, s2, od, sources)
            if bridge is None:
                continue
            resolved = resolve_endpoints(od, t1, t2)
            injected = Relation(
                a=resolved.a, b=resolved.b, kind=bridge.kind,
                provenance="inferred_case2",
            )
            return EnrichmentRecord(
                injected=injected,
                evidence=(rel1, rel2, bridge),
                pair=pair if pair is not None else (resolved.a, resolved.b),
            )
    return None


def infer_via_children(
    c1: Concept,
    c2: Concept,
    sources: list[Ontology],
    od: Ontology,
) -> Optional[EnrichmentRecord]:
    """Case 3: composites whose children pair up through known relations.

    Children relate when their normalized terms are equal or a synonymy /
    equivalence relation between the terms exists in the support ontology
    or any source.  A perfect injective matching over all n children is
    required; the search is exhaustive for n <= MAX_CHILD_ARITY and raises
    ArityTooLarge beyond that.  Only distinct parent terms are inferred
    (a shared term is already decided syntactically, and a self-synonymy
    would break pipeline idempotence); the inferred kind is always
    synonymy.
    """
    if c1.is_atomic or c2.is_atomic or len(c1.children) != len(c2.children):
        return None
    t1 = normalize_term(c1.term)
    t2 = normalize_term(c2.term)
    if t1 == t2:
        return None
    n = len(c1.children)
    if n > MAX_CHILD_ARITY:
        raise ArityTooLarge(
            f"composite pair ({c1.id!r}, {c2.id!r}) has {n} children; "
            f"exhaustive matching is limited to {MAX_CHILD_ARITY}"
        )
    o1 = find_owner(sources, c1.id)
    o2 = find_owner(sources, c2.id)
    left = sorted(
        (o1.concepts[k] for k in c1.children),
        key=lambda c: (normalize_term(c.term), c.id),
    )
    right = sorted(
        (o2.concepts[k] for k in c2.children),
        key=lambda c: (normalize_term(c.term), c.id),
    )
    support: list[list[Optional[Relation]]] = []
    weights = []
    for kid1 in left:
        row_rel: list[Optional[Relation]] = []
        row_w = []
        for kid2 in right:
            related, relation = _children_related(
                normalize_term(kid1.term), normalize_term(kid2.term), od, sources
            )
            row_rel.append(relation)
            row_w.append(1 if related else 0)
        support.append(row_rel)
        weights.append(row_w)
    total, assignment = max_weight_assignment(weights)
    if total != n:
        return None
    evidence = tuple(
        support[i][j] for i, j in enumerate(assignment) if support[i][j] is not None
    )
    resolved = resolve_endpoints(od, t1, t2)
    injected = Relation(
        a=resolved.a, b=resolved.b, kind="synonymy", provenance="inferred_case3"
    )
    return EnrichmentRecord(injected=injected, evidence=evidence, pair=(c1.id, c2.id))


def _children_related(
    s1: str, s2: str, od: Ontology, sources: list[Ontology]
) -> tuple[bool, Optional[Relation]]:
    if s1 == s2:
        return True, None  # term equality needs no relation
    for relation in lookup_relations(od, s1, s2):
        if relation.kind in ("synonymy", "equivalence"):
            return True, relation
    wanted = {s1, s2}
    for source in sources:
        for relation in source.relations:
            if relation.kind not in ("synonymy", "equivalence"):
                continue
            terms = {
                normalize_term(source.concepts[relation.a].term),
                normalize_term(source.concepts[relation.b].term),
            }
            if terms == wanted:
                return True, relation
    return False, None


def enrich(
    c1: Concept,
    c2: Concept,
    od: Ontology,
    sources: list[Ontology],
    warnings: Optional[list[str]] = None,
) -> Optional[EnrichmentRecord]:
    """Try case 1, then 2, then 3; commit at most one relation to ``od``.

    On success the support ontology gains exactly one relation (plus any
    endpoint concepts it needed) and lookups for the pair are nonempty
    afterwards.  On failure ``od`` is untouched.  An injection that would
    put synonymy and homonymy on the same pair is refused with a warning;
    ArityTooLarge from case 3 degrades to a warning as well.
    """
    sink = warnings if warnings is not None else []
    t1 = normalize_term(c1.term)
    t2 = normalize_term(c2.term)

    record = None
    direct = find_direct_relation(t1, t2, sources)
    if direct is not None:
        relation, _ = direct
        resolved = resolve_endpoints(od, t1, t2)
        record = EnrichmentRecord(
            injected=Relation(
                a=resolved.a, b=resolved.b, kind=relation.kind,
                provenance="inferred_case1",
            ),
            evidence=(relation,),
            pair=(c1.id, c2.id),
        )
    if record is None:
        record = infer_via_equivalents(t1, t2, sources, od, pair=(c1.id, c2.id))
    if record is None:
        try:
            record = infer_via_children(c1, c2, sources, od)
        except ArityTooLarge as exc:
            sink.append(f"enrichment skipped for ({c1.id}, {c2.id}): {exc}")
            return None
    if record is None:
        return None

    existing = lookup_relations(od, t1, t2)
    kind = record.injected.kind
    if any(r.kind == kind for r in existing):
        return None  # already known; keep enrichment idempotent
    opposite = {"synonymy": "homonymy", "homonymy": "synonymy"}.get(kind)
    if opposite and any(r.kind == opposite for r in existing):
        sink.append(
            f"enrichment refused for ({c1.id}, {c2.id}): injecting {kind} would "
            f"contradict an existing {opposite} relation between "
            f"{t1!r} and {t2!r}"
        )
        return None

    resolved = resolve_endpoints(od, t1, t2)
    for concept in resolved.create:
        od.add_concept(concept)
    sink.extend(resolved.notes)
    od.add_relation(record.injected)
    return record
