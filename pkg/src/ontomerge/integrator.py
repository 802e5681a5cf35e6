"""Drive the integration pipeline.

Steps: derive one ontology per component, score every cross-component
concept pair against the support ontology (triggering enrichment where it
helps), classify verdicts, cluster synonym/identical concepts with
union-find, merge clusters into one result ontology, and convert that
back into a component.  Everything is sequential and deterministic:
fixed inputs give byte-identical serialized outputs.
"""

from __future__ import annotations

from dataclasses import replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .enrichment import enrich
from .errors import HomonymClusterCollision, SchemaViolation
from .model import (
    BusinessComponent,
    Cluster,
    Concept,
    Correspondence,
    EnrichmentRecord,
    MappingEntry,
    MergeResult,
    Ontology,
    Report,
    as_fraction,
    find_owner,
)
from .similarity import semantic_similarity
from .terms import name_sort_key, normalize_term
from .transform import component_to_ontology, ontology_to_component

DEFAULT_TAU = Fraction(1)
ASSUMED_IDENTICAL_WARNING = "assumed identical: no O_d coverage"


def align(
    sources: Sequence[Ontology],
    od: Ontology,
    tau: Fraction | float | int = DEFAULT_TAU,
    warnings: Optional[list[str]] = None,
) -> tuple[list[Correspondence], Ontology, list[EnrichmentRecord]]:
    """Score all cross-source concept pairs and classify them.

    Pairs are evaluated in sorted (source id, concept id) order.  The
    given support ontology is copied; enrichment commits land on the copy,
    which is returned.  Verdicts:

    * score 1 via a support-ontology or enriched synonymy -> Synonym;
    * score 0 via homonymy with equal terms -> Homonym (unequal terms are
      merely Distinct: homonyms share a term by definition);
    * syntactic score >= tau -> Identical, with a warning when the terms
      are equal but the support ontology had no say (a latent homonym
      cannot be excluded);
    * anything else -> Distinct.
    """
    tau = as_fraction(tau)
    if not 0 < tau <= 1:
        raise SchemaViolation(f"threshold tau must be in (0, 1], got {tau}")
    if len(sources) < 2:
        raise SchemaViolation("alignment needs at least two source ontologies")
    ids = [source.id for source in sources]
    if len(set(ids)) != len(ids):
        raise SchemaViolation(f"source ontology ids must be distinct, got {sorted(ids)}")

    sink = warnings if warnings is not None else []
    ordered = sorted(sources, key=lambda o: o.id)
    enriched_od = od.copy()
    records: list[EnrichmentRecord] = []

    def hook(a: Concept, b: Concept):
        record = enrich(a, b, enriched_od, list(ordered), warnings=sink)
        if record is not None:
            records.append(record)
        return record

    correspondences: list[Correspondence] = []
    for i, left in enumerate(ordered):
        for right in ordered[i + 1:]:
            for cid1 in sorted(left.concepts):
                for cid2 in sorted(right.concepts):
                    c1 = left.concepts[cid1]
                    c2 = right.concepts[cid2]
                    score, evidence = semantic_similarity(
                        c1, c2, enriched_od, list(ordered), enrich=hook
                    )
                    verdict = _classify(c1, c2, score, evidence.kind, tau)
                    if verdict == "Identical" and normalize_term(c1.term) == normalize_term(c2.term):
                        sink.append(
                            f"{ASSUMED_IDENTICAL_WARNING} for term "
                            f"{normalize_term(c1.term)!r} ({c1.id}, {c2.id})"
                        )
                    correspondences.append(
                        Correspondence(
                            c1=cid1, c2=cid2, score=score,
                            verdict=verdict, evidence=evidence,
                        )
                    )
    return correspondences, enriched_od, records


def _classify(c1: Concept, c2: Concept, score: Fraction, kind: str, tau: Fraction) -> str:
    if kind in ("od_synonymy", "enriched") and score == 1:
        return "Synonym"
    if kind in ("od_homonymy", "enriched") and score == 0:
        if normalize_term(c1.term) == normalize_term(c2.term):
            return "Homonym"
        return "Distinct"
    if kind == "syntactic" and score >= tau:
        return "Identical"
    return "Distinct"


class _UnionFind:
    """Plain disjoint-set with path compression and union by size."""

    def __init__(self, items: Iterable[str]):
        self.parent = {item: item for item in items}
        self.size = {item: 1 for item in self.parent}

    def find(self, item: str) -> str:
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


def build_clusters(
    correspondences: Sequence[Correspondence], concept_ids: Iterable[str]
) -> list[tuple[str, ...]]:
    """Partition concepts by union-find over Synonym/Identical edges.

    Unmatched concepts stay singletons.  Raises HomonymClusterCollision
    when the transitive closure would pull a Homonym-verdict pair into one
    cluster; the error carries the connecting chain of edges.
    """
    ids = sorted(set(concept_ids))
    uf = _UnionFind(ids)
    merging = [c for c in correspondences if c.verdict in ("Synonym", "Identical")]
    for corr in merging:
        uf.union(corr.c1, corr.c2)
    for corr in correspondences:
        if corr.verdict != "Homonym":
            continue
        if uf.find(corr.c1) == uf.find(corr.c2):
            chain = _edge_chain(merging, corr.c1, corr.c2)
            path = " ; ".join(f"{a} -[{v}]- {b}" for a, b, v in chain)
            raise HomonymClusterCollision(
                f"homonym pair ({corr.c1}, {corr.c2}) would land in one cluster "
                f"via: {path}",
                chain=chain,
            )
    groups: dict[str, list[str]] = {}
    for cid in ids:
        groups.setdefault(uf.find(cid), []).append(cid)
    return sorted(tuple(sorted(members)) for members in groups.values())


def _edge_chain(
    edges: Sequence[Correspondence], start: str, goal: str
) -> list[tuple[str, str, str]]:
    """Shortest path from start to goal through merge edges, as edge triples."""
    adjacency: dict[str, list[tuple[str, Correspondence]]] = {}
    for corr in edges:
        adjacency.setdefault(corr.c1, []).append((corr.c2, corr))
        adjacency.setdefault(corr.c2, []).append((corr.c1, corr))
    previous: dict[str, tuple[str, Correspondence]] = {}
    frontier = [start]
    seen = {start}
    while frontier and goal not in seen:
        nxt = []
        for node in frontier:
            for neighbor, corr in sorted(adjacency.get(node, []), key=lambda t: t[0]):
                if neighbor in seen:
                    continue
                seen.add(neighbor)
                previous[neighbor] = (node, corr)
                nxt.append(neighbor)
        frontier = nxt
    chain: list[tuple[str, str, str]] = []
    node = goal
    while node != start:
        node_prev, corr = previous[node]
        chain.append((node_prev, node, corr.verdict))
        node = node_prev
    chain.reverse()
    return chain


def merge(
    partition: Sequence[tuple[str, ...]],
    sources: Sequence[Ontology],
    od: Ontology,
    correspondences: Sequence[Correspondence] = (),
    enrichment_records: Sequence[EnrichmentRecord] = (),
    warnings: Sequence[str] = (),
    merged_id: str = "CMr",
) -> MergeResult:
    """Collapse each cluster into one concept of the merged ontology.

    The canonical term of a cluster prefers member terms that occur in the
    support ontology (smallest normalized term wins); clusters touched by
    a Homonym verdict are instead displayed as "<term> (<source id>)" so
    same-termed homonyms stay tellable apart.  part_of edges and
    association metadata are re-targeted to cluster representatives and
    deduplicated.
    """
    sink = list(warnings)
    homonym_endpoints: set[str] = set()
    for corr in correspondences:
        if corr.verdict == "Homonym":
            homonym_endpoints.update(corr.pair)

    member_concept = {
        cid: source.concepts[cid] for source in sources for cid in source.concepts
    }
    displays = [
        _cluster_display(members, member_concept, od, homonym_endpoints, sources)
        for members in partition
    ]
    _disambiguate_displays(displays, partition, member_concept, sources, sink)

    merged_id_of: dict[str, str] = {}
    cluster_ids = []
    for members, display in zip(partition, displays):
        cid = f"{merged_id}#{normalize_term(display)}"
        cluster_ids.append(cid)
        for member in members:
            merged_id_of[member] = cid
    if len(set(cluster_ids)) != len(cluster_ids):
        raise SchemaViolation(
            "merged concept terms collide after disambiguation; support ontology "
            "or inputs are contradictory"
        )

    merged = Ontology(merged_id)
    mapping: dict[str, MappingEntry] = {}
    clusters: list[Cluster] = []
    for members, display, cid in zip(partition, displays, cluster_ids):
        term_keys: dict[str, str] = {}
        for member in members:
            concept = member_concept[member]
            term_keys.setdefault(normalize_term(concept.term), concept.term)
        aliases = tuple(
            raw for key, raw in sorted(term_keys.items()) if key != normalize_term(display)
        )
        children = set()
        attributes = set()
        associations = set()
        for member in members:
            concept = member_concept[member]
            attributes.update(concept.attributes)
            for child in concept.children:
                child_cid = merged_id_of[child]
                if child_cid == cid:
                    sink.append(
                        f"dropping self-composition of {cid!r} introduced by merging "
                        f"{member!r}"
                    )
                    continue
                children.add(child_cid)
            source = find_owner(sources, member)
            for assoc in concept.associations:
                target_cid = merged_id_of[f"{source.id}#{normalize_term(assoc.target)}"]
                associations.add((_display_of(target_cid, cluster_ids, displays), assoc.label))
        merged.add_concept(
            Concept(
                id=cid,
                term=display,
                children=tuple(sorted(children)),
                attributes=tuple(sorted(attributes)),
                associations=tuple(sorted(associations)),
                aliases=aliases,
            )
        )
        clusters.append(Cluster(term=display, members=tuple(members), aliases=aliases))
        for member in members:
            mapping[member] = MappingEntry(cluster_id=cid, term=display, aliases=aliases)
    merged.validate()

    for corr in correspondences:
        if corr.verdict == "Homonym" and merged_id_of[corr.c1] == merged_id_of[corr.c2]:
            raise HomonymClusterCollision(
                f"homonym pair ({corr.c1}, {corr.c2}) ended up in cluster "
                f"{merged_id_of[corr.c1]!r}"
            )

    report = Report(
        correspondences=sorted(correspondences, key=lambda c: c.pair),
        enrichments=sorted(enrichment_records, key=lambda r: (r.pair, r.injected)),
        clusters=sorted(clusters, key=lambda cl: (name_sort_key(cl.term), cl.members)),
        warnings=sorted(sink),
    )
    report.validate(member_concept.keys())
    return MergeResult(merged=merged, mapping=mapping, enriched_od=od, report=report)


def _cluster_display(
    members: tuple[str, ...],
    member_concept: dict[str, Concept],
    od: Ontology,
    homonym_endpoints: set[str],
    sources: Sequence[Ontology],
) -> str:
    flagged = sorted(
        (normalize_term(member_concept[m].term), m)
        for m in members
        if m in homonym_endpoints
    )
    if flagged:
        _, member = flagged[0]
        concept = member_concept[member]
        return f"{concept.term} ({find_owner(sources, member).id})"
    by_term: dict[str, str] = {}
    for member in sorted(members):
        concept = member_concept[member]
        by_term.setdefault(normalize_term(concept.term), concept.term)
    in_od = sorted(key for key in by_term if od.term_present(key))
    chosen = in_od[0] if in_od else sorted(by_term)[0]
    return by_term[chosen]


def _disambiguate_displays(
    displays: list[str],
    partition: Sequence[tuple[str, ...]],
    member_concept: dict[str, Concept],
    sources: Sequence[Ontology],
    sink: list[str],
) -> None:
    """Suffix colliding display terms with their source id (in place)."""
    groups: dict[str, list[int]] = {}
    for index, display in enumerate(displays):
        groups.setdefault(normalize_term(display), []).append(index)
    for key, indexes in sorted(groups.items()):
        if len(indexes) < 2:
            continue
        for index in indexes:
            member = partition[index][0]
            owner = find_owner(sources, member).id
            sink.append(
                f"display term {key!r} used by several clusters; suffixing with "
                f"source id {owner!r}"
            )
            displays[index] = f"{displays[index]} ({owner})"


def _display_of(cluster_id: str, cluster_ids: list[str], displays: list[str]) -> str:
    return displays[cluster_ids.index(cluster_id)]


def integrate(
    components: Sequence[BusinessComponent],
    od: Ontology,
    tau: Fraction | float | int = DEFAULT_TAU,
    merged_id: str = "CMr",
    merged_name: str = "Integrated component",
) -> tuple[BusinessComponent, Ontology, Report]:
    """Full pipeline: components in, merged component + enriched ontology out.

    Components with colliding ids are kept by suffixing later duplicates
    with ~2, ~3, ... so a result component can be re-integrated against a
    copy of itself.  Outputs are reusable as future inputs.
    """
    if len(components) < 2:
        raise SchemaViolation("integration needs at least two components")
    seen: dict[str, int] = {}
    warnings: list[str] = []
    deduped = []
    for component in components:
        count = seen.get(component.id, 0) + 1
        seen[component.id] = count
        if count > 1:
            new_id = f"{component.id}~{count}"
            warnings.append(
                f"duplicate component id {component.id!r} renamed to {new_id!r}"
            )
            component = replace(component, id=new_id)
        deduped.append(component)
    sources = [component_to_ontology(component) for component in deduped]
    correspondences, enriched_od, records = align(sources, od, tau, warnings=warnings)
    all_ids = [cid for source in sources for cid in source.concepts]
    partition = build_clusters(correspondences, all_ids)
    result = merge(
        partition,
        sources,
        enriched_od,
        correspondences=correspondences,
        enrichment_records=records,
        warnings=warnings,
        merged_id=merged_id,
    )
    merged_component = ontology_to_component(result.merged, name=merged_name)
    return merged_component, enriched_od, result.report
