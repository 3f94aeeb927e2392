"""Clustering of categorized results: cluster count from top-level category
spread, centroids seeded by best-matching results, then k-means under
cosine distance.

Vectors are unit-normalized on entry, so a centroid (the normalized mean of
its members) is the exact minimizer of the cluster's summed cosine distance
and the objective never increases between iterations.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .classify import CategoryAssignment
from .taxonomy import UNCLASSIFIED, Taxonomy
from .textproc import TermVector, cosine_similarity


@dataclass
class Cluster:
    label: str
    centroid: TermVector
    members: list[str] = field(default_factory=list)


@dataclass
class KMeansResult:
    clusters: list[Cluster]
    assignment: dict[str, int]
    objective: float
    iterations: int
    converged: bool
    objective_trace: list[float] = field(default_factory=list)


def choose_cluster_count(assignments: dict[str, CategoryAssignment], taxonomy: Taxonomy) -> int:
    """Distinct depth-1 ancestors among assigned categories; unclassified
    results count as one extra group."""
    groups = set()
    for assignment in assignments.values():
        for cat in assignment.categories():
            if cat == UNCLASSIFIED:
                groups.add(UNCLASSIFIED)
            else:
                groups.add(taxonomy.top_level_ancestor(cat))
    return len(groups)


def candidate_categories(assignments: dict[str, CategoryAssignment], taxonomy: Taxonomy) -> list[str]:
    """Top-level categories represented in the assignments, path order."""
    tops = set()
    for assignment in assignments.values():
        for cat in assignment.categories():
            if cat != UNCLASSIFIED:
                tops.add(taxonomy.top_level_ancestor(cat))
    return sorted(tops)


def seed_centroids(
    result_vectors: dict[str, TermVector],
    category_vectors: dict[str, TermVector],
) -> list[tuple[str, str]]:
    """Match each candidate category with the result most similar to its
    category-document, greedily in descending similarity; a result seeds at
    most one cluster. Categories similar to nothing fall back to the lowest
    unused result id. Returns (category path, seeding result id) pairs."""
    pairs = []
    for path, cvec in sorted(category_vectors.items()):
        for rid, rvec in sorted(result_vectors.items()):
            sim = cosine_similarity(rvec, cvec)
            if sim > 0.0:
                pairs.append((sim, path, rid))
    pairs.sort(key=lambda t: (-t[0], t[1], t[2]))

    seeded: dict[str, str] = {}
    used: set[str] = set()
    for sim, path, rid in pairs:
        if path in seeded or rid in used:
            continue
        seeded[path] = rid
        used.add(rid)

    for path in sorted(category_vectors):
        if path in seeded:
            continue
        free = sorted(set(result_vectors) - used)
        if not free:
            break
        seeded[path] = free[0]
        used.add(free[0])
    return sorted(seeded.items())


def _normalized_mean(vectors: list[TermVector]) -> TermVector:
    sums: dict[int, float] = {}
    for vec in vectors:
        for tid, w in vec.weights.items():
            sums[tid] = sums.get(tid, 0.0) + w
    n = len(vectors)
    return TermVector.from_weights({tid: w / n for tid, w in sums.items()}).unit()


def kmeans(
    result_vectors: dict[str, TermVector],
    seeds: list[tuple[str, str]],
    max_iter: int = 50,
) -> KMeansResult:
    """Alternate nearest-centroid assignment (distance 1 - cosine) and
    normalized-mean centroid updates until assignments stop changing.
    An emptied cluster is reseeded with the globally worst-fitting point."""
    points = {rid: vec.unit() for rid, vec in result_vectors.items()}
    point_ids = sorted(points)
    labels = [label for label, _ in seeds]
    centroids = [points[rid] for _, rid in seeds]
    n_clusters = len(centroids)
    if n_clusters == 0 or not points:
        return KMeansResult(clusters=[], assignment={}, objective=0.0,
                            iterations=0, converged=True)

    assignment: dict[str, int] = {}
    converged = False
    iterations = 0
    trace: list[float] = []
    for iterations in range(1, max_iter + 1):
        new_assignment = {}
        for rid in point_ids:
            sims = [cosine_similarity(points[rid], c) for c in centroids]
            best = max(range(n_clusters), key=lambda ci: (sims[ci], -ci))
            new_assignment[rid] = best

        # reseed any emptied cluster with the point farthest from the
        # centroid it is currently assigned to
        for ci in range(n_clusters):
            if any(a == ci for a in new_assignment.values()):
                continue
            worst = max(
                point_ids,
                key=lambda rid: (
                    1.0 - cosine_similarity(points[rid], centroids[new_assignment[rid]]),
                    rid,
                ),
            )
            new_assignment[worst] = ci
            centroids[ci] = points[worst]

        changed = new_assignment != assignment
        assignment = new_assignment
        members: list[list[str]] = [[] for _ in range(n_clusters)]
        for rid in point_ids:
            members[assignment[rid]].append(rid)
        centroids = [
            _normalized_mean([points[rid] for rid in group]) if group else centroids[ci]
            for ci, group in enumerate(members)
        ]
        objective = sum(
            1.0 - cosine_similarity(points[rid], centroids[assignment[rid]])
            for rid in point_ids
        )
        trace.append(objective)
        if not changed:
            converged = True
            break

    clusters = [
        Cluster(label=labels[ci], centroid=centroids[ci],
                members=[rid for rid in point_ids if assignment[rid] == ci])
        for ci in range(n_clusters)
    ]
    clusters = [c for c in clusters if c.members]
    return KMeansResult(
        clusters=clusters,
        assignment=assignment,
        objective=trace[-1] if trace else 0.0,
        iterations=iterations,
        converged=converged,
        objective_trace=trace,
    )


def cluster_results(
    result_vectors: dict[str, TermVector],
    assignments: dict[str, CategoryAssignment],
    category_vectors: dict[str, TermVector],
    max_iter: int = 50,
) -> tuple[dict[str, str], bool]:
    """Cluster classified results via seeded k-means and pool unclassified
    ones into a dedicated cluster. Returns result-id -> cluster label and a
    convergence flag."""
    labels: dict[str, str] = {}
    classified = {
        rid: vec for rid, vec in result_vectors.items()
        if rid in assignments and not assignments[rid].unclassified
    }
    converged = True
    if classified and category_vectors:
        seeds = seed_centroids(classified, category_vectors)
        result = kmeans(classified, seeds, max_iter=max_iter)
        converged = result.converged
        for cluster in result.clusters:
            for rid in cluster.members:
                labels[rid] = cluster.label
    for rid in result_vectors:
        if rid not in labels:
            labels[rid] = UNCLASSIFIED
    return labels, converged
