import itertools
import math
import os
import random

import pytest

from isf.classify import CategoryAssignment
from isf.cluster import (
    candidate_categories,
    choose_cluster_count,
    cluster_results,
    kmeans,
    seed_centroids,
    _normalized_mean,
)
from isf.taxonomy import UNCLASSIFIED, load_taxonomy
from isf.textproc import TermVector, cosine_similarity

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


@pytest.fixture(scope="module")
def taxonomy():
    return load_taxonomy(
        os.path.join(FIXTURES, "demo_taxonomy.tsv"),
        os.path.join(FIXTURES, "demo_pages.tsv"),
    )


def assignment(url, primary, secondary=None):
    return CategoryAssignment(url, primary=primary, secondary=secondary)


def vec(**weights):
    return TermVector.from_weights({int(k[1:]): v for k, v in weights.items()})


# --- cluster count ------------------------------------------------------------

def test_count_single_top_level(taxonomy):
    assignments = {
        "u1": assignment("u1", "Top/Science/Biology"),
        "u2": assignment("u2", "Top/Science/Environment"),
    }
    assert choose_cluster_count(assignments, taxonomy) == 1


def test_count_three_top_levels(taxonomy):
    assignments = {
        "u1": assignment("u1", "Top/Science/Biology"),
        "u2": assignment("u2", "Top/Arts/Music"),
        "u3": assignment("u3", "Top/Sports/Soccer"),
    }
    assert choose_cluster_count(assignments, taxonomy) == 3


def test_count_includes_unclassified_group(taxonomy):
    assignments = {
        "u1": assignment("u1", "Top/Science/Biology"),
        "u2": assignment("u2", UNCLASSIFIED),
    }
    assert choose_cluster_count(assignments, taxonomy) == 2


def test_count_secondary_categories_counted(taxonomy):
    assignments = {
        "u1": assignment("u1", "Top/Science/Biology", secondary="Top/Arts/Music"),
    }
    assert choose_cluster_count(assignments, taxonomy) == 2


def test_count_empty_assignments(taxonomy):
    assert choose_cluster_count({}, taxonomy) == 0


def test_count_tree_walk_oracle(taxonomy):
    rng = random.Random(3)
    cats = [
        "Top/Science/Biology", "Top/Science/Environment", "Top/Arts/Music",
        "Top/Sports/Soccer", "Top/Recreation/Autos", UNCLASSIFIED,
    ]
    assignments = {
        f"u{i}": assignment(f"u{i}", rng.choice(cats)) for i in range(20)
    }
    expected = len({
        UNCLASSIFIED if a.primary == UNCLASSIFIED else "/".join(a.primary.split("/")[:2])
        for a in assignments.values()
    })
    assert choose_cluster_count(assignments, taxonomy) == expected


# --- seeding --------------------------------------------------------------------

def test_seed_single_result_single_category():
    seeds = seed_centroids({"r1": vec(t0=1.0)}, {"Top/A": vec(t0=1.0)})
    assert seeds == [("Top/A", "r1")]


def test_seed_greedy_collision():
    # both categories match r1 best, the higher-similarity pairing wins
    results = {
        "r1": vec(t0=1.0, t1=1.0),
        "r2": vec(t0=1.0, t2=5.0),
    }
    categories = {
        "Top/A": vec(t0=1.0, t1=1.0),   # sim(r1)=1.0, the strongest pair
        "Top/B": vec(t0=1.0),           # also likes r1 more than r2
    }
    sims = {
        (c, r): cosine_similarity(categories[c], results[r])
        for c in categories for r in results
    }
    assert sims[("Top/B", "r1")] > sims[("Top/B", "r2")]
    seeds = dict(seed_centroids(results, categories))
    assert seeds == {"Top/A": "r1", "Top/B": "r2"}


def test_seed_zero_similarity_falls_back_to_lowest_free_id():
    results = {"r1": vec(t0=1.0), "r2": vec(t1=1.0)}
    categories = {"Top/A": vec(t0=1.0), "Top/B": vec(t9=1.0)}
    seeds = dict(seed_centroids(results, categories))
    assert seeds["Top/A"] == "r1"
    assert seeds["Top/B"] == "r2"  # zero similarity, lowest unused id


def test_seed_fewer_results_than_categories():
    results = {"r1": vec(t0=1.0)}
    categories = {"Top/A": vec(t0=1.0), "Top/B": vec(t1=1.0)}
    seeds = seed_centroids(results, categories)
    assert len(seeds) == 1


# --- k-means ----------------------------------------------------------------------

def test_kmeans_single_cluster_centroid_is_normalized_mean():
    points = {"r1": vec(t0=1.0), "r2": vec(t1=1.0)}
    result = kmeans(points, [("only", "r1")])
    assert len(result.clusters) == 1
    centroid = result.clusters[0].centroid
    expected = _normalized_mean([points["r1"].unit(), points["r2"].unit()])
    assert centroid.weights == pytest.approx(expected.weights)
    assert sorted(result.clusters[0].members) == ["r1", "r2"]


def test_kmeans_orthogonal_groups_split_perfectly():
    points = {
        "a1": vec(t0=3.0, t1=1.0),
        "a2": vec(t0=1.0, t1=2.0),
        "b1": vec(t5=2.0, t6=1.0),
        "b2": vec(t5=1.0, t6=3.0),
    }
    result = kmeans(points, [("A", "a1"), ("B", "b1")])
    assert result.converged
    groups = {c.label: set(c.members) for c in result.clusters}
    assert groups == {"A": {"a1", "a2"}, "B": {"b1", "b2"}}


def brute_force_best_2partition(points: dict[str, TermVector]) -> float:
    """Best objective over every 2-partition, optimal centroids per part."""
    ids = sorted(points)
    unit = {rid: points[rid].unit() for rid in ids}
    best = math.inf
    for mask in range(1, 2 ** len(ids) - 1):
        part_a = [ids[i] for i in range(len(ids)) if mask & (1 << i)]
        part_b = [ids[i] for i in range(len(ids)) if not mask & (1 << i)]
        total = 0.0
        for part in (part_a, part_b):
            centroid = _normalized_mean([unit[rid] for rid in part])
            total += sum(1.0 - cosine_similarity(unit[rid], centroid) for rid in part)
        best = min(best, total)
    return best


def test_kmeans_eight_point_fixture_matches_exhaustive_best():
    rng = random.Random(11)
    points = {}
    for i in range(4):
        points[f"a{i}"] = TermVector.from_weights(
            {0: 1.0 + rng.random(), 1: 1.0 + rng.random(), 2: rng.random() * 0.2}
        )
    for i in range(4):
        points[f"b{i}"] = TermVector.from_weights(
            {5: 1.0 + rng.random(), 6: 1.0 + rng.random(), 7: rng.random() * 0.2}
        )
    result = kmeans(points, [("A", "a0"), ("B", "b0")])
    assert result.converged
    assert result.objective == pytest.approx(brute_force_best_2partition(points), abs=1e-9)


def test_kmeans_objective_non_increasing_random_fixtures():
    rng = random.Random(5)
    for trial in range(60):
        n = rng.randrange(4, 12)
        points = {
            f"r{i}": TermVector.from_weights(
                {t: rng.random() for t in rng.sample(range(8), rng.randrange(1, 5))}
            )
            for i in range(n)
        }
        k = rng.randrange(2, min(4, n) + 1)
        seed_ids = rng.sample(sorted(points), k)
        result = kmeans(points, [(f"c{j}", rid) for j, rid in enumerate(seed_ids)])
        for earlier, later in zip(result.objective_trace, result.objective_trace[1:]):
            assert later <= earlier + 1e-12
        assert len(result.clusters) <= k


def test_kmeans_unconverged_flag():
    rng = random.Random(9)
    points = {
        f"r{i}": TermVector.from_weights({t: rng.random() for t in range(4)})
        for i in range(10)
    }
    result = kmeans(points, [("a", "r0"), ("b", "r1")], max_iter=1)
    assert not result.converged


def test_kmeans_every_point_in_exactly_one_cluster():
    rng = random.Random(13)
    points = {
        f"r{i}": TermVector.from_weights(
            {t: rng.random() for t in rng.sample(range(6), 3)}
        )
        for i in range(9)
    }
    result = kmeans(points, [("a", "r0"), ("b", "r1"), ("c", "r2")])
    seen = [rid for c in result.clusters for rid in c.members]
    assert sorted(seen) == sorted(points)


# --- the composed helper ----------------------------------------------------------

def test_cluster_results_unclassified_pool(taxonomy):
    vectors = {
        "u1": vec(t0=1.0),
        "u2": vec(t0=0.9, t1=0.1),
        "u3": vec(t5=1.0),
    }
    assignments = {
        "u1": assignment("u1", "Top/Science/Biology"),
        "u2": assignment("u2", "Top/Science/Environment"),
        "u3": assignment("u3", UNCLASSIFIED),
    }
    category_vectors = {"Top/Science": vec(t0=1.0)}
    labels, converged = cluster_results(vectors, assignments, category_vectors)
    assert converged
    assert labels["u1"] == "Top/Science"
    assert labels["u2"] == "Top/Science"
    assert labels["u3"] == UNCLASSIFIED
    k = choose_cluster_count(assignments, taxonomy)
    assert len(set(labels.values())) <= k


def test_candidate_categories_sorted(taxonomy):
    assignments = {
        "u1": assignment("u1", "Top/Sports/Soccer"),
        "u2": assignment("u2", "Top/Arts/Music", secondary="Top/Science/Biology"),
    }
    assert candidate_categories(assignments, taxonomy) == [
        "Top/Arts", "Top/Science", "Top/Sports",
    ]
