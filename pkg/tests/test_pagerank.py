import random

import pytest

from isf.crawler import Frontier
from isf.pagerank import LinkGraph, compute_pagerank, prune_low_rank

from oracles import dense_pagerank


def build_graph(n: int, edges: set[tuple[int, int]], fetched=()) -> LinkGraph:
    graph = LinkGraph()
    urls = [f"http://site/{i}" for i in range(n)]
    for url in urls:
        graph.add_page(url)
    for i in range(n):
        graph.set_outlinks(urls[i], [urls[j] for (src, j) in sorted(edges) if src == i])
    for i in fetched:
        graph.mark_fetched(urls[i])
    return graph


def ranks_of(graph: LinkGraph, n: int) -> list[float]:
    return [graph.pages[f"http://site/{i}"].rank for i in range(n)]


def test_three_node_cycle_uniform():
    graph = build_graph(3, {(0, 1), (1, 2), (2, 0)})
    result = compute_pagerank(graph, delta=0.85)
    assert result.converged
    for r in ranks_of(graph, 3):
        assert r == pytest.approx(1.0, abs=1e-9)


def test_complete_digraph_uniform():
    edges = {(i, j) for i in range(3) for j in range(3) if i != j}
    graph = build_graph(3, edges)
    compute_pagerank(graph, delta=0.85)
    for r in ranks_of(graph, 3):
        assert r == pytest.approx(1.0, abs=1e-9)


def test_two_node_sink_example():
    graph = build_graph(2, {(0, 1)})
    result = compute_pagerank(graph, delta=0.85, tol=1e-12, max_iter=500)
    r = ranks_of(graph, 2)
    # solved by hand from the 2x2 linear system
    assert r[0] == pytest.approx(0.701754, abs=1e-4)
    assert r[1] == pytest.approx(1.298246, abs=1e-4)
    assert sum(r) == pytest.approx(2.0, abs=1e-6)
    oracle = dense_pagerank(2, {(0, 1)}, 0.85)
    assert r == pytest.approx(oracle, abs=1e-6)


def test_sum_invariant_and_floor():
    rng = random.Random(7)
    for _ in range(25):
        n = rng.randrange(2, 8)
        edges = {
            (i, j)
            for i in range(n)
            for j in range(n)
            if i != j and rng.random() < 0.4
        }
        graph = build_graph(n, edges)
        compute_pagerank(graph, delta=0.85, tol=1e-12, max_iter=500)
        ranks = ranks_of(graph, n)
        assert sum(ranks) == pytest.approx(n, abs=1e-6 * n)
        assert all(r >= 0.15 - 1e-9 for r in ranks)


def test_oracle_agreement_random_graphs():
    rng = random.Random(99)
    for _ in range(50):
        n = rng.randrange(1, 9)
        edges = {
            (i, j)
            for i in range(n)
            for j in range(n)
            if i != j and rng.random() < 0.35
        }
        graph = build_graph(n, edges)
        compute_pagerank(graph, delta=0.85, tol=1e-12, max_iter=500)
        oracle = dense_pagerank(n, edges, 0.85)
        for got, want in zip(ranks_of(graph, n), oracle):
            assert got == pytest.approx(want, abs=1e-6)


def test_unconverged_flag():
    graph = build_graph(2, {(0, 1)})
    result = compute_pagerank(graph, delta=0.85, tol=1e-15, max_iter=2)
    assert not result.converged
    assert result.iterations == 2


def test_prune_epsilon_zero_removes_nothing():
    graph = build_graph(2, {(0, 1)})
    compute_pagerank(graph)
    assert prune_low_rank(graph, 0.0) == []
    assert len(graph) == 2


def test_prune_two_node_example_keeps_both():
    graph = build_graph(2, {(0, 1)})
    compute_pagerank(graph, delta=0.85)
    # both ranks exceed 0.1 per the solved system
    assert prune_low_rank(graph, 0.1) == []


def test_prune_star_graph():
    # hub 0 links to ten leaf sinks
    edges = {(0, j) for j in range(1, 11)}
    oracle = dense_pagerank(11, edges, 0.85)
    assert oracle[0] < 2.0  # hub rank is below the pruning bar

    graph = build_graph(11, edges)
    compute_pagerank(graph, delta=0.85, tol=1e-12, max_iter=500)
    removed = prune_low_rank(graph, 2.0)
    assert len(removed) == 11  # nothing fetched, everything under 2.0

    graph = build_graph(11, edges, fetched=[0])
    compute_pagerank(graph, delta=0.85, tol=1e-12, max_iter=500)
    removed = prune_low_rank(graph, 2.0)
    assert len(removed) == 10
    assert "http://site/0" in graph.pages  # fetched pages survive


def test_prune_discards_from_frontier():
    graph = build_graph(3, {(0, 1), (0, 2)})
    frontier = Frontier()
    for i in range(3):
        frontier.add(f"http://site/{i}", priority=1.0)
    compute_pagerank(graph, delta=0.85)
    graph.pages["http://site/2"].rank = 0.01
    prune_low_rank(graph, 0.1, frontier)
    assert "http://site/2" not in graph.pages
    batch = frontier.next_batch(10)
    assert "http://site/2" not in batch
