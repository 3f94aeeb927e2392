"""Link graph and rank computation for frontier prioritization.

Ranks satisfy r(a) = delta * (sum over in-links r(b)/o(b) + sink mass) +
(1 - delta), iterated from r = 1 everywhere, so the ranks always sum to the
number of pages. A page with no recorded outlinks is a sink and spreads its
rank uniformly.
"""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class PageNode:
    url: str
    rank: float = 1.0
    outlinks: list[str] = field(default_factory=list)
    fetched: bool = False


@dataclass
class PageRankResult:
    ranks: dict[str, float]
    iterations: int
    converged: bool


class LinkGraph:
    """Pages, outlink lists, and current ranks (the crawler's link store)."""

    def __init__(self):
        self.pages: dict[str, PageNode] = {}

    def __len__(self) -> int:
        return len(self.pages)

    def __contains__(self, url: str) -> bool:
        return url in self.pages

    def add_page(self, url: str, rank: float = 1.0) -> PageNode:
        node = self.pages.get(url)
        if node is None:
            node = PageNode(url=url, rank=rank)
            self.pages[url] = node
        return node

    def set_outlinks(self, url: str, outlinks: list[str]) -> None:
        # only edges to pages tracked in the graph count for ranking
        node = self.pages[url]
        node.outlinks = [u for u in outlinks if u in self.pages and u != url]

    def mark_fetched(self, url: str) -> None:
        self.pages[url].fetched = True

    def sinks(self) -> list[str]:
        return [u for u, n in self.pages.items() if not n.outlinks]

    def total_rank(self) -> float:
        return sum(n.rank for n in self.pages.values())

    def remove(self, url: str) -> None:
        del self.pages[url]
        for node in self.pages.values():
            if url in node.outlinks:
                node.outlinks = [u for u in node.outlinks if u != url]


def compute_pagerank(
    graph: LinkGraph,
    delta: float = 0.85,
    tol: float = 1e-9,
    max_iter: int = 100,
) -> PageRankResult:
    """Iterate the rank recurrence until the L1 change drops below tol.

    Returns the best iterate with converged=False when max_iter is hit.
    Ranks are written back onto the graph.
    """
    urls = list(graph.pages)
    n = len(urls)
    if n == 0:
        return PageRankResult(ranks={}, iterations=0, converged=True)
    ranks = {u: 1.0 for u in urls}
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        incoming = {u: 0.0 for u in urls}
        sink_mass = 0.0
        for u in urls:
            node = graph.pages[u]
            out = node.outlinks
            if out:
                share = ranks[u] / len(out)
                for v in out:
                    incoming[v] += share
            else:
                sink_mass += ranks[u] / n
        new_ranks = {
            u: delta * (incoming[u] + sink_mass) + (1.0 - delta) for u in urls
        }
        change = sum(abs(new_ranks[u] - ranks[u]) for u in urls)
        ranks = new_ranks
        if change < tol:
            converged = True
            break
    for u, r in ranks.items():
        graph.pages[u].rank = r
    return PageRankResult(ranks=ranks, iterations=iterations, converged=converged)


def prune_low_rank(graph: LinkGraph, epsilon: float, frontier=None) -> list[str]:
    """Drop unfetched pages ranked below epsilon; fetched pages are kept.

    Returns the removed URLs; when a frontier is given, they are discarded
    from it as well.
    """
    doomed = [
        u for u, node in graph.pages.items()
        if not node.fetched and node.rank < epsilon
    ]
    for u in doomed:
        graph.remove(u)
        if frontier is not None:
            frontier.discard(u)
    return doomed
