"""Example-based categorization of search results.

Each target category is represented by its category-document vector; a
result's title+snippet vector is compared against all of them and the top-k
neighbors vote. The vote assigns one category when a strict majority
exists, defers to the top-ranked neighbor when it sits in the largest
group, and otherwise assigns two categories.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .taxonomy import UNCLASSIFIED, Category, CategoryDocument, Taxonomy, category_document
from .textproc import (
    TermVector,
    Vocabulary,
    build_vocabulary,
    cosine_similarity,
    tfidf_vector,
    tokenize,
)


@dataclass
class VotingParams:
    k: int = 5
    relevance_threshold: float = 0.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass
class CategoryAssignment:
    result_id: str
    primary: str
    secondary: str | None = None
    neighbors: list[tuple[str, float]] | None = None

    @property
    def unclassified(self) -> bool:
        return self.primary == UNCLASSIFIED

    def categories(self) -> list[str]:
        if self.secondary is not None:
            return [self.primary, self.secondary]
        return [self.primary]


def rank_categories(
    text: str,
    category_docs: list[CategoryDocument],
    k: int,
    vocab: Vocabulary,
) -> list[tuple[str, float]]:
    """Top-k (category path, similarity) pairs, descending similarity with
    ties by path; zero-similarity categories never appear."""
    vec = tfidf_vector(tokenize(text), vocab)
    return rank_categories_vector(vec, category_docs, k)


def rank_categories_vector(
    vec: TermVector,
    category_docs: list[CategoryDocument],
    k: int,
) -> list[tuple[str, float]]:
    scored = []
    for cdoc in category_docs:
        sim = cosine_similarity(vec, cdoc.vector)
        if sim > 0.0:
            scored.append((cdoc.category.path, sim))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]


def majority_vote(topk: list[tuple[str, float]], result_id: str = "") -> CategoryAssignment:
    """Dominant-majority vote over a non-empty descending neighbor list."""
    if not topk:
        raise ValueError("majority_vote requires at least one neighbor")
    cats = [cat for cat, _ in topk]
    k = len(cats)
    freq = Counter(cats)
    m = max(freq.values())
    majority_group = {cat for cat, count in freq.items() if count == m}
    top_cat = cats[0]
    if top_cat in majority_group:
        majority_cat = top_cat
    else:
        majority_cat = next(cat for cat in cats if cat in majority_group)

    if m > k / 2:
        return CategoryAssignment(result_id, primary=majority_cat, neighbors=topk)
    if top_cat in majority_group:
        return CategoryAssignment(result_id, primary=top_cat, neighbors=topk)
    return CategoryAssignment(result_id, primary=top_cat, secondary=majority_cat, neighbors=topk)


def filter_by_categories(entries, assignments: dict[str, CategoryAssignment],
                         selected: list[str], known_paths=None):
    """Keep entries whose primary or secondary category falls under a
    selected path; an empty selection passes everything through. Order is
    preserved."""
    if not selected:
        return list(entries)
    if known_paths is not None:
        for path in selected:
            if path not in known_paths:
                raise ValueError(f"unknown category: {path}")
    prefixes = [p.split("/") for p in selected]

    def under_selection(path: str) -> bool:
        parts = path.split("/")
        return any(parts[: len(pre)] == pre for pre in prefixes)

    kept = []
    for entry in entries:
        assignment = assignments.get(entry.doc.url)
        if assignment is None:
            continue
        if any(under_selection(cat) for cat in assignment.categories() if cat != UNCLASSIFIED):
            kept.append(entry)
    return kept


class CategoryClassifier:
    """Category-document vectors over a shared vocabulary, ready for kNN
    ranking, vote assignment, and crawl relevance checks."""

    def __init__(self, taxonomy: Taxonomy, max_depth: int | None = None):
        self.taxonomy = taxonomy
        self.targets = sorted(
            taxonomy.classification_targets(max_depth), key=lambda c: c.path
        )
        if not self.targets:
            raise ValueError("taxonomy has no classification targets")
        corpus = [tokenize(cat.text()) for cat in self.targets]
        self.vocab = build_vocabulary(corpus)
        self.category_docs = [
            CategoryDocument(category=cat, vector=tfidf_vector(tokens, self.vocab))
            for cat, tokens in zip(self.targets, corpus)
        ]
        self._vector_cache: dict[str, TermVector] = {}

    def vectorize(self, text: str) -> TermVector:
        return tfidf_vector(tokenize(text), self.vocab)

    def category_vector(self, path: str) -> TermVector:
        """Category-document vector for any category in the taxonomy (the
        classification targets are precomputed; others are cached on use)."""
        for cdoc in self.category_docs:
            if cdoc.category.path == path:
                return cdoc.vector
        if path not in self._vector_cache:
            cdoc = category_document(self.taxonomy, path, self.vocab)
            self._vector_cache[path] = cdoc.vector
        return self._vector_cache[path]

    def rank(self, text: str, k: int) -> list[tuple[str, float]]:
        return rank_categories_vector(self.vectorize(text), self.category_docs, k)

    def assign(self, result_id: str, text: str, k: int) -> CategoryAssignment:
        topk = self.rank(text, k)
        if not topk:
            return CategoryAssignment(result_id, primary=UNCLASSIFIED, neighbors=[])
        return majority_vote(topk, result_id)
