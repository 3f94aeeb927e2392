"""Shared text substrate: tokenization, vocabulary, tf-idf weights, cosine.

Everything here is a pure function over immutable inputs; a Vocabulary is
built once and then treated as read-only.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

from .stem import stem

_TOKEN_RE = re.compile(r"[a-z0-9]+")

_default_stopwords: frozenset[str] | None = None


def load_stopword_file(path) -> frozenset[str]:
    """Read a stop-word file: one word per line, '#' comments, blanks ignored."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            words.add(line.lower())
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    global _default_stopwords
    if _default_stopwords is None:
        text = resources.files("isf.data").joinpath("stopwords.txt").read_text("utf-8")
        _default_stopwords = frozenset(
            line.strip().lower()
            for line in text.splitlines()
            if line.strip() and not line.strip().startswith("#")
        )
    return _default_stopwords


def tokenize(text: str, stopwords: frozenset[str] | None = None) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop stop words, stem.

    Stems are checked against the stop list once more so the output never
    contains a stop word ("doing" stems to "do").
    """
    if stopwords is None:
        stopwords = default_stopwords()
    out = []
    for raw in _TOKEN_RE.findall(text.lower()):
        if raw in stopwords:
            continue
        stemmed = stem(raw)
        if stemmed in stopwords:
            continue
        out.append(stemmed)
    return out


@dataclass
class Vocabulary:
    """Dense term-id assignment plus per-term document frequencies."""

    term_ids: dict[str, int]
    df: list[int]
    n_docs: int

    def __len__(self) -> int:
        return len(self.term_ids)

    def id_of(self, term: str) -> int | None:
        return self.term_ids.get(term)

    def idf(self, term_id: int) -> float:
        return math.log(self.n_docs / self.df[term_id])


def build_vocabulary(docs: Sequence[Sequence[str]]) -> Vocabulary:
    """Assign ids in first-encounter order; df counts documents, not occurrences."""
    if not docs:
        raise ValueError("empty corpus")
    term_ids: dict[str, int] = {}
    df: list[int] = []
    for tokens in docs:
        seen = set()
        for tok in tokens:
            tid = term_ids.get(tok)
            if tid is None:
                tid = len(term_ids)
                term_ids[tok] = tid
                df.append(0)
            if tid not in seen:
                seen.add(tid)
                df[tid] += 1
    return Vocabulary(term_ids=term_ids, df=df, n_docs=len(docs))


@dataclass(frozen=True)
class TermVector:
    """Sparse non-negative weight vector with a cached Euclidean norm."""

    weights: dict[int, float]
    norm: float

    @classmethod
    def from_weights(cls, weights: dict[int, float]) -> "TermVector":
        nonzero = {tid: w for tid, w in weights.items() if w > 0.0}
        norm = math.sqrt(sum(w * w for w in nonzero.values()))
        return cls(weights=nonzero, norm=norm)

    def dot(self, other: "TermVector") -> float:
        # fixed term order keeps the float sum identical either way around
        a, b = self.weights, other.weights
        if len(b) < len(a):
            a, b = b, a
        return sum(a[tid] * b[tid] for tid in sorted(tid for tid in a if tid in b))

    def unit(self) -> "TermVector":
        if self.norm == 0.0:
            return self
        return TermVector(
            weights={tid: w / self.norm for tid, w in self.weights.items()},
            norm=1.0,
        )

    def is_zero(self) -> bool:
        return not self.weights


def tfidf_vector(tokens: Iterable[str], vocab: Vocabulary) -> TermVector:
    """tf * ln(N/df) weights; tokens unknown to the vocabulary are skipped."""
    counts: Counter[int] = Counter()
    for tok in tokens:
        tid = vocab.id_of(tok)
        if tid is not None:
            counts[tid] += 1
    weights = {tid: tf * vocab.idf(tid) for tid, tf in counts.items()}
    return TermVector.from_weights(weights)


def cosine_similarity(a: TermVector, b: TermVector) -> float:
    """Cosine of the angle between two vectors; 0 when either has norm 0."""
    if a.norm == 0.0 or b.norm == 0.0:
        return 0.0
    return min(1.0, a.dot(b) / (a.norm * b.norm))
