"""Inverted index over documents and cosine-ranked search.

The index is single-writer: add documents, then commit() to produce the
searchable state (document frequencies and norms are rebuilt on every
commit, so idf-dependent scores are never stale). Readers see a committed
snapshot only.
"""
from __future__ import annotations

import json
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .textproc import TermVector, Vocabulary, tfidf_vector, tokenize

SOURCE_CRAWL = "crawl"
SOURCE_RECORDS = "structured-records"
SOURCE_DESKTOP = "desktop"


@dataclass(frozen=True)
class Document:
    id: str
    url: str
    title: str
    body: str
    source: str = SOURCE_CRAWL

    def text(self) -> str:
        return f"{self.title} {self.body}".strip()


@dataclass(frozen=True)
class RankedEntry:
    doc: Document
    score: float
    source: str


@dataclass
class RankedList:
    query: str
    entries: list[RankedEntry] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


class DuplicateDocumentError(ValueError):
    pass


class InvertedIndex:
    """Postings keyed by term id, one posting list per term, plus per-doc
    tf-idf norms for cosine scoring."""

    def __init__(self):
        self.docs: dict[str, Document] = {}
        self._token_counts: dict[str, Counter[str]] = {}
        self.vocab: Vocabulary | None = None
        self.postings: dict[int, list[tuple[str, int]]] = {}
        self.norms: dict[str, float] = {}
        self._committed = False

    def __len__(self) -> int:
        return len(self.docs)

    @property
    def committed(self) -> bool:
        return self._committed

    def add(self, doc: Document) -> None:
        if doc.id in self.docs:
            raise DuplicateDocumentError(f"duplicate document id: {doc.id}")
        if not doc.text():
            raise ValueError(f"document {doc.id} has neither title nor body")
        self.docs[doc.id] = doc
        self._token_counts[doc.id] = Counter(tokenize(doc.text()))
        self._committed = False

    def commit(self) -> None:
        """Rebuild vocabulary, postings, and norms over the current docs."""
        doc_ids = sorted(self.docs)
        term_ids: dict[str, int] = {}
        df_by_term: list[int] = []
        for doc_id in doc_ids:
            for term in self._token_counts[doc_id]:
                if term not in term_ids:
                    term_ids[term] = len(term_ids)
                    df_by_term.append(0)
                df_by_term[term_ids[term]] += 1
        self.vocab = Vocabulary(term_ids=term_ids, df=df_by_term, n_docs=len(doc_ids))

        self.postings = {tid: [] for tid in range(len(term_ids))}
        self.norms = {}
        for doc_id in doc_ids:
            sq = 0.0
            for term, tf in self._token_counts[doc_id].items():
                tid = term_ids[term]
                self.postings[tid].append((doc_id, tf))
                w = tf * self.vocab.idf(tid)
                sq += w * w
            self.norms[doc_id] = math.sqrt(sq)
        self._committed = True

    def doc_vector(self, doc_id: str) -> TermVector:
        assert self.vocab is not None
        weights = {
            self.vocab.term_ids[t]: tf * self.vocab.idf(self.vocab.term_ids[t])
            for t, tf in self._token_counts[doc_id].items()
        }
        return TermVector.from_weights(weights)


def index_documents(docs: Iterable[Document]) -> InvertedIndex:
    index = InvertedIndex()
    for doc in docs:
        index.add(doc)
    index.commit()
    return index


def search(index: InvertedIndex, query: str, k: int = 10) -> RankedList:
    """Top-k documents by cosine similarity between the query's tf-idf
    vector and each document's; zero-score documents are excluded."""
    if not index.committed:
        raise RuntimeError("index has uncommitted documents")
    tokens = tokenize(query)
    if not tokens:
        return RankedList(query=query, flags=["empty-query"])
    assert index.vocab is not None
    qvec = tfidf_vector(tokens, index.vocab)
    if qvec.is_zero():
        return RankedList(query=query)
    scores: dict[str, float] = {}
    for tid, qw in qvec.weights.items():
        idf = index.vocab.idf(tid)
        for doc_id, tf in index.postings[tid]:
            scores[doc_id] = scores.get(doc_id, 0.0) + qw * tf * idf
    entries = []
    for doc_id, dot in scores.items():
        denom = qvec.norm * index.norms[doc_id]
        if denom <= 0.0:
            continue
        score = min(1.0, dot / denom)
        if score > 0.0:
            doc = index.docs[doc_id]
            entries.append(RankedEntry(doc=doc, score=score, source=doc.source))
    entries.sort(key=lambda e: (-e.score, e.doc.id))
    return RankedList(query=query, entries=entries[:k])


def save_index(index: InvertedIndex, path) -> None:
    """Persist the document set; the index proper is rebuilt on load, which
    keeps the on-disk format trivial and the rebuild deterministic."""
    payload = {
        "documents": [
            {
                "id": d.id,
                "url": d.url,
                "title": d.title,
                "body": d.body,
                "source": d.source,
            }
            for _, d in sorted(index.docs.items())
        ]
    }
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)
    os.replace(tmp, path)


def load_index(path) -> InvertedIndex:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return index_documents(
        Document(
            id=obj["id"],
            url=obj["url"],
            title=obj["title"],
            body=obj["body"],
            source=obj.get("source", SOURCE_CRAWL),
        )
        for obj in payload["documents"]
    )
