"""Metasearch: pluggable backends, concurrent dispatch, and CombSUM merging.

Backends wrap a local inverted index, a tab-separated structured-records
store, a desktop directory of text files, or a remote peer exposing the
same /search HTTP shape. Per-list scores are min-max normalized before
duplicate URLs are merged by summing.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import requests

from .crawler import canonicalize_url
from .indexing import (
    Document,
    InvertedIndex,
    RankedEntry,
    RankedList,
    SOURCE_DESKTOP,
    SOURCE_RECORDS,
    index_documents,
    search,
)


@dataclass(frozen=True)
class BackendDescriptor:
    name: str
    kind: str
    healthy: bool
    priority: int
    private: bool = False


class LocalIndexBackend:
    """Search over an already-built inverted index (the crawl RDB index)."""

    kind = "local-index"

    def __init__(self, name: str, index: InvertedIndex, source: str = "crawl",
                 priority: int = 0, private: bool = False):
        self.name = name
        self.index = index
        self.source = source
        self.priority = priority
        self.private = private

    def healthy(self) -> bool:
        return self.index.committed and len(self.index) > 0

    def search(self, query: str, k: int) -> RankedList:
        result = search(self.index, query, k)
        result.entries = [
            RankedEntry(doc=e.doc, score=e.score, source=self.source)
            for e in result.entries
        ]
        return result

    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(self.name, self.kind, self.healthy(), self.priority, self.private)


class StructuredRecordsBackend:
    """Tabular rows scored by cosine over their concatenated text fields.

    The store is a TSV file with a header row; an ``id`` column names rows,
    a ``url`` column gives them addresses, and every column contributes to
    the searchable text.
    """

    kind = "structured-records"
    source = SOURCE_RECORDS

    def __init__(self, name: str, path, priority: int = 0, private: bool = False):
        self.name = name
        self.path = os.fspath(path) if path is not None else None
        self.priority = priority
        self.private = private
        self.index: InvertedIndex | None = None
        if self.path is not None and os.path.exists(self.path):
            self.index = index_documents(self._load_rows())

    def _load_rows(self):
        assert self.path is not None
        with open(self.path, encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
        if not lines:
            return
        header = [h.strip().lower() for h in lines[0].split("\t")]
        title_key = "title" if "title" in header else ("name" if "name" in header else None)
        for i, line in enumerate(lines[1:]):
            fields = line.split("\t")
            row = dict(zip(header, fields))
            row_id = row.get("id") or f"row{i}"
            url = row.get("url") or f"records://{self.name}/{row_id}"
            title = row.get(title_key) if title_key else row_id
            skip = {"id", "url", title_key}
            body = " ".join(v for k, v in row.items() if k not in skip and v)
            yield Document(id=row_id, url=url, title=title or row_id, body=body,
                           source=SOURCE_RECORDS)

    def healthy(self) -> bool:
        return self.index is not None and len(self.index) > 0

    def search(self, query: str, k: int) -> RankedList:
        if self.index is None:
            return RankedList(query=query, flags=["missing-store"])
        return search(self.index, query, k)

    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(self.name, self.kind, self.healthy(), self.priority, self.private)


def query_structured_records(query: str, backend: StructuredRecordsBackend, k: int = 10) -> RankedList:
    """Rows matching the query, cosine-ranked; a missing store yields an
    empty, flagged list."""
    return backend.search(query, k)


class DesktopBackend:
    """Index a configured directory of plain-text files."""

    kind = "local-index"
    source = SOURCE_DESKTOP
    _EXTENSIONS = (".txt", ".md", ".text", ".rst")

    def __init__(self, name: str, directory, priority: int = 0, private: bool = False):
        self.name = name
        self.directory = Path(directory) if directory is not None else None
        self.priority = priority
        self.private = private
        self.index: InvertedIndex | None = None
        if self.directory is not None and self.directory.is_dir():
            self.index = index_documents(self._load_files())

    def _load_files(self):
        assert self.directory is not None
        for path in sorted(self.directory.rglob("*")):
            if path.suffix.lower() not in self._EXTENSIONS or not path.is_file():
                continue
            rel = path.relative_to(self.directory).as_posix()
            try:
                body = path.read_text("utf-8", errors="replace")
            except OSError:
                continue
            yield Document(
                id=rel,
                url=path.resolve().as_uri(),
                title=path.stem.replace("_", " ").replace("-", " "),
                body=body,
                source=SOURCE_DESKTOP,
            )

    def healthy(self) -> bool:
        return self.index is not None and len(self.index) > 0

    def search(self, query: str, k: int) -> RankedList:
        if self.index is None:
            return RankedList(query=query, flags=["missing-directory"])
        return search(self.index, query, k)

    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(self.name, self.kind, self.healthy(), self.priority, self.private)


class RemoteBackend:
    """A peer service reachable over HTTP with the same /search shape."""

    kind = "remote"

    def __init__(self, name: str, base_url: str, priority: int = 0,
                 private: bool = False, timeout_s: float = 5.0):
        self.name = name
        self.source = name
        self.base_url = base_url.rstrip("/")
        self.priority = priority
        self.private = private
        self.timeout_s = timeout_s

    def healthy(self) -> bool:
        try:
            resp = requests.get(f"{self.base_url}/health", timeout=self.timeout_s)
        except requests.RequestException:
            return False
        return resp.status_code == 200

    def search(self, query: str, k: int) -> RankedList:
        resp = requests.get(
            f"{self.base_url}/search",
            params={"q": query, "k": str(k)},
            timeout=self.timeout_s,
        )
        resp.raise_for_status()
        payload = resp.json()
        entries = []
        for i, obj in enumerate(payload.get("entries", [])):
            doc = Document(
                id=obj.get("url") or f"{self.name}-{i}",
                url=obj.get("url", ""),
                title=obj.get("title", ""),
                body=obj.get("snippet", ""),
                source=self.name,
            )
            entries.append(RankedEntry(doc=doc, score=float(obj.get("score", 0.0)), source=self.name))
        return RankedList(query=query, entries=entries)

    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(self.name, self.kind, self.healthy(), self.priority, self.private)


def select_backends(backends: Sequence, enabled_sources: set[str] | None,
                    token: str | None = None, access_token: str | None = None) -> list:
    """Healthy backends whose source (or name) the caller enabled; private
    backends require the configured access token."""
    chosen = []
    for backend in backends:
        source = getattr(backend, "source", backend.name)
        if enabled_sources is not None and source not in enabled_sources and backend.name not in enabled_sources:
            continue
        if backend.private and (access_token is None or token != access_token):
            continue
        if not backend.healthy():
            continue
        chosen.append(backend)
    chosen.sort(key=lambda b: (b.priority, b.name))
    return chosen


def dispatch(query: str, backends: Sequence, cap: int = 20,
             timeout_s: float | None = None) -> dict[str, RankedList]:
    """Query every backend concurrently, each limited to cap documents.
    A failing backend contributes an empty, flagged list."""
    results: dict[str, RankedList] = {}
    if not backends:
        return results

    def run(backend) -> RankedList:
        try:
            return backend.search(query, cap)
        except Exception:
            return RankedList(query=query, flags=["failed"])

    with ThreadPoolExecutor(max_workers=max(1, len(backends))) as pool:
        futures = {backend.name: pool.submit(run, backend) for backend in backends}
        for name, future in futures.items():
            try:
                results[name] = future.result(timeout=timeout_s)
            except Exception:
                results[name] = RankedList(query=query, flags=["failed"])
    return results


def _merge_key(url: str) -> str:
    return canonicalize_url(url) or url


def merge_results(lists: Sequence[RankedList], priorities: Sequence[int] | None = None) -> RankedList:
    """Min-max normalize each list to [0,1] (a constant list maps to all
    ones), then CombSUM duplicate URLs; order by merged score desc, best
    contributing backend priority asc, URL asc."""
    if not lists:
        raise ValueError("merge_results needs at least one ranked list")
    if priorities is None:
        priorities = list(range(len(lists)))
    merged: dict[str, dict] = {}
    flags: list[str] = []
    for lst, priority in zip(lists, priorities):
        for flag in lst.flags:
            if flag not in flags:
                flags.append(flag)
        if not lst.entries:
            continue
        scores = [e.score for e in lst.entries]
        lo, hi = min(scores), max(scores)
        for e in lst.entries:
            norm = 1.0 if hi == lo else (e.score - lo) / (hi - lo)
            key = _merge_key(e.doc.url)
            slot = merged.setdefault(
                key, {"score": 0.0, "priority": priority, "best": None, "entry": None}
            )
            slot["score"] += norm
            slot["priority"] = min(slot["priority"], priority)
            rep_rank = (-norm, priority, e.doc.url)
            if slot["best"] is None or rep_rank < slot["best"]:
                slot["best"] = rep_rank
                slot["entry"] = e
    entries = [
        RankedEntry(doc=slot["entry"].doc, score=slot["score"], source=slot["entry"].source)
        for slot in merged.values()
    ]
    order = {id(e): merged[_merge_key(e.doc.url)]["priority"] for e in entries}
    entries.sort(key=lambda e: (-e.score, order[id(e)], e.doc.url))
    return RankedList(query=lists[0].query, entries=entries, flags=flags)
