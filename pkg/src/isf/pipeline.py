"""The end-to-end search pipeline: expand, dispatch and merge, categorize,
cluster, filter, then re-rank against the user profile.

Given identical stores, profile, and request, the response is byte-identical
across runs; nothing here depends on wall-clock time or iteration order of
anything unsorted.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .classify import CategoryAssignment, CategoryClassifier, filter_by_categories
from .cluster import candidate_categories, cluster_results
from .config import PipelineConfig
from .indexing import InvertedIndex, load_index
from .metasearch import (
    DesktopBackend,
    LocalIndexBackend,
    RemoteBackend,
    StructuredRecordsBackend,
    dispatch,
    merge_results,
    select_backends,
)
from .personalize import (
    ProfileStore,
    TermCategoryStats,
    UserProfile,
    expand_query,
    rerank_by_profile,
)
from .taxonomy import Taxonomy, load_taxonomy

SNIPPET_LENGTH = 200


class PipelineError(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


class NoBackendsError(PipelineError):
    def __init__(self):
        super().__init__("dispatch", "no backends available")


class BadRequestError(ValueError):
    pass


@dataclass(frozen=True)
class ResponseEntry:
    url: str
    title: str
    snippet: str
    score: float
    primary: str
    secondary: str | None
    cluster: str | None
    source: str


@dataclass
class SearchResponse:
    query: str
    flags: list[str]
    entries: list[ResponseEntry]
    facets: list[tuple[str, int]]

    def to_json(self) -> str:
        return json.dumps(
            {
                "query": self.query,
                "flags": self.flags,
                "entries": [
                    {
                        "url": e.url,
                        "title": e.title,
                        "snippet": e.snippet,
                        "score": e.score,
                        "primary": e.primary,
                        "secondary": e.secondary,
                        "cluster": e.cluster,
                        "source": e.source,
                    }
                    for e in self.entries
                ],
                "facets": [{"path": path, "count": count} for path, count in self.facets],
            },
            ensure_ascii=False,
        )


@dataclass
class PipelineResult:
    response: SearchResponse
    assignments: dict[str, CategoryAssignment] = field(default_factory=dict)


def snippet_of(doc) -> str:
    return doc.body[:SNIPPET_LENGTH]


class Pipeline:
    """Long-lived search service state: taxonomy, classifier, expansion
    stats, backends, and the profile store."""

    def __init__(self, config: PipelineConfig, taxonomy: Taxonomy,
                 classifier: CategoryClassifier, backends: list,
                 profiles: ProfileStore, stats: TermCategoryStats | None = None):
        self.config = config
        self.taxonomy = taxonomy
        self.classifier = classifier
        self.backends = backends
        self.profiles = profiles
        self.stats = stats

    @classmethod
    def from_config(cls, config: PipelineConfig, index: InvertedIndex | None = None) -> "Pipeline":
        if config.taxonomy_path is None:
            raise PipelineError("init", "taxonomy_path is not configured")
        taxonomy = load_taxonomy(config.taxonomy_path, config.pages_path)
        classifier = CategoryClassifier(taxonomy, max_depth=config.classifier_max_depth)
        stats = TermCategoryStats(taxonomy, classifier)
        backends: list = []
        if index is None and config.index_path is not None:
            try:
                index = load_index(config.index_path)
            except FileNotFoundError:
                index = None
        if index is not None:
            private = "crawl" in config.private_sources
            backends.append(LocalIndexBackend("crawl", index, source="crawl",
                                              priority=0, private=private))
        if config.records_path is not None:
            private = "structured-records" in config.private_sources
            backends.append(StructuredRecordsBackend("records", config.records_path,
                                                     priority=1, private=private))
        if config.desktop_dir is not None:
            private = "desktop" in config.private_sources
            backends.append(DesktopBackend("desktop", config.desktop_dir,
                                           priority=2, private=private))
        for i, (name, url) in enumerate(config.remote_backends):
            backends.append(RemoteBackend(name, url, priority=3 + i,
                                          private=name in config.private_sources,
                                          timeout_s=config.backend_timeout_s))
        profiles = ProfileStore(config.profiles_dir)
        return cls(config, taxonomy, classifier, backends, profiles, stats)

    # --- request validation ------------------------------------------------

    def validate_categories(self, selected: list[str]) -> None:
        for path in selected:
            if path not in self.taxonomy:
                raise BadRequestError(f"unknown category: {path}")

    def validate_topic(self, topic: str) -> None:
        if topic not in self.taxonomy.profile_topic_paths():
            raise BadRequestError(f"unknown topic: {topic}")

    # --- the pipeline --------------------------------------------------------

    def run(
        self,
        query: str,
        user_id: str | None = None,
        selected_categories: list[str] | None = None,
        topic: str | None = None,
        k: int | None = None,
        sources: list[str] | None = None,
        token: str | None = None,
    ) -> PipelineResult:
        config = self.config
        selected = selected_categories or []
        self.validate_categories(selected)
        flags: list[str] = []

        # stage 1: query expansion
        executed = query
        if config.expansion_enabled and topic is not None and self.stats is not None:
            self.validate_topic(topic)
            expansion = expand_query(query, topic, self.stats, cap=config.expansion_cap)
            executed = expansion.text
            flags.extend(expansion.flags)

        # stage 2: select, dispatch, merge
        enabled = set(sources if sources is not None else config.sources)
        chosen = select_backends(self.backends, enabled, token=token,
                                 access_token=config.access_token)
        if not chosen:
            raise NoBackendsError()
        by_name = dispatch(executed, chosen, cap=config.backend_cap,
                           timeout_s=config.backend_timeout_s)
        lists = [by_name[b.name] for b in chosen]
        for backend, lst in zip(chosen, lists):
            if "failed" in lst.flags:
                flags.append(f"backend-failed:{backend.name}")
        if all("failed" in lst.flags for lst in lists):
            flags.append("all-backends-failed")
            response = SearchResponse(query=executed, flags=sorted(set(flags)),
                                      entries=[], facets=[])
            return PipelineResult(response=response)
        merged = merge_results(lists, [b.priority for b in chosen])
        entries = merged.entries[: (k or config.result_k)]

        # stage 3: categorize each result on its title + snippet
        assignments: dict[str, CategoryAssignment] = {}
        vectors = {}
        for entry in entries:
            text = f"{entry.doc.title} {snippet_of(entry.doc)}"
            assignments[entry.doc.url] = self.classifier.assign(
                entry.doc.url, text, config.k_neighbors
            )
            vectors[entry.doc.url] = self.classifier.vectorize(text)

        # stage 4: cluster
        cluster_labels: dict[str, str] = {}
        if config.cluster_enabled and entries:
            tops = candidate_categories(assignments, self.taxonomy)
            top_vectors = {path: self.classifier.category_vector(path) for path in tops}
            cluster_labels, converged = cluster_results(
                vectors, assignments, top_vectors, max_iter=config.kmeans_max_iter
            )
            if not converged:
                flags.append("unconverged")

        # stage 5: category filter
        entries = filter_by_categories(entries, assignments, selected)

        # stage 6: profile re-rank
        profile = self.profiles.load(user_id) if user_id else UserProfile(user_id="")
        entries = rerank_by_profile(entries, assignments, profile, self.taxonomy)

        facet_counts = Counter(assignments[e.doc.url].primary for e in entries)
        response_entries = [
            ResponseEntry(
                url=e.doc.url,
                title=e.doc.title,
                snippet=snippet_of(e.doc),
                score=e.score,
                primary=assignments[e.doc.url].primary,
                secondary=assignments[e.doc.url].secondary,
                cluster=cluster_labels.get(e.doc.url),
                source=e.source,
            )
            for e in entries
        ]
        response = SearchResponse(
            query=executed,
            flags=sorted(set(flags)),
            entries=response_entries,
            facets=sorted(facet_counts.items()),
        )
        return PipelineResult(response=response, assignments=assignments)
