"""User profiles over taxonomy topics, chi-square term selection, query
expansion, and profile-driven re-ranking.

A profile is a (topic path -> integer weight) map over the profile-topic
cut of the taxonomy. Visits bump the topic of the visited result; expansion
appends the visited topic's most dependent terms; re-ranking multiplies a
result's score by 1 + w/W.
"""
from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field

from .classify import CategoryAssignment, CategoryClassifier
from .taxonomy import UNCLASSIFIED, Taxonomy, profile_topics
from .textproc import tokenize

CHI_SQUARE_CUTOFF = 10.83


class ProfileError(ValueError):
    pass


@dataclass
class UserProfile:
    user_id: str
    weights: dict[str, int] = field(default_factory=dict)
    created_at: float = 0.0
    updated_at: float = 0.0

    def weight_of(self, topic: str) -> int:
        return self.weights.get(topic, 0)

    def max_weight(self) -> int:
        return max(self.weights.values(), default=0)

    def to_json(self) -> str:
        return json.dumps(
            {
                "user_id": self.user_id,
                "weights": {t: self.weights[t] for t in sorted(self.weights)},
                "created_at": self.created_at,
                "updated_at": self.updated_at,
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, text: str) -> "UserProfile":
        obj = json.loads(text)
        return cls(
            user_id=obj["user_id"],
            weights={k: int(v) for k, v in obj.get("weights", {}).items()},
            created_at=float(obj.get("created_at", 0.0)),
            updated_at=float(obj.get("updated_at", 0.0)),
        )


def init_profile(
    user_id: str,
    topic_weights: list[tuple[str, int]],
    taxonomy: Taxonomy,
) -> UserProfile:
    """Create a profile from explicit (topic, weight) choices; topics must
    be profile topics, weights non-negative, duplicates rejected."""
    valid = taxonomy.profile_topic_paths()
    weights: dict[str, int] = {}
    for topic, weight in topic_weights:
        if topic not in valid:
            raise ProfileError(f"invalid topic: {topic}")
        if weight < 0:
            raise ProfileError(f"negative weight for topic: {topic}")
        if topic in weights:
            raise ProfileError(f"duplicate topic: {topic}")
        weights[topic] = weight
    now = time.time()
    return UserProfile(user_id=user_id, weights=weights, created_at=now, updated_at=now)


def profile_topic_of(path: str, taxonomy: Taxonomy) -> str | None:
    """Ancestor of a category path at the profile-topic level, or None when
    the path is unclassified or sits above that level."""
    if path == UNCLASSIFIED:
        return None
    valid = taxonomy.profile_topic_paths()
    parts = path.split("/")
    for end in range(len(parts), 0, -1):
        candidate = "/".join(parts[:end])
        if candidate in valid:
            return candidate
    return None


def record_visit(profile: UserProfile, assignment: CategoryAssignment, taxonomy: Taxonomy) -> list[str]:
    """Bump the profile topic of the visited result's primary category (and
    of its secondary, when the two map to distinct topics). Returns the
    topics that changed; unclassified visits change nothing."""
    topics = []
    for cat in assignment.categories():
        topic = profile_topic_of(cat, taxonomy)
        if topic is not None and topic not in topics:
            topics.append(topic)
    for topic in topics:
        profile.weights[topic] = profile.weights.get(topic, 0) + 1
    if topics:
        profile.updated_at = time.time()
    return topics


class ProfileStore:
    """One JSON record per user on disk, atomically rewritten; writes are
    serialized, reads see a complete pre- or post-update record."""

    def __init__(self, directory):
        self.directory = os.fspath(directory)
        os.makedirs(self.directory, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, user_id: str) -> str:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in user_id)
        return os.path.join(self.directory, f"{safe}.json")

    def load(self, user_id: str) -> UserProfile:
        path = self._path(user_id)
        if not os.path.exists(path):
            return UserProfile(user_id=user_id)
        with open(path, encoding="utf-8") as fh:
            return UserProfile.from_json(fh.read())

    def save(self, profile: UserProfile) -> None:
        path = self._path(profile.user_id)
        tmp = f"{path}.tmp"
        with self._lock:
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(profile.to_json() + "\n")
            os.replace(tmp, path)

    def update(self, user_id: str, mutate) -> UserProfile:
        with self._lock:
            path = self._path(user_id)
            if os.path.exists(path):
                with open(path, encoding="utf-8") as fh:
                    profile = UserProfile.from_json(fh.read())
            else:
                now = time.time()
                profile = UserProfile(user_id=user_id, created_at=now, updated_at=now)
            mutate(profile)
            tmp = f"{path}.tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(profile.to_json() + "\n")
            os.replace(tmp, path)
            return profile


# --- chi-square term/topic association -------------------------------------

def chi_square_cells(a: float, b: float, c: float, d: float) -> float:
    """Association statistic from a 2x2 contingency table
    (a=t&c, b=t&!c, c=!t&c, d=!t&!c); degenerate marginals give 0."""
    n = a + b + c + d
    if n <= 0:
        return 0.0
    p_tc, p_tnc, p_ntc, p_ntnc = a / n, b / n, c / n, d / n
    p_t, p_nt = p_tc + p_tnc, p_ntc + p_ntnc
    p_c, p_nc = p_tc + p_ntc, p_tnc + p_ntnc
    denom = p_t * p_nt * p_c * p_nc
    if denom <= 0.0:
        return 0.0
    return n * (p_tc * p_ntnc - p_tnc * p_ntc) ** 2 / denom


class TermCategoryStats:
    """Binary term occurrence over the profile topics' category-documents,
    with add-one smoothing on the 2x2 cells."""

    def __init__(self, taxonomy: Taxonomy, classifier: CategoryClassifier):
        self.taxonomy = taxonomy
        self.topics = [c.path for c in profile_topics(taxonomy)]
        self.n = len(self.topics)
        self._term_sets: dict[str, set[int]] = {}
        df: dict[int, int] = {}
        for path in self.topics:
            terms = set(classifier.category_vector(path).weights)
            self._term_sets[path] = terms
            for tid in terms:
                df[tid] = df.get(tid, 0) + 1
        self._df = df
        self.vocab = classifier.vocab

    def topic_terms(self, topic: str) -> set[int]:
        return self._term_sets.get(topic, set())

    def chi_square(self, term_id: int, topic: str) -> float:
        """Smoothed association between a term and one topic, scaled by the
        (unsmoothed) topic count."""
        if topic not in self._term_sets:
            raise ProfileError(f"invalid topic: {topic}")
        a = 1 if term_id in self._term_sets[topic] else 0
        df = self._df.get(term_id, 0)
        b = df - a
        c = 1 - a
        d = (self.n - 1) - b
        sa, sb, sc, sd = a + 1, b + 1, c + 1, d + 1
        total = self.n + 4
        p_tc, p_tnc = sa / total, sb / total
        p_ntc, p_ntnc = sc / total, sd / total
        p_t, p_nt = p_tc + p_tnc, p_ntc + p_ntnc
        p_c, p_nc = p_tc + p_ntc, p_tnc + p_ntnc
        return self.n * (p_tc * p_ntnc - p_tnc * p_ntc) ** 2 / (p_t * p_nt * p_c * p_nc)


@dataclass
class ExpandedQuery:
    text: str
    added_terms: list[str]
    flags: list[str] = field(default_factory=list)


def expand_query(
    query: str,
    topic: str,
    stats: TermCategoryStats,
    cap: int | None = 5,
) -> ExpandedQuery:
    """Append the topic's most topic-dependent terms (statistic above the
    99.9% confidence cutoff), strongest first, skipping terms already in
    the query."""
    present = set(tokenize(query))
    id_to_term = {tid: term for term, tid in stats.vocab.term_ids.items()}
    candidates = []
    for tid in stats.topic_terms(topic):
        term = id_to_term[tid]
        if term in present:
            continue
        score = stats.chi_square(tid, topic)
        if score > CHI_SQUARE_CUTOFF:
            candidates.append((score, term))
    candidates.sort(key=lambda pair: (-pair[0], pair[1]))
    if cap is not None:
        candidates = candidates[:cap]
    if not candidates:
        return ExpandedQuery(text=query, added_terms=[], flags=["no-expansion"])
    added = [term for _, term in candidates]
    return ExpandedQuery(text=f"{query} {' '.join(added)}", added_terms=added)


# --- re-ranking -------------------------------------------------------------

def rerank_by_profile(entries, assignments: dict[str, CategoryAssignment],
                      profile: UserProfile, taxonomy: Taxonomy):
    """Scale each entry's score by 1 + w/W where w is the profile weight of
    the entry's topic and W the profile's max weight; resort. An empty
    profile leaves scores untouched."""
    w_max = max(1, profile.max_weight())
    rescored = []
    for entry in entries:
        assignment = assignments.get(entry.doc.url)
        weight = 0
        if assignment is not None:
            topic = profile_topic_of(assignment.primary, taxonomy)
            if topic is not None:
                weight = profile.weight_of(topic)
        factor = 1.0 + weight / w_max
        rescored.append(type(entry)(doc=entry.doc, score=entry.score * factor, source=entry.source))
    rescored.sort(key=lambda e: (-e.score, e.doc.url))
    return rescored
