"""Category hierarchy, category-documents, and the profile-topic cut.

Taxonomy files are UTF-8 TSV: ``path<TAB>title<TAB>description`` with '#'
comments and blank lines ignored. Submitted pages live in a companion TSV:
``path<TAB>page_title<TAB>page_description``. A taxonomy is immutable after
load and safe to share across threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .textproc import TermVector, Vocabulary, tfidf_vector, tokenize

UNCLASSIFIED = "Unclassified"


class TaxonomyError(ValueError):
    pass


@dataclass
class Category:
    path: str
    title: str
    description: str = ""
    pages: list[tuple[str, str]] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return self.path.count("/")

    def parent_path(self) -> str | None:
        if "/" not in self.path:
            return None
        return self.path.rsplit("/", 1)[0]

    def text(self) -> str:
        """Title, description, then every submitted page's title and description."""
        parts = [self.title, self.description]
        for page_title, page_desc in self.pages:
            parts.append(page_title)
            parts.append(page_desc)
        return " ".join(p for p in parts if p)


class Taxonomy:
    """Rooted tree of categories keyed by slash-separated path."""

    def __init__(self, categories: dict[str, Category], root: str):
        self.categories = categories
        self.root = root
        self.children: dict[str, list[str]] = {p: [] for p in categories}
        for path, cat in categories.items():
            parent = cat.parent_path()
            if parent is not None:
                self.children[parent].append(path)
        self._profile_topic_paths: frozenset[str] | None = None

    def profile_topic_paths(self) -> frozenset[str]:
        if self._profile_topic_paths is None:
            self._profile_topic_paths = frozenset(c.path for c in profile_topics(self))
        return self._profile_topic_paths

    def __contains__(self, path: str) -> bool:
        return path in self.categories

    def get(self, path: str) -> Category:
        try:
            return self.categories[path]
        except KeyError:
            raise TaxonomyError(f"unknown category: {path}") from None

    def at_depth(self, depth: int) -> list[Category]:
        return [c for c in self.categories.values() if c.depth == depth]

    def top_level_ancestor(self, path: str) -> str:
        """Depth-1 ancestor of a path (the path itself at depth <= 1)."""
        parts = path.split("/")
        return "/".join(parts[:2]) if len(parts) >= 2 else path

    def leaves(self) -> list[Category]:
        return [c for p, c in self.categories.items() if not self.children[p]]

    def classification_targets(self, max_depth: int | None = None) -> list[Category]:
        """Leaf categories plus any category with submitted pages."""
        out = []
        for path, cat in self.categories.items():
            if max_depth is not None and cat.depth > max_depth:
                continue
            if not self.children[path] or cat.pages:
                out.append(cat)
        return out

    def serialize(self) -> str:
        lines = []
        for path in sorted(self.categories):
            cat = self.categories[path]
            lines.append(f"{path}\t{cat.title}\t{cat.description}")
        return "\n".join(lines) + "\n"


def _parse_tsv(path) -> Iterable[tuple[int, list[str]]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line.split("\t")


def load_taxonomy(taxonomy_path, pages_path=None) -> Taxonomy:
    """Parse a taxonomy file (and optional pages file) into a validated tree."""
    categories: dict[str, Category] = {}
    for lineno, fields in _parse_tsv(taxonomy_path):
        if len(fields) < 2:
            raise TaxonomyError(f"{taxonomy_path}:{lineno}: expected path<TAB>title[<TAB>description]")
        cat_path = fields[0].strip()
        if not cat_path or cat_path.startswith("/") or cat_path.endswith("/") or "//" in cat_path:
            raise TaxonomyError(f"{taxonomy_path}:{lineno}: malformed path {cat_path!r}")
        if cat_path in categories:
            raise TaxonomyError(f"{taxonomy_path}:{lineno}: duplicate path {cat_path!r}")
        description = fields[2] if len(fields) > 2 else ""
        categories[cat_path] = Category(path=cat_path, title=fields[1], description=description)

    roots = [p for p in categories if "/" not in p]
    if not categories:
        raise TaxonomyError(f"{taxonomy_path}: empty taxonomy")
    if len(roots) != 1:
        raise TaxonomyError(f"{taxonomy_path}: expected exactly one root, found {len(roots)}")
    for path, cat in categories.items():
        parent = cat.parent_path()
        if parent is not None and parent not in categories:
            raise TaxonomyError(f"{taxonomy_path}: missing parent {parent!r} for {path!r}")

    if pages_path is not None:
        for lineno, fields in _parse_tsv(pages_path):
            if len(fields) < 2:
                raise TaxonomyError(f"{pages_path}:{lineno}: expected path<TAB>title[<TAB>description]")
            cat_path = fields[0].strip()
            if cat_path not in categories:
                raise TaxonomyError(f"{pages_path}:{lineno}: unknown category {cat_path!r}")
            desc = fields[2] if len(fields) > 2 else ""
            categories[cat_path].pages.append((fields[1], desc))

    return Taxonomy(categories, root=roots[0])


@dataclass(frozen=True)
class CategoryDocument:
    """A category's descriptive text rendered as a tf-idf exemplar vector."""

    category: Category
    vector: TermVector


def category_document(taxonomy: Taxonomy, cat: Category | str, vocab: Vocabulary) -> CategoryDocument:
    if isinstance(cat, str):
        cat = taxonomy.get(cat)
    elif cat.path not in taxonomy:
        raise TaxonomyError(f"unknown category: {cat.path}")
    return CategoryDocument(category=cat, vector=tfidf_vector(tokenize(cat.text()), vocab))


def profile_topics(taxonomy: Taxonomy) -> list[Category]:
    """Categories two levels below the root; falls back to depth 1 when the
    tree is too shallow to have any."""
    topics = taxonomy.at_depth(2)
    if not topics:
        topics = taxonomy.at_depth(1)
    return sorted(topics, key=lambda c: c.path)
