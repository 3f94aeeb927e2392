"""Focused crawler: seed injection, rank-prioritized frontier, polite
parallel fetching, domain and relevance filtering, and low-rank pruning.

The loop alternates: pop a batch of the highest-ranked pending URLs, fetch
them in parallel, store every fetch (relevant ones additionally in the RDB),
fold extracted links back into the graph, recompute ranks, prune, and
reprioritize. The graph and frontier are only mutated between batches.
"""
from __future__ import annotations

import threading
import time
import urllib.robotparser
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from html.parser import HTMLParser
from urllib.parse import urljoin, urlsplit, urlunsplit

import requests

from .pagerank import LinkGraph, compute_pagerank, prune_low_rank
from .records import PageRecord, RecordStore

DEFAULT_USER_AGENT = "isf-crawler/0.1"

STATUS_ERROR = 0
STATUS_ROBOTS_BLOCKED = -1


@dataclass
class CrawlConfig:
    seeds_path: str
    budget: int = 100
    delta: float = 0.85
    epsilon: float = 0.1
    width: int = 4
    per_host_delay_ms: int = 500
    timeout_s: float = 10.0
    obey_robots: bool = True
    user_agent: str = DEFAULT_USER_AGENT

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be >= 0")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.width < 1:
            raise ValueError("width must be >= 1")


@dataclass
class FetchResult:
    url: str
    status: int
    title: str = ""
    text: str = ""
    outlinks: list[str] = field(default_factory=list)
    fetched_at: float = 0.0


# --- URL handling ---------------------------------------------------------

def _normalize_path(path: str) -> str:
    if not path:
        return "/"
    trailing = path.endswith("/")
    parts = []
    for seg in path.split("/"):
        if seg == "" or seg == ".":
            continue
        if seg == "..":
            if parts:
                parts.pop()
        else:
            parts.append(seg)
    out = "/" + "/".join(parts)
    if trailing and not out.endswith("/"):
        out += "/"
    return out


def canonicalize_url(url: str, base: str | None = None) -> str | None:
    """Canonical form: lowercase scheme/host, no fragment, no default port,
    dot segments resolved, query preserved. Non-http(s) URLs map to None."""
    if base is not None:
        url = urljoin(base, url)
    try:
        parts = urlsplit(url)
    except ValueError:
        return None
    scheme = parts.scheme.lower()
    if scheme not in ("http", "https"):
        return None
    host = (parts.hostname or "").lower()
    if not host:
        return None
    port = parts.port
    netloc = host
    if port is not None and not (
        (scheme == "http" and port == 80) or (scheme == "https" and port == 443)
    ):
        netloc = f"{host}:{port}"
    return urlunsplit((scheme, netloc, _normalize_path(parts.path), parts.query, ""))


def registrable_domain(url_or_host: str) -> str:
    """Registrable domain approximated as the last two host labels; IP
    literals and single-label hosts map to themselves."""
    host = url_or_host
    if "//" in host:
        host = urlsplit(host).hostname or ""
    host = host.lower().rstrip(".").split(":")[0]
    labels = host.split(".")
    if len(labels) < 2 or all(l.isdigit() for l in labels):
        return host
    return ".".join(labels[-2:])


def domain_filter(urls: list[str], seed_domains: set[str]) -> list[str]:
    """Keep only URLs whose registrable domain belongs to a seed."""
    return [u for u in urls if registrable_domain(u) in seed_domains]


# --- HTML extraction ------------------------------------------------------

class _PageExtractor(HTMLParser):
    _SKIP = {"script", "style", "noscript"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.title_parts: list[str] = []
        self.text_parts: list[str] = []
        self.hrefs: list[str] = []
        self._in_title = False
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1
        elif tag == "title":
            self._in_title = True
        elif tag == "a":
            for name, value in attrs:
                if name == "href" and value:
                    self.hrefs.append(value)

    def handle_endtag(self, tag):
        if tag in self._SKIP and self._skip_depth > 0:
            self._skip_depth -= 1
        elif tag == "title":
            self._in_title = False

    def handle_data(self, data):
        if self._skip_depth:
            return
        if self._in_title:
            self.title_parts.append(data)
        elif data.strip():
            self.text_parts.append(data.strip())


def extract_page(html: str, base_url: str) -> tuple[str, str, list[str]]:
    """Title, visible text, and canonical absolute outlinks of an HTML page."""
    parser = _PageExtractor()
    parser.feed(html)
    parser.close()
    title = " ".join(" ".join(parser.title_parts).split())
    text = " ".join(parser.text_parts)
    outlinks = []
    seen = set()
    for href in parser.hrefs:
        canon = canonicalize_url(href, base=base_url)
        if canon is not None and canon not in seen:
            seen.add(canon)
            outlinks.append(canon)
    return title, text, outlinks


# --- fetching -------------------------------------------------------------

def fetch(
    url: str,
    timeout_s: float = 10.0,
    user_agent: str = DEFAULT_USER_AGENT,
    session: requests.Session | None = None,
) -> FetchResult:
    """HTTP GET with timeout; never raises. Non-2xx and transport errors
    come back with empty text and no outlinks."""
    getter = session.get if session is not None else requests.get
    fetched_at = time.time()
    try:
        resp = getter(url, timeout=timeout_s, headers={"User-Agent": user_agent})
    except requests.RequestException:
        return FetchResult(url=url, status=STATUS_ERROR, fetched_at=fetched_at)
    status = resp.status_code
    if not 200 <= status < 300:
        return FetchResult(url=url, status=status, fetched_at=fetched_at)
    ctype = resp.headers.get("Content-Type", "")
    if "html" in ctype or ctype == "":
        title, text, outlinks = extract_page(resp.text, base_url=url)
        return FetchResult(url, status, title, text, outlinks, fetched_at)
    if ctype.startswith("text/"):
        return FetchResult(url, status, "", resp.text, [], fetched_at)
    return FetchResult(url=url, status=status, fetched_at=fetched_at)


class RobotsCache:
    """Per-host robots.txt rules; unreachable or missing files allow all."""

    def __init__(self, timeout_s: float = 5.0, user_agent: str = DEFAULT_USER_AGENT):
        self.timeout_s = timeout_s
        self.user_agent = user_agent
        self._parsers: dict[str, urllib.robotparser.RobotFileParser | None] = {}
        self._lock = threading.Lock()

    def allowed(self, url: str) -> bool:
        parts = urlsplit(url)
        base = f"{parts.scheme}://{parts.netloc}"
        with self._lock:
            if base not in self._parsers:
                self._parsers[base] = self._load(base)
            parser = self._parsers[base]
        if parser is None:
            return True
        try:
            return parser.can_fetch(self.user_agent, url)
        except Exception:
            return True

    def _load(self, base: str):
        try:
            resp = requests.get(
                base + "/robots.txt",
                timeout=self.timeout_s,
                headers={"User-Agent": self.user_agent},
            )
        except requests.RequestException:
            return None
        if resp.status_code != 200:
            return None
        parser = urllib.robotparser.RobotFileParser()
        parser.parse(resp.text.splitlines())
        return parser


# --- frontier -------------------------------------------------------------

class Frontier:
    """Priority queue of pending URLs plus a seen-set; a URL is yielded at
    most once, highest priority first, ties broken by URL order."""

    def __init__(self):
        self._pending: dict[str, float] = {}
        self._seen: set[str] = set()

    def __len__(self) -> int:
        return len(self._pending)

    def add(self, url: str, priority: float) -> bool:
        if url in self._seen:
            return False
        self._seen.add(url)
        self._pending[url] = priority
        return True

    def update_priority(self, url: str, priority: float) -> None:
        if url in self._pending:
            self._pending[url] = priority

    def pending_urls(self) -> list[str]:
        return list(self._pending)

    def discard(self, url: str) -> None:
        self._pending.pop(url, None)

    def next_batch(self, width: int, one_per_host: bool = False) -> list[str]:
        """Up to width pending URLs by (priority desc, URL asc); with
        one_per_host, same-host URLs after the first wait for a later batch."""
        if width <= 0:
            return []
        ordered = sorted(self._pending.items(), key=lambda kv: (-kv[1], kv[0]))
        batch: list[str] = []
        hosts: set[str] = set()
        for url, _ in ordered:
            if one_per_host:
                host = urlsplit(url).netloc
                if host in hosts:
                    continue
                hosts.add(host)
            batch.append(url)
            if len(batch) == width:
                break
        for url in batch:
            del self._pending[url]
        return batch


# --- seed handling --------------------------------------------------------

def read_seed_file(path) -> tuple[list[str], list[str]]:
    """Canonical seed URLs and warnings for lines that did not parse."""
    seeds: list[str] = []
    warnings: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            canon = canonicalize_url(line)
            if canon is None:
                warnings.append(f"line {lineno}: unparseable URL {line!r}")
            elif canon not in seeds:
                seeds.append(canon)
    return seeds, warnings


def inject_seeds(path, graph: LinkGraph, frontier: Frontier) -> tuple[list[str], list[str]]:
    """Queue every canonical seed with rank 1. Raises when none are valid."""
    seeds, warnings = read_seed_file(path)
    if not seeds:
        raise ValueError(f"no seeds in {path}")
    for url in seeds:
        graph.add_page(url, rank=1.0)
        frontier.add(url, priority=1.0)
    return seeds, warnings


# --- relevance ------------------------------------------------------------

def relevance_filter(text: str, classifier, threshold: float) -> bool:
    """Keep a page when its best category similarity meets the threshold."""
    ranked = classifier.rank(text, k=1)
    return bool(ranked) and ranked[0][1] >= threshold


# --- crawl loop -----------------------------------------------------------

@dataclass
class CrawlReport:
    seeds: list[str] = field(default_factory=list)
    batches: list[list[str]] = field(default_factory=list)
    statuses: dict[str, int] = field(default_factory=dict)
    fetched: int = 0
    kept: int = 0
    pruned: int = 0
    unconverged_rounds: int = 0
    warnings: list[str] = field(default_factory=list)
    aborted: str | None = None

    def fetch_order(self) -> list[str]:
        return [url for batch in self.batches for url in batch]


class _HostThrottle:
    def __init__(self, delay_ms: int):
        self.delay_s = delay_ms / 1000.0
        self._next_ok: dict[str, float] = {}
        self._lock = threading.Lock()

    def wait(self, url: str) -> None:
        if self.delay_s <= 0:
            return
        host = urlsplit(url).netloc
        with self._lock:
            now = time.monotonic()
            ready = self._next_ok.get(host, now)
            self._next_ok[host] = max(ready, now) + self.delay_s
        pause = ready - now
        if pause > 0:
            time.sleep(pause)


def crawl_loop(
    config: CrawlConfig,
    db_store: RecordStore,
    rdb_store: RecordStore,
    classifier=None,
    relevance_threshold: float = 0.0,
) -> CrawlReport:
    """Run a single-pass crawl until the frontier empties or the budget is
    spent; returns counts and the per-batch fetch order."""
    graph = LinkGraph()
    frontier = Frontier()
    report = CrawlReport()
    seeds, warnings = inject_seeds(config.seeds_path, graph, frontier)
    if config.budget < len(seeds):
        raise ValueError(
            f"budget {config.budget} is smaller than the seed count {len(seeds)}"
        )
    report.seeds = seeds
    report.warnings.extend(warnings)
    seed_domains = {registrable_domain(u) for u in seeds}
    robots = RobotsCache(user_agent=config.user_agent) if config.obey_robots else None
    throttle = _HostThrottle(config.per_host_delay_ms)
    session = requests.Session()
    one_per_host = config.per_host_delay_ms > 0

    def fetch_one(url: str) -> FetchResult:
        if robots is not None and not robots.allowed(url):
            return FetchResult(url=url, status=STATUS_ROBOTS_BLOCKED, fetched_at=time.time())
        throttle.wait(url)
        return fetch(url, timeout_s=config.timeout_s, user_agent=config.user_agent, session=session)

    with ThreadPoolExecutor(max_workers=config.width) as pool:
        while report.fetched < config.budget:
            batch = frontier.next_batch(
                min(config.width, config.budget - report.fetched), one_per_host
            )
            if not batch:
                break
            report.batches.append(batch)
            results = dict(zip(batch, pool.map(fetch_one, batch)))

            try:
                for url in batch:
                    res = results[url]
                    graph.mark_fetched(url)
                    report.fetched += 1
                    report.statuses[url] = res.status
                    record = PageRecord(
                        url=url,
                        status=res.status,
                        fetched_at=res.fetched_at,
                        title=res.title,
                        text=res.text,
                        outlinks=res.outlinks,
                    )
                    db_store.append(record)
                    if 200 <= res.status < 300 and (res.title or res.text):
                        kept = classifier is None or relevance_filter(
                            f"{res.title} {res.text}", classifier, relevance_threshold
                        )
                        if kept:
                            rdb_store.append(record)
                            report.kept += 1
                    survivors = domain_filter(res.outlinks, seed_domains)
                    for link in survivors:
                        if link not in graph:
                            graph.add_page(link, rank=1.0)
                            frontier.add(link, priority=1.0)
                    graph.set_outlinks(url, survivors)
            except OSError as exc:
                report.aborted = f"store write failed: {exc}"
                return report

            result = compute_pagerank(graph, delta=config.delta)
            if not result.converged:
                report.unconverged_rounds += 1
            report.pruned += len(prune_low_rank(graph, config.epsilon, frontier))
            for url in frontier.pending_urls():
                frontier.update_priority(url, graph.pages[url].rank)

    return report
