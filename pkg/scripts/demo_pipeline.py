#!/usr/bin/env python3
"""End-to-end walkthrough on a self-hosted fixture site.

Serves a handful of pages on localhost, crawls them, builds the index,
then runs the full pipeline twice around a simulated result click to show
the profile re-ranking kick in. Everything lands in a scratch directory.
"""
from __future__ import annotations

import os
import sys
import tempfile
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from isf.classify import CategoryClassifier
from isf.config import PipelineConfig
from isf.crawler import CrawlConfig, crawl_loop
from isf.indexing import Document, index_documents
from isf.metasearch import LocalIndexBackend
from isf.personalize import ProfileStore, TermCategoryStats, record_visit
from isf.pipeline import Pipeline
from isf.records import RecordStore
from isf.taxonomy import load_taxonomy

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")

PAGES = {
    "/": (
        "start here",
        '<a href="/animal">animal</a> <a href="/car">car</a> '
        '<a href="/dealers">dealers</a> <a href="/soccer">soccer</a> '
        '<a href="/guitar">guitar</a>',
    ),
    "/animal": ("the jaguar is a rainforest predator and the jaguar roams wild habitats", ""),
    "/car": ("jaguar luxury car models sedans engines dealers driving", ""),
    "/dealers": ("book a jaguar test drive", ""),
    "/soccer": ("soccer football league standings teams matches fixtures", ""),
    "/guitar": ("electric guitars amplifiers rock bands music concerts", ""),
}


def serve_fixture_site() -> ThreadingHTTPServer:
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):
            pass

        def do_GET(self):
            entry = PAGES.get(self.path)
            if entry is None:
                self.send_error(404)
                return
            text, links = entry
            title = self.path.strip("/") or "home"
            body = f"<html><head><title>{title}</title></head><body><p>{text}</p>{links}</body></html>"
            data = body.encode("utf-8")
            self.send_response(200)
            self.send_header("Content-Type", "text/html; charset=utf-8")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    return server


def show(label: str, response) -> None:
    print(f"\n== {label} (query executed: {response.query!r})")
    for rank, e in enumerate(response.entries, start=1):
        print(f"  {rank}. {e.score:.4f}  {e.url:36s}  {e.primary:28s} cluster={e.cluster}")
    print(f"  facets: {response.facets}")


def main() -> None:
    server = serve_fixture_site()
    port = server.server_address[1]
    workdir = tempfile.mkdtemp(prefix="isf-demo-")
    print(f"fixture site on http://localhost:{port}, scratch dir {workdir}")

    seeds = os.path.join(workdir, "seeds.txt")
    with open(seeds, "w", encoding="utf-8") as fh:
        fh.write(f"http://localhost:{port}/\n")
    crawl_report = crawl_loop(
        CrawlConfig(seeds_path=seeds, budget=50, width=2,
                    per_host_delay_ms=0, obey_robots=False),
        RecordStore(os.path.join(workdir, "db.jsonl")),
        RecordStore(os.path.join(workdir, "rdb.jsonl")),
    )
    print(f"crawled {crawl_report.fetched} pages, kept {crawl_report.kept}")

    docs = [
        Document(id=r.url, url=r.url, title=r.title, body=r.text, source="crawl")
        for r in RecordStore(os.path.join(workdir, "rdb.jsonl"))
        if r.title or r.text
    ]
    index = index_documents(docs)
    print(f"indexed {len(index)} documents, vocabulary {len(index.vocab)} terms")

    config = PipelineConfig(
        taxonomy_path=os.path.join(FIXTURES, "demo_taxonomy.tsv"),
        pages_path=os.path.join(FIXTURES, "demo_pages.tsv"),
        profiles_dir=os.path.join(workdir, "profiles"),
    )
    taxonomy = load_taxonomy(config.taxonomy_path, config.pages_path)
    classifier = CategoryClassifier(taxonomy)
    pipeline = Pipeline(
        config, taxonomy, classifier,
        [LocalIndexBackend("crawl", index)],
        ProfileStore(config.profiles_dir),
        TermCategoryStats(taxonomy, classifier),
    )

    result = pipeline.run("jaguar", user_id="demo")
    show("before any clicks", result.response)

    clicked = next(
        e.url for e in result.response.entries if e.primary == "Top/Recreation/Autos"
    )
    assignment = result.assignments[clicked]
    for _ in range(2):
        pipeline.profiles.update("demo", lambda p: record_visit(p, assignment, taxonomy))
    print(f"\nclicked {clicked} twice; profile now "
          f"{pipeline.profiles.load('demo').weights}")

    result = pipeline.run("jaguar", user_id="demo")
    show("after two clicks on the test-drive result", result.response)

    server.shutdown()
    server.server_close()


if __name__ == "__main__":
    main()
