#!/usr/bin/env python3
"""Stand up a demo service: crawl a self-hosted fixture site, index it,
and serve the HTTP API (plus the UI bundle when frontend/dist exists).

    python3 scripts/serve_demo.py [--port 8080] [--state demo_state]
"""
from __future__ import annotations

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from isf.classify import CategoryClassifier
from isf.config import PipelineConfig
from isf.crawler import CrawlConfig, crawl_loop
from isf.indexing import index_documents, load_index, save_index
from isf.metasearch import LocalIndexBackend, StructuredRecordsBackend
from isf.personalize import ProfileStore, TermCategoryStats
from isf.pipeline import Pipeline
from isf.records import RecordStore
from isf.service import make_server
from isf.taxonomy import load_taxonomy

from demo_pipeline import serve_fixture_site

REPO = os.path.join(os.path.dirname(__file__), "..")
FIXTURES = os.path.join(REPO, "fixtures")

RECORDS_TSV = (
    "id\tname\tnotes\n"
    "acme\tAcme Jaguar Parts\tjaguar car engines parts and sedans\n"
    "zoo\tZoo Research\tjaguar species habitats rainforest conservation\n"
    "pitch\tPitch Supplies\tsoccer league balls team kits\n"
)


def build_state(state_dir: str) -> str:
    index_path = os.path.join(state_dir, "index.json")
    if os.path.exists(index_path):
        return index_path
    os.makedirs(state_dir, exist_ok=True)
    site = serve_fixture_site()
    port = site.server_address[1]
    seeds = os.path.join(state_dir, "seeds.txt")
    with open(seeds, "w", encoding="utf-8") as fh:
        fh.write(f"http://localhost:{port}/\n")
    crawl_loop(
        CrawlConfig(seeds_path=seeds, budget=50, width=2,
                    per_host_delay_ms=0, obey_robots=False),
        RecordStore(os.path.join(state_dir, "db.jsonl")),
        RecordStore(os.path.join(state_dir, "rdb.jsonl")),
    )
    site.shutdown()
    site.server_close()

    from isf.indexing import Document

    docs = [
        Document(id=r.url, url=r.url, title=r.title, body=r.text, source="crawl")
        for r in RecordStore(os.path.join(state_dir, "rdb.jsonl"))
        if r.title or r.text
    ]
    save_index(index_documents(docs), index_path)
    with open(os.path.join(state_dir, "records.tsv"), "w", encoding="utf-8") as fh:
        fh.write(RECORDS_TSV)
    return index_path


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--state", default=os.path.join(REPO, "demo_state"))
    args = parser.parse_args()

    index_path = build_state(args.state)
    ui_dir = os.path.join(REPO, "frontend", "dist")
    config = PipelineConfig(
        taxonomy_path=os.path.join(FIXTURES, "demo_taxonomy.tsv"),
        pages_path=os.path.join(FIXTURES, "demo_pages.tsv"),
        index_path=index_path,
        records_path=os.path.join(args.state, "records.tsv"),
        profiles_dir=os.path.join(args.state, "profiles"),
        sources=["crawl", "structured-records"],
        ui_dir=ui_dir if os.path.isdir(ui_dir) else None,
        port=args.port,
    )
    taxonomy = load_taxonomy(config.taxonomy_path, config.pages_path)
    classifier = CategoryClassifier(taxonomy)
    pipeline = Pipeline(
        config, taxonomy, classifier,
        [
            LocalIndexBackend("crawl", load_index(index_path)),
            StructuredRecordsBackend("records", config.records_path, priority=1),
        ],
        ProfileStore(config.profiles_dir),
        TermCategoryStats(taxonomy, classifier),
    )
    server = make_server(pipeline, port=args.port)
    host, port = server.server_address[:2]
    ui_note = "with UI bundle" if config.ui_dir else "API only (no frontend/dist)"
    print(f"demo service on http://{host}:{port} ({ui_note})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


if __name__ == "__main__":
    main()
