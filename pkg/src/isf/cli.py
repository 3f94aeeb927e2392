"""Umbrella command line: crawl, index, search, categorize, cluster,
profile, evaluate, serve. Flags override config-file keys; the config file
comes from --config or the ISF_CONFIG environment variable.
"""
from __future__ import annotations

import argparse
import sys

from .config import PipelineConfig, load_config
from .crawler import CrawlConfig, crawl_loop
from .classify import CategoryClassifier
from .evaluation import EvaluationError, evaluate_run, emit_report, read_qrels, read_run
from .indexing import Document, index_documents, load_index, save_index
from .personalize import ProfileError, init_profile, record_visit
from .pipeline import BadRequestError, NoBackendsError, Pipeline, snippet_of
from .records import RecordStore
from .service import serve
from .taxonomy import load_taxonomy


def _pipeline(config: PipelineConfig) -> Pipeline:
    return Pipeline.from_config(config)


def _documents_from_rdb(path) -> list[Document]:
    # later records for the same URL replace earlier ones
    by_url = {}
    for record in RecordStore(path):
        if record.title or record.text:
            by_url[record.url] = record
    return [
        Document(id=url, url=url, title=rec.title, body=rec.text, source="crawl")
        for url, rec in sorted(by_url.items())
    ]


def cmd_crawl(config: PipelineConfig, args) -> int:
    seeds = args.seeds or config.seeds_path
    if seeds is None:
        print("error: --seeds is required (or set seeds_path in the config)", file=sys.stderr)
        return 2
    crawl_config = CrawlConfig(
        seeds_path=seeds,
        budget=args.budget if args.budget is not None else config.budget,
        delta=args.delta if args.delta is not None else config.delta,
        epsilon=args.epsilon if args.epsilon is not None else config.epsilon,
        width=args.width if args.width is not None else config.width,
        per_host_delay_ms=args.delay_ms if args.delay_ms is not None else config.per_host_delay_ms,
        obey_robots=not args.no_robots and config.obey_robots,
    )
    classifier = None
    if config.taxonomy_path is not None:
        taxonomy = load_taxonomy(config.taxonomy_path, config.pages_path)
        classifier = CategoryClassifier(taxonomy, max_depth=config.classifier_max_depth)
    report = crawl_loop(
        crawl_config,
        db_store=RecordStore(args.db or config.db_path),
        rdb_store=RecordStore(args.rdb or config.rdb_path),
        classifier=classifier,
        relevance_threshold=config.relevance_threshold,
    )
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"fetched\t{report.fetched}")
    print(f"kept\t{report.kept}")
    print(f"pruned\t{report.pruned}")
    if report.aborted:
        print(f"aborted\t{report.aborted}", file=sys.stderr)
        return 1
    return 0


def cmd_index(config: PipelineConfig, args) -> int:
    out = args.out or config.index_path
    if out is None:
        print("error: --out is required (or set index_path in the config)", file=sys.stderr)
        return 2
    docs = _documents_from_rdb(args.input)
    index = index_documents(docs)
    save_index(index, out)
    print(f"indexed\t{len(index)}")
    print(f"path\t{out}")
    return 0


def _run_search(config: PipelineConfig, args, cluster_enabled: bool | None = None):
    if cluster_enabled is not None:
        config.cluster_enabled = cluster_enabled
    if getattr(args, "k_neighbors", None):
        config.k_neighbors = args.k_neighbors
    pipeline = _pipeline(config)
    sources = [s for s in (args.sources or "").split(",") if s] or None
    cats = [c for c in (getattr(args, "cats", "") or "").split(",") if c]
    return pipeline.run(
        args.q,
        user_id=getattr(args, "user", None),
        selected_categories=cats,
        topic=getattr(args, "topic", None),
        k=getattr(args, "k", None),
        sources=sources,
        token=getattr(args, "token", None),
    )


def _print_entries(response, with_cluster: bool) -> None:
    for flag in response.flags:
        print(f"# flag: {flag}")
    cols = ["rank", "score", "url", "title", "primary", "secondary"]
    if with_cluster:
        cols.append("cluster")
    cols.append("source")
    print("\t".join(cols))
    for rank, e in enumerate(response.entries, start=1):
        row = [str(rank), f"{e.score:.6f}", e.url, e.title, e.primary, e.secondary or "-"]
        if with_cluster:
            row.append(e.cluster or "-")
        row.append(e.source)
        print("\t".join(row))


def cmd_search(config: PipelineConfig, args) -> int:
    try:
        result = _run_search(config, args)
    except BadRequestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoBackendsError:
        print("error: no backends available", file=sys.stderr)
        return 1
    _print_entries(result.response, with_cluster=config.cluster_enabled)
    return 0


def cmd_categorize(config: PipelineConfig, args) -> int:
    try:
        result = _run_search(config, args, cluster_enabled=False)
    except NoBackendsError:
        print("error: no backends available", file=sys.stderr)
        return 1
    _print_entries(result.response, with_cluster=False)
    return 0


def cmd_cluster(config: PipelineConfig, args) -> int:
    try:
        result = _run_search(config, args, cluster_enabled=True)
    except NoBackendsError:
        print("error: no backends available", file=sys.stderr)
        return 1
    _print_entries(result.response, with_cluster=True)
    return 0


def cmd_profile(config: PipelineConfig, args) -> int:
    pipeline = _pipeline(config)
    store = pipeline.profiles
    if args.action == "show":
        print(store.load(args.user).to_json())
        return 0
    if args.action == "init":
        pairs = []
        for item in args.topic or []:
            if "=" not in item:
                print(f"error: expected PATH=WEIGHT, got {item!r}", file=sys.stderr)
                return 2
            path, weight = item.rsplit("=", 1)
            pairs.append((path, int(weight)))
        try:
            profile = init_profile(args.user, pairs, pipeline.taxonomy)
        except ProfileError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        store.save(profile)
        print(profile.to_json())
        return 0
    # visit: classify the stored document for this URL, then bump its topic
    if config.index_path is None:
        print("error: index_path is not configured", file=sys.stderr)
        return 2
    index = load_index(config.index_path)
    doc = next((d for d in index.docs.values() if d.url == args.url), None)
    if doc is None:
        print(f"error: unknown result reference: {args.url}", file=sys.stderr)
        return 1
    assignment = pipeline.classifier.assign(
        doc.url, f"{doc.title} {snippet_of(doc)}", config.k_neighbors
    )
    changed: list[str] = []
    profile = store.update(
        args.user, lambda p: changed.extend(record_visit(p, assignment, pipeline.taxonomy))
    )
    if not changed:
        print("# no profile topic for this result (unclassified)", file=sys.stderr)
    print(profile.to_json())
    return 0


def cmd_evaluate(config: PipelineConfig, args) -> int:
    try:
        report = evaluate_run(read_run(args.run), read_qrels(args.qrels))
    except EvaluationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    paths = emit_report(report, args.out)
    print(f"queries\t{report.n_queries}")
    print(f"macro_p_at_5\t{report.macro_p5:.6f}")
    print(f"macro_p_at_10\t{report.macro_p10:.6f}")
    print(f"overall_precision\t{report.overall_precision:.6f}\t{report.overall_precision * 100:.1f}%")
    for path in paths:
        print(f"wrote\t{path}")
    return 0


def cmd_serve(config: PipelineConfig, args) -> int:
    if args.host:
        config.host = args.host
    if args.port is not None:
        config.port = args.port
    serve(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isf", description=__doc__)
    parser.add_argument("--config", help="config file (default: $ISF_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crawl", help="run a focused crawl")
    p.add_argument("--seeds")
    p.add_argument("--budget", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--width", type=int)
    p.add_argument("--delay-ms", type=int, dest="delay_ms")
    p.add_argument("--no-robots", action="store_true")
    p.add_argument("--db")
    p.add_argument("--rdb")
    p.set_defaults(func=cmd_crawl)

    p = sub.add_parser("index", help="build the search index from an RDB store")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="run the full search pipeline")
    p.add_argument("--q", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--sources")
    p.add_argument("--user")
    p.add_argument("--cats")
    p.add_argument("--topic")
    p.add_argument("--token")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("categorize", help="search and categorize, no clustering")
    p.add_argument("--q", required=True)
    p.add_argument("--k-neighbors", type=int, dest="k_neighbors")
    p.add_argument("--k", type=int)
    p.add_argument("--sources")
    p.set_defaults(func=cmd_categorize)

    p = sub.add_parser("cluster", help="search, categorize, and cluster")
    p.add_argument("--q", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--sources")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("profile", help="inspect or update a user profile")
    p.add_argument("action", choices=["init", "show", "visit"])
    p.add_argument("--user", required=True)
    p.add_argument("--topic", action="append", metavar="PATH=WEIGHT")
    p.add_argument("--url")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("evaluate", help="score a run file against judgments")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = load_config(args.config)
    return args.func(config, args)


if __name__ == "__main__":
    sys.exit(main())
