"""Relevance-judgment ingestion and precision/recall measurement.

Judgment files are TSV: ``query_id<TAB>result_url<TAB>judge_id<TAB>verdict``
with verdict R or N. Run files are TSV: ``query_id<TAB>rank<TAB>result_url
<TAB>score``. Per-query verdicts aggregate to binary relevance by strict
judge majority (ties conservative: not relevant); the total relevant count
per query comes from the judged pool.
"""
from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field

RECALL_LEVELS = [j / 10 for j in range(11)]


class EvaluationError(ValueError):
    pass


@dataclass
class Judgment:
    query_id: str
    result_url: str
    verdicts: list[str] = field(default_factory=list)

    @property
    def relevant(self) -> bool:
        return aggregate_judgments(self.verdicts)


@dataclass
class PRCurve:
    """Interpolated precision at recall 0.0, 0.1, ..., 1.0."""

    levels: list[float]

    def __post_init__(self):
        if len(self.levels) != 11:
            raise EvaluationError("a PR curve has exactly 11 levels")

    def mean(self) -> float:
        return sum(self.levels) / 11.0


@dataclass
class QueryEval:
    query_id: str
    p_at_5: float
    p_at_10: float
    curve: PRCurve


@dataclass
class EvalReport:
    queries: list[QueryEval]
    macro_curve: PRCurve
    macro_p5: float
    macro_p10: float
    overall_precision: float

    @property
    def n_queries(self) -> int:
        return len(self.queries)


def aggregate_judgments(verdicts: list[str]) -> bool:
    """Strict majority of R verdicts wins; an exact tie is not relevant."""
    if not verdicts:
        raise EvaluationError("no verdicts to aggregate")
    relevant = sum(1 for v in verdicts if v.upper() == "R")
    return relevant * 2 > len(verdicts)


def precision_at(ranked_urls: list[str], relevant: set[str], cutoff: int) -> float:
    """Relevant items among the top cutoff, divided by cutoff; short lists
    still divide by cutoff."""
    if cutoff < 1:
        raise EvaluationError("cutoff must be >= 1")
    hits = sum(1 for url in ranked_urls[:cutoff] if url in relevant)
    return hits / cutoff


def recall_precision_points(
    ranked_urls: list[str], relevant: set[str], total_relevant: int
) -> list[tuple[float, float]]:
    """One (recall, precision) point at the rank of each relevant item."""
    if total_relevant < 1:
        raise EvaluationError("no relevant items judged")
    points = []
    seen = 0
    for rank, url in enumerate(ranked_urls, start=1):
        if url in relevant:
            seen += 1
            points.append((seen / total_relevant, seen / rank))
    return points


def interpolate_11pt(points: list[tuple[float, float]]) -> PRCurve:
    """Interpolated precision: the max precision at any recall >= level;
    levels beyond the best recall get 0."""
    levels = []
    for level in RECALL_LEVELS:
        candidates = [prec for recall, prec in points if recall >= level - 1e-12]
        levels.append(max(candidates) if candidates else 0.0)
    return PRCurve(levels)


def macro_average(queries: list[QueryEval]) -> EvalReport:
    """Average curves and cutoffs over queries; the overall precision is
    the mean of the 11 macro levels."""
    if not queries:
        raise EvaluationError("no queries to average")
    n = len(queries)
    macro_levels = [
        sum(q.curve.levels[j] for q in queries) / n for j in range(11)
    ]
    macro_curve = PRCurve(macro_levels)
    return EvalReport(
        queries=list(queries),
        macro_curve=macro_curve,
        macro_p5=sum(q.p_at_5 for q in queries) / n,
        macro_p10=sum(q.p_at_10 for q in queries) / n,
        overall_precision=macro_curve.mean(),
    )


# --- file ingestion ---------------------------------------------------------

def read_qrels(path) -> dict[str, dict[str, Judgment]]:
    """query_id -> result_url -> Judgment with all judges' verdicts."""
    out: dict[str, dict[str, Judgment]] = defaultdict(dict)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise EvaluationError(f"{path}:{lineno}: expected 4 tab-separated fields")
            qid, url, _judge, verdict = fields
            if verdict.upper() not in ("R", "N"):
                raise EvaluationError(f"{path}:{lineno}: verdict must be R or N")
            judgment = out[qid].setdefault(url, Judgment(query_id=qid, result_url=url))
            judgment.verdicts.append(verdict.upper())
    return dict(out)


def read_run(path) -> dict[str, list[str]]:
    """query_id -> result urls in rank order."""
    rows: dict[str, list[tuple[int, str]]] = defaultdict(list)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise EvaluationError(f"{path}:{lineno}: expected 4 tab-separated fields")
            qid, rank, url, _score = fields
            rows[qid].append((int(rank), url))
    return {qid: [url for _, url in sorted(items)] for qid, items in rows.items()}


def evaluate_run(run: dict[str, list[str]], qrels: dict[str, dict[str, Judgment]]) -> EvalReport:
    """Score every query in the run against the judged pool."""
    evals = []
    for qid in sorted(run):
        judged = qrels.get(qid, {})
        relevant = {url for url, j in judged.items() if j.relevant}
        total = len(relevant)
        if total == 0:
            raise EvaluationError(f"query {qid}: no relevant items judged")
        urls = run[qid]
        points = recall_precision_points(urls, relevant, total)
        evals.append(
            QueryEval(
                query_id=qid,
                p_at_5=precision_at(urls, relevant, 5),
                p_at_10=precision_at(urls, relevant, 10),
                curve=interpolate_11pt(points),
            )
        )
    return macro_average(evals)


# --- report emission --------------------------------------------------------

def _fmt(value: float) -> str:
    return f"{value:.6f}"


def emit_report(report: EvalReport, out_dir) -> list[str]:
    """Write per-query, aggregate, and curve tables as TSV files; output is
    byte-stable for identical inputs. Returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    per_query = os.path.join(out_dir, "per_query.tsv")
    aggregate = os.path.join(out_dir, "aggregate.tsv")
    curves = os.path.join(out_dir, "curves.tsv")

    with open(per_query, "w", encoding="utf-8") as fh:
        fh.write("query_id\tp_at_5\tp_at_10\tavg_11pt\tavg_11pt_pct\n")
        for q in report.queries:
            fh.write(
                f"{q.query_id}\t{_fmt(q.p_at_5)}\t{_fmt(q.p_at_10)}"
                f"\t{_fmt(q.curve.mean())}\t{q.curve.mean() * 100:.1f}\n"
            )

    with open(aggregate, "w", encoding="utf-8") as fh:
        fh.write("n_queries\tmacro_p_at_5\tmacro_p_at_10\toverall_precision\toverall_precision_pct\n")
        fh.write(
            f"{report.n_queries}\t{_fmt(report.macro_p5)}\t{_fmt(report.macro_p10)}"
            f"\t{_fmt(report.overall_precision)}\t{report.overall_precision * 100:.1f}\n"
        )

    with open(curves, "w", encoding="utf-8") as fh:
        fh.write("query_id\t" + "\t".join(f"r{j / 10:.1f}" for j in range(11)) + "\n")
        for q in report.queries:
            fh.write(q.query_id + "\t" + "\t".join(_fmt(v) for v in q.curve.levels) + "\n")
        fh.write("macro\t" + "\t".join(_fmt(v) for v in report.macro_curve.levels) + "\n")

    return [per_query, aggregate, curves]
