"""Report files: sample CSVs, stats TSV, DOT and JSON-lines graph exports, suite JSON."""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

from .explorer import GraphStats, QuotientGraph
from .surface_core import key_digest
from .verification import SuiteReport

logger = logging.getLogger(__name__)

SAMPLE_HEADER = ["sample_id", "key_a", "key_b", "value"]
IK_HEADER = [
    "sample_id",
    "step",
    "kind",
    "flips_before",
    "arcs_total",
    "curves_total",
    "unshared",
    "arcs_after",
    "curve_crossings",
    "shared",
    "changed",
    "misrouted",
]
SAMPLE_FILES = {
    "c1": "c1_samples.csv",
    "c2": "c2_samples.csv",
    "ik": "ik_trace.csv",
    "valency": "valency_samples.csv",
    "weight_spread": "weight_spread.csv",
}


def ensure_dir(path: Path) -> Path:
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
    with path.open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(header), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if row.get(k) is None else row.get(k) for k in header})
    logger.info(f"Wrote {path}")
    return path


def write_suite_report(out: Path, report: SuiteReport) -> List[Path]:
    """JSON report plus one CSV per sample family"""
    ensure_dir(out)
    written = []
    report_path = out / f"{report.suite}.json"
    report_path.write_text(json.dumps(report.model_dump(exclude={"samples"}), indent=2, sort_keys=True))
    written.append(report_path)
    for family, rows in report.samples.items():
        header = IK_HEADER if family == "ik" else SAMPLE_HEADER
        written.append(write_csv(out / SAMPLE_FILES.get(family, f"{family}.csv"), header, rows))
    return written


def write_stats_tsv(path: Path, summary: GraphStats) -> Path:
    lines = [
        "metric\tvalue",
        f"vertices\t{summary.vertex_count}",
        f"edges\t{summary.edge_count}",
    ]
    lines += [f"edges_{kind}\t{count}" for kind, count in summary.edges_by_kind.items()]
    lines += [f"degree_{degree}\t{count}" for degree, count in summary.degree_histogram.items()]
    lines.append(f"diameter\t{'' if summary.diameter is None else summary.diameter}")
    lines.append(f"connected\t{str(summary.connected).lower()}")
    path.write_text("\n".join(lines) + "\n")
    logger.info(f"Wrote {path}")
    return path


def to_dot(ball: QuotientGraph) -> str:
    lines = [f"graph {ball.mode} {{"]
    for key in ball.vertices():
        label = "root" if key == ball.root_key else str(ball.depth(key))
        lines.append(f'  "{key_digest(key)}" [label="{label}"];')
    for a, b, kinds in sorted(ball.graph.edges(data="kinds"), key=lambda e: (key_digest(e[0]), key_digest(e[1]))):
        lines.append(f'  "{key_digest(a)}" -- "{key_digest(b)}" [kind="{",".join(sorted(kinds))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(path: Path, ball: QuotientGraph) -> Path:
    path.write_text(to_dot(ball))
    logger.info(f"Wrote {path} ({len(ball)} vertices)")
    return path


def write_adjacency_jsonl(path: Path, ball: QuotientGraph) -> Path:
    """One line per vertex: its digest, depth and neighbours with edge kinds"""
    with path.open("w") as handle:
        for key in ball.vertices():
            neighbours = sorted(
                (key_digest(other), sorted(ball.graph.edges[key, other]["kinds"])) for other in ball.graph.neighbors(key)
            )
            record = {
                "vertex": key_digest(key),
                "depth": ball.depth(key),
                "neighbors": [{"vertex": v, "kinds": kinds} for v, kinds in neighbours],
            }
            handle.write(json.dumps(record, sort_keys=True) + "\n")
    logger.info(f"Wrote {path}")
    return path
