"""Section-contribution analysis: how much each heading overlaps the gold summaries."""

from __future__ import annotations

import csv
import io
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TextIO

from .ingest import Paper
from .rouge import DEFAULT_CONFIG, RougeConfig, score_all

logger = logging.getLogger(__name__)

__all__ = [
    "ContributionRow",
    "CSV_COLUMNS",
    "heading_frequency",
    "section_contribution",
    "write_contribution_csv",
    "read_contribution_csv",
    "plot_series",
    "write_plot_data",
]

CSV_COLUMNS = ("heading", "frequency", "n_papers", "mean_r1", "mean_r2", "mean_rl")
AXES = ("f1", "recall")


@dataclass(frozen=True)
class ContributionRow:
    heading: str
    paper_frequency: float
    mean_r1: float
    mean_r2: float
    mean_rl: float
    n_papers: int


def heading_frequency(corpus: Sequence[Paper]) -> dict[str, float]:
    """Fraction of papers in which each section key occurs."""
    if not corpus:
        raise ValueError("heading_frequency needs a non-empty corpus")
    counts: Counter[str] = Counter()
    for paper in corpus:
        counts.update({s.key for s in paper.sections})
    return {h: c / len(corpus) for h, c in sorted(counts.items())}


def section_contribution(
    corpus: Sequence[Paper],
    gold: Mapping[str, str],
    metric_axis: str = "f1",
    min_freq: float = 0.05,
    config: RougeConfig = DEFAULT_CONFIG,
) -> list[ContributionRow]:
    """Mean ROUGE overlap (0-100) between each heading's text and the gold summary.

    Each section is the candidate and the gold summary the reference.
    Papers without a gold entry are skipped with a warning; frequencies are
    computed over the papers that remain.  Headings below ``min_freq``
    (inclusive threshold) are dropped.  Rows are ordered by ``mean_r1``
    descending, ties by heading.
    """
    if metric_axis not in AXES:
        raise ValueError(f"metric_axis must be one of {AXES}")
    if not 0.0 <= min_freq <= 1.0:
        raise ValueError("min_freq must lie in [0, 1]")

    scored = []
    for paper in corpus:
        if paper.id not in gold:
            logger.warning("no gold summary for paper %r; skipped", paper.id)
            continue
        scored.append(paper)
    if not scored:
        raise ValueError("no paper in the corpus has a gold summary")

    freq = heading_frequency(scored)
    keep = {h for h, f in freq.items() if f >= min_freq}
    sums: dict[str, list[float]] = defaultdict(lambda: [0.0, 0.0, 0.0])
    n: Counter[str] = Counter()
    for paper in sorted(scored, key=lambda p: p.id):
        reference = gold[paper.id]
        for section in paper.sections:
            if section.key not in keep:
                continue
            scores = score_all(section.text, reference, config)
            acc = sums[section.key]
            for i, variant in enumerate(("rouge-1", "rouge-2", "rouge-l")):
                acc[i] += getattr(scores[variant], metric_axis)
            n[section.key] += 1

    rows = [
        ContributionRow(
            heading=h,
            paper_frequency=freq[h],
            mean_r1=100 * sums[h][0] / n[h],
            mean_r2=100 * sums[h][1] / n[h],
            mean_rl=100 * sums[h][2] / n[h],
            n_papers=n[h],
        )
        for h in sorted(n)
    ]
    rows.sort(key=lambda r: (-r.mean_r1, r.heading))
    return rows


def write_contribution_csv(
    rows: Iterable[ContributionRow],
    fh: TextIO,
    metadata: Mapping[str, object] | None = None,
) -> None:
    """Write rows as CSV; ``metadata`` goes in leading ``# key=value`` lines."""
    for key, value in (metadata or {}).items():
        fh.write(f"# {key}={value}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([r.heading, f"{r.paper_frequency:.6f}", r.n_papers,
                         f"{r.mean_r1:.4f}", f"{r.mean_r2:.4f}", f"{r.mean_rl:.4f}"])


def read_contribution_csv(fh: TextIO) -> list[ContributionRow]:
    lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(io.StringIO("".join(lines)))
    missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"contribution table lacks columns {sorted(missing)}")
    return [
        ContributionRow(
            heading=rec["heading"],
            paper_frequency=float(rec["frequency"]),
            mean_r1=float(rec["mean_r1"]),
            mean_r2=float(rec["mean_r2"]),
            mean_rl=float(rec["mean_rl"]),
            n_papers=int(rec["n_papers"]),
        )
        for rec in reader
    ]


def plot_series(rows: Iterable[ContributionRow]) -> list[tuple[str, str, float]]:
    """Long-format (heading, metric, value) triples, one per plotted bar."""
    out = []
    for r in rows:
        out += [(r.heading, "ROUGE-1", r.mean_r1), (r.heading, "ROUGE-2", r.mean_r2),
                (r.heading, "ROUGE-L", r.mean_rl)]
    return out


def write_plot_data(rows: Iterable[ContributionRow], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(("heading", "metric", "value"))
    for heading, metric, value in plot_series(rows):
        writer.writerow((heading, metric, f"{value:.4f}"))
