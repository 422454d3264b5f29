"""Corpus-level ROUGE evaluation in the six-column table layout."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TextIO

from .rouge import DEFAULT_CONFIG, RougeConfig, score_all

logger = logging.getLogger(__name__)

__all__ = [
    "COLUMNS",
    "EvalRow",
    "EvalReport",
    "DocScores",
    "score_document",
    "evaluate_pairs",
    "read_text_dir",
    "match_ids",
    "format_table",
    "write_report_csv",
    "read_report_csv",
    "write_per_doc_csv",
]

COLUMNS = ("R-1 F1", "R-2 F1", "R-L F1", "R-1 recall", "R-2 recall", "R-L recall")
CSV_FIELDS = ("method", "r1_f1", "r2_f1", "rl_f1", "r1_recall", "r2_recall", "rl_recall", "n_docs")


@dataclass(frozen=True)
class DocScores:
    id: str
    values: tuple[float, ...]  # six numbers in COLUMNS order, 0-100 scale


@dataclass(frozen=True)
class EvalRow:
    method: str
    values: tuple[float, ...]
    n_docs: int

    def rounded(self) -> tuple[float, ...]:
        return tuple(round(v, 2) for v in self.values)


@dataclass
class EvalReport:
    rows: list[EvalRow]
    per_doc: list[DocScores] | None = None
    run_metadata: dict = field(default_factory=dict)


def score_document(doc_id: str, system: str, gold: str, config: RougeConfig = DEFAULT_CONFIG) -> DocScores:
    s = score_all(system, gold, config)
    r1, r2, rl = s["rouge-1"], s["rouge-2"], s["rouge-l"]
    return DocScores(doc_id, tuple(100 * v for v in (r1.f1, r2.f1, rl.f1, r1.recall, r2.recall, rl.recall)))


def _mean_row(label: str, docs: Sequence[DocScores]) -> EvalRow:
    if not docs:
        raise ValueError("no documents to average")
    ordered = sorted(docs, key=lambda d: d.id)
    means = tuple(math.fsum(d.values[k] for d in ordered) / len(ordered) for k in range(len(COLUMNS)))
    return EvalRow(label, means, len(ordered))


def evaluate_pairs(
    pairs: Mapping[str, tuple[str, str]],
    label: str = "system",
    config: RougeConfig = DEFAULT_CONFIG,
    metadata: Mapping[str, object] | None = None,
) -> EvalReport:
    """Score ``{id: (system_text, gold_text)}`` and average per column."""
    docs = [score_document(i, sys_text, gold_text, config) for i, (sys_text, gold_text) in sorted(pairs.items())]
    return EvalReport([_mean_row(label, docs)], docs, dict(metadata or {}))


def _read_gold_json(path: Path) -> str:
    obj = json.loads(path.read_text(encoding="utf-8"))
    if isinstance(obj, Mapping):
        for key in ("summary", "lay_summary", "text"):
            if key in obj:
                obj = obj[key]
                break
        else:
            raise ValueError(f"{path}: no 'summary' field")
    if isinstance(obj, list):
        return " ".join(str(x) for x in obj)
    if isinstance(obj, str):
        return obj
    raise ValueError(f"{path}: unsupported summary layout")


def read_text_dir(directory: str | Path) -> dict[str, str]:
    """Map file stem -> text for every ``.txt`` (or summary ``.json``) file.

    Run metadata written next to the summaries (``*.meta.json``) is skipped.
    """
    directory = Path(directory)
    out: dict[str, str] = {}
    for path in sorted(directory.iterdir()):
        if not path.is_file():
            continue
        if path.suffix == ".txt":
            out[path.stem] = path.read_text(encoding="utf-8")
        elif path.suffix == ".json" and not path.name.endswith(".meta.json"):
            out.setdefault(path.stem, _read_gold_json(path))
    return out


def match_ids(system: Mapping[str, str], gold: Mapping[str, str]) -> dict[str, tuple[str, str]]:
    """Pair system and gold texts by id, warning about unmatched system files."""
    for doc_id in sorted(set(system) - set(gold)):
        logger.warning("system output %r has no gold summary; ignored", doc_id)
    return {i: (system[i], gold[i]) for i in sorted(set(system) & set(gold))}


def format_table(rows: Iterable[EvalRow]) -> str:
    rows = list(rows)
    header = ("Method",) + COLUMNS
    body = [(r.method,) + tuple(f"{v:.2f}" for v in r.values) for r in rows]
    widths = [max(len(line[k]) for line in [header, *body]) for k in range(len(header))]

    def fmt(line):
        first = line[0].ljust(widths[0])
        rest = [cell.rjust(w) for cell, w in zip(line[1:], widths[1:])]
        return " | ".join([first, *rest])

    sep = "-+-".join("-" * w for w in widths)
    return "\n".join([fmt(header), sep, *(fmt(line) for line in body)])


def write_report_csv(rows: Iterable[EvalRow], fh: TextIO, header: bool = True) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    if header:
        writer.writerow(CSV_FIELDS)
    for r in rows:
        writer.writerow([r.method, *(f"{v:.2f}" for v in r.values), r.n_docs])


def read_report_csv(fh: TextIO) -> list[EvalRow]:
    return [
        EvalRow(rec["method"], tuple(float(rec[k]) for k in CSV_FIELDS[1:7]), int(rec["n_docs"]))
        for rec in csv.DictReader(fh)
    ]


def write_per_doc_csv(docs: Iterable[DocScores], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(("id",) + CSV_FIELDS[1:7])
    for d in docs:
        writer.writerow([d.id, *(f"{v:.4f}" for v in d.values)])
