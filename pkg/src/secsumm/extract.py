"""Section-local sentence scoring and top-k selection.

Every scorer sees a single section; nothing from the rest of the paper
leaks into a section's scores.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .budget import BudgetAllocation
from .ingest import Paper, Section
from .rouge import DEFAULT_CONFIG, RougeConfig, f_measure, tokenize

logger = logging.getLogger(__name__)

__all__ = [
    "ScoredSentence",
    "ScorerSpec",
    "ExternalScoreError",
    "SCORER_KINDS",
    "score_lead",
    "score_centrality",
    "greedy_oracle",
    "greedy_path",
    "score_oracle",
    "load_external_scores",
    "score_section",
    "score_paper",
    "select_topk",
]

SCORER_KINDS = ("lead", "centrality", "oracle", "external")


class ExternalScoreError(ValueError):
    pass


@dataclass(frozen=True)
class ScoredSentence:
    section_index: int
    sentence_index: int
    score: float


_PARAMS = {
    "lead": {},
    "centrality": {"damping": 0.85, "sim_threshold": 0.0, "max_iter": 100, "tol": 1e-6, "idf": False},
    "oracle": {},
    "external": {"path": None},
}


@dataclass(frozen=True)
class ScorerSpec:
    kind: str = "centrality"
    parameters: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SCORER_KINDS:
            raise ValueError(f"unknown scorer {self.kind!r}; expected one of {SCORER_KINDS}")
        unknown = set(self.parameters) - set(_PARAMS[self.kind])
        if unknown:
            raise ValueError(f"unknown parameters for {self.kind} scorer: {sorted(unknown)}")
        if self.kind == "centrality":
            d = self.param("damping")
            if not 0 < d < 1:
                raise ValueError("damping must lie strictly between 0 and 1")
            if int(self.param("max_iter")) < 1 or float(self.param("tol")) <= 0:
                raise ValueError("max_iter must be >= 1 and tol > 0")
        if self.kind == "external" and not self.param("path"):
            raise ValueError("external scorer needs a 'path' parameter")

    def param(self, name: str):
        return self.parameters.get(name, _PARAMS[self.kind][name])


def score_lead(section: Section, section_index: int = 0) -> list[ScoredSentence]:
    """Position prior: ``1 / (1 + index)``."""
    return [ScoredSentence(section_index, i, 1.0 / (1 + i)) for i in range(len(section.sentences))]


def _similarity_matrix(token_lists: Sequence[Sequence[str]], idf: bool) -> np.ndarray:
    vocab: dict[str, int] = {}
    for tokens in token_lists:
        for t in tokens:
            vocab.setdefault(t, len(vocab))
    vecs = np.zeros((len(token_lists), len(vocab)))
    for row, tokens in enumerate(token_lists):
        for t, c in Counter(tokens).items():
            vecs[row, vocab[t]] = c
    if idf and len(vocab):
        df = (vecs > 0).sum(axis=0)
        vecs *= np.log1p(len(token_lists) / df)
    norms = np.linalg.norm(vecs, axis=1)
    norms[norms == 0] = 1.0
    unit = vecs / norms[:, None]
    sim = unit @ unit.T
    np.fill_diagonal(sim, 0.0)
    return sim


def score_centrality(
    section: Section,
    damping: float = 0.85,
    sim_threshold: float = 0.0,
    max_iter: int = 100,
    tol: float = 1e-6,
    idf: bool = False,
    section_index: int = 0,
    config: RougeConfig = DEFAULT_CONFIG,
) -> list[ScoredSentence]:
    """LexRank-style centrality by power iteration.

    Edges are cosine similarities of unigram count vectors; edges below
    ``sim_threshold`` are dropped.  A sentence with no edges hands its mass
    to the uniform teleport vector.  Scores sum to one.
    """
    if not 0 < damping < 1:
        raise ValueError("damping must lie strictly between 0 and 1")
    n = len(section.sentences)
    if n == 0:
        return []
    if n == 1:
        return [ScoredSentence(section_index, 0, 1.0)]
    sim = _similarity_matrix([tokenize(s.text, config) for s in section.sentences], idf)
    sim[sim < sim_threshold] = 0.0
    out_weight = sim.sum(axis=1)
    dangling = out_weight <= 0
    transition = np.divide(sim, out_weight[:, None], out=np.zeros_like(sim), where=~dangling[:, None])

    p = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = (1 - damping) / n + damping * (transition.T @ p + p[dangling].sum() / n)
        delta = np.abs(nxt - p).max()
        p = nxt
        if delta < tol:
            break
    p /= p.sum()
    return [ScoredSentence(section_index, i, float(v)) for i, v in enumerate(p)]


def greedy_oracle(
    section: Section,
    target: str,
    k: int,
    config: RougeConfig = DEFAULT_CONFIG,
) -> list[int]:
    """Greedy ROUGE-1 F1 maximization against ``target``.

    Each step adds the sentence that gives the highest F1 for the selected
    set (read in document order); earlier sentences win ties.  Stops after
    ``k`` picks or when no sentence strictly improves F1.  Returns indices
    in document order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    return sorted(greedy_path(section, target, k, config))


def greedy_path(section: Section, target: str, k: int, config: RougeConfig = DEFAULT_CONFIG) -> list[int]:
    """Greedy picks in the order they were made (see :func:`greedy_oracle`)."""
    ref = Counter(tokenize(target, config))
    n_ref = sum(ref.values())
    if not n_ref:
        raise ValueError("greedy oracle target must contain at least one token")
    sent_counts = [Counter(tokenize(s.text, config)) for s in section.sentences]
    selected: list[int] = []
    current = Counter()
    best_f1 = 0.0
    while len(selected) < min(k, len(sent_counts)):
        pick, pick_f1 = None, best_f1
        for i, counts in enumerate(sent_counts):
            if i in selected:
                continue
            merged = current + counts
            n_cand = sum(merged.values())
            if not n_cand:
                continue
            overlap = sum(min(c, ref[t]) for t, c in merged.items() if t in ref)
            f1 = f_measure(overlap / n_cand, overlap / n_ref)
            if f1 > pick_f1:
                pick, pick_f1 = i, f1
        if pick is None:
            break
        selected.append(pick)
        current += sent_counts[pick]
        best_f1 = pick_f1
    return selected


def score_oracle(
    section: Section, target: str, section_index: int = 0, config: RougeConfig = DEFAULT_CONFIG
) -> list[ScoredSentence]:
    """Scores from the greedy pick order: ``1/(1+rank)`` if picked, else 0.

    Greedy picks do not depend on ``k``, so the top-q sentences under these
    scores are exactly ``greedy_oracle(section, target, q)`` whenever the
    greedy run reaches q picks.
    """
    n = len(section.sentences)
    if n == 0:
        return []
    order = greedy_path(section, target, n, config) if tokenize(target, config) else []
    rank = {i: r for r, i in enumerate(order)}
    return [
        ScoredSentence(section_index, i, 1.0 / (1 + rank[i]) if i in rank else 0.0)
        for i in range(n)
    ]


def _read_score_records(path: Path) -> list[tuple[int, dict]]:
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        if path.suffix.lower() in (".jsonl", ".json", ".ndjson"):
            for lineno, line in enumerate(fh, 1):
                if line.strip():
                    try:
                        records.append((lineno, json.loads(line)))
                    except json.JSONDecodeError as exc:
                        raise ExternalScoreError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
        else:
            for lineno, rec in enumerate(csv.DictReader(fh), 2):
                records.append((lineno, rec))
    return records


def load_external_scores(path: str | Path, paper: Paper) -> list[ScoredSentence]:
    """Attach externally produced sentence scores to ``paper``.

    The file is CSV (header ``paper_id,section_index,sentence_index,score``)
    or JSONL with the same fields.  Records for other papers are ignored.
    Sentences without a record score 0 and trigger a warning.

    Raises:
        ExternalScoreError: out-of-range indices, duplicate records,
            non-numeric or non-finite fields.
    """
    path = Path(path)
    scores: dict[tuple[int, int], float] = {}
    for lineno, rec in _read_score_records(path):
        where = f"{path}:{lineno}"
        try:
            if str(rec["paper_id"]) != paper.id:
                continue
            key = (int(rec["section_index"]), int(rec["sentence_index"]))
            value = float(rec["score"])
        except KeyError as exc:
            raise ExternalScoreError(f"{where}: record lacks field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise ExternalScoreError(f"{where}: non-numeric field in record {rec!r}") from exc
        sec, sent = key
        if not 0 <= sec < len(paper.sections) or not 0 <= sent < len(paper.sections[sec].sentences):
            raise ExternalScoreError(f"{where}: index ({sec}, {sent}) out of range for paper {paper.id!r}")
        if key in scores:
            raise ExternalScoreError(f"{where}: duplicate record for ({sec}, {sent}) in paper {paper.id!r}")
        if not math.isfinite(value):
            raise ExternalScoreError(f"{where}: non-finite score {value}")
        scores[key] = value

    out = []
    missing = 0
    for si, section in enumerate(paper.sections):
        for j in range(len(section.sentences)):
            if (si, j) not in scores:
                missing += 1
            out.append(ScoredSentence(si, j, scores.get((si, j), 0.0)))
    if missing:
        logger.warning("%d sentence(s) of paper %r have no external score; defaulting to 0", missing, paper.id)
    return out


def score_section(
    section: Section,
    section_index: int,
    spec: ScorerSpec,
    target: str | None = None,
    config: RougeConfig = DEFAULT_CONFIG,
) -> list[ScoredSentence]:
    if spec.kind == "lead":
        return score_lead(section, section_index)
    if spec.kind == "centrality":
        return score_centrality(
            section,
            damping=float(spec.param("damping")),
            sim_threshold=float(spec.param("sim_threshold")),
            max_iter=int(spec.param("max_iter")),
            tol=float(spec.param("tol")),
            idf=bool(spec.param("idf")),
            section_index=section_index,
            config=config,
        )
    if spec.kind == "oracle":
        if target is None:
            raise ValueError("oracle scorer needs a target summary")
        return score_oracle(section, target, section_index, config)
    raise ValueError("external scores are loaded per paper; use score_paper")


def score_paper(
    paper: Paper,
    spec: ScorerSpec,
    target: str | None = None,
    sections: Sequence[int] | None = None,
    config: RougeConfig = DEFAULT_CONFIG,
) -> list[ScoredSentence]:
    """Score every sentence of ``paper`` (or of the listed sections only)."""
    if spec.kind == "external":
        scored = load_external_scores(spec.param("path"), paper)
        if sections is not None:
            wanted = set(sections)
            scored = [s for s in scored if s.section_index in wanted]
        return scored
    indices = range(len(paper.sections)) if sections is None else sections
    out = []
    for i in indices:
        out += score_section(paper.sections[i], i, spec, target, config)
    return out


def select_topk(scores: Sequence[ScoredSentence], quota: BudgetAllocation) -> dict[int, list[int]]:
    """Per retained section, the ``sentence_quota`` best sentences in document order.

    Ties go to the earlier sentence.  Sections with a zero quota are absent.
    """
    by_section: dict[int, list[ScoredSentence]] = {}
    for s in scores:
        by_section.setdefault(s.section_index, []).append(s)
    out = {}
    for index in sorted(by_section):
        q = quota.sentence_quota(index)
        if q <= 0:
            continue
        ranked = sorted(by_section[index], key=lambda s: (-s.score, s.sentence_index))
        out[index] = sorted(s.sentence_index for s in ranked[:q])
    return out
