"""Summary assembly: budgeted per-section concatenation and the Lead-150 baseline."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .analysis import ContributionRow
from .budget import (
    DEFAULT_CUTOFF,
    LAYSUMM_BUDGET_WORDS,
    LONGSUMM_BUDGET_WORDS,
    BudgetAllocation,
    allocate,
    compute_weights,
    overlap_source,
)
from .extract import ScorerSpec, score_paper, select_topk
from .ingest import Paper, count_tokens
from .rouge import DEFAULT_CONFIG, RougeConfig

__all__ = [
    "Piece",
    "SummaryDraft",
    "WeightConfig",
    "AssemblyError",
    "assemble_longsumm",
    "lead150_laysumm",
    "write_summary",
    "write_manifest",
    "manifest_record",
]

TASKS = ("longsumm", "laysumm")


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class Piece:
    section_index: int
    sentence_index: int
    text: str


@dataclass(frozen=True)
class SummaryDraft:
    id: str
    pieces: tuple[Piece, ...]
    token_count: int
    task: str
    over_budget: bool = False
    truncated: bool = False
    allocation: BudgetAllocation | None = field(default=None, compare=False, repr=False)

    @property
    def text(self) -> str:
        return " ".join(p.text for p in self.pieces)


@dataclass(frozen=True)
class WeightConfig:
    mode: str = "gold"  # "gold" or "prior"
    cutoff: float = DEFAULT_CUTOFF
    axis: str = "f1"
    prior_table: tuple[ContributionRow, ...] | None = None


def _draft(paper_id: str, pieces: Sequence[Piece], task: str, **flags) -> SummaryDraft:
    return SummaryDraft(paper_id, tuple(pieces), sum(count_tokens(p.text) for p in pieces), task, **flags)


def assemble_longsumm(
    paper: Paper,
    weights: WeightConfig = WeightConfig(),
    scorer: ScorerSpec = ScorerSpec("centrality"),
    budget_tokens: int = LONGSUMM_BUDGET_WORDS,
    gold: str | None = None,
    config: RougeConfig = DEFAULT_CONFIG,
    task: str = "longsumm",
) -> SummaryDraft:
    """Budgeted section-by-section extractive summary.

    Overlaps -> weights (with cutoff) -> quotas -> per-section scores ->
    top-k per section -> concatenation in document order.  If the result is
    over budget, whole sentences are dropped from the end of the
    lowest-weight section first.  The last remaining sentence is never
    dropped; a draft that still exceeds the budget is flagged
    ``over_budget``.

    ``gold`` is required for gold-mode weights and for the oracle scorer.
    """
    if paper.is_empty:
        raise AssemblyError(f"paper {paper.id!r} has no sections")
    overlaps = overlap_source(paper, weights.mode, gold=gold, prior_table=weights.prior_table,
                              axis=weights.axis, config=config)
    section_weights = compute_weights(overlaps, weights.cutoff)
    allocation = allocate(section_weights, budget_tokens, paper.sections, weights.cutoff)
    retained = allocation.retained
    scores = score_paper(paper, scorer, target=gold, sections=retained, config=config)
    chosen = select_topk(scores, allocation)

    # trimming order: lowest weight first, later section first on ties
    trim_order = sorted(chosen, key=lambda i: (section_weights[i], -i))
    total = sum(paper.sections[i].sentences[j].token_count for i in chosen for j in chosen[i])
    n_left = sum(len(v) for v in chosen.values())
    for i in trim_order:
        while total > budget_tokens and chosen[i] and n_left > 1:
            j = chosen[i].pop()
            total -= paper.sections[i].sentences[j].token_count
            n_left -= 1

    pieces = [
        Piece(i, j, paper.sections[i].sentences[j].text)
        for i in sorted(chosen)
        for j in chosen[i]
    ]
    return _draft(paper.id, pieces, task, over_budget=total > budget_tokens, allocation=allocation)


def lead150_laysumm(
    paper: Paper,
    budget_tokens: int = LAYSUMM_BUDGET_WORDS,
    hard: bool = False,
    fallback: bool = False,
) -> SummaryDraft:
    """First ``budget_tokens`` words of the abstract.

    By default whole sentences are kept while the running count stays within
    the budget; a first sentence that alone exceeds it is cut mid-sentence
    and the draft flagged ``truncated``.  ``hard=True`` takes the literal
    first ``budget_tokens`` words regardless of sentence boundaries.

    Raises:
        AssemblyError: the paper has no abstract and ``fallback`` is off.
            With ``fallback`` the first body section stands in.
    """
    source = paper.abstract
    if source is None:
        body = [s for s in paper.sections if s.heading_canonical != "abstract"]
        if not fallback or not body:
            raise AssemblyError(
                f"paper {paper.id!r} has no abstract; enable the fallback to use its first body section"
            )
        source = body[0]
    section_index = paper.sections.index(source)

    pieces: list[Piece] = []
    used = 0
    truncated = False
    for sent in source.sentences:
        if used + sent.token_count <= budget_tokens:
            pieces.append(Piece(section_index, sent.index_in_section, sent.text))
            used += sent.token_count
            continue
        if hard or not pieces:
            words = sent.text.split()[: budget_tokens - used]
            if words:
                pieces.append(Piece(section_index, sent.index_in_section, " ".join(words)))
                used += len(words)
            truncated = True
        break
    return _draft(paper.id, pieces, "laysumm", truncated=truncated)


def manifest_record(draft: SummaryDraft, report=None, extra: dict | None = None) -> dict:
    rec = {
        "id": draft.id,
        "task": draft.task,
        "token_count": draft.token_count,
        "over_budget": draft.over_budget,
        "truncated": draft.truncated,
        "pieces": [[p.section_index, p.sentence_index] for p in draft.pieces],
    }
    if draft.allocation is not None:
        rec["weights"] = {str(i): round(q.weight, 6) for i, q in sorted(draft.allocation.quotas.items())
                          if q.weight > 0}
    if report is not None:
        rec["cleanup"] = {
            "citations_removed": report.citations_removed,
            "unicode_chars_removed": report.unicode_chars_removed,
            "math_spans_removed": report.math_spans_removed,
        }
    if extra:
        rec.update(extra)
    return rec


def write_summary(draft: SummaryDraft, out_dir: str | Path) -> Path:
    """Write ``<id>.txt`` (UTF-8, one trailing newline)."""
    path = Path(out_dir) / f"{draft.id}.txt"
    path.write_text(draft.text + "\n", encoding="utf-8")
    return path


def write_manifest(records: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
