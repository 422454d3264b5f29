"""Budget module: section weights from ROUGE-1 overlap, then length quotas.

A section whose overlap with the target falls below the cutoff is ignored;
the rest share the summary budget in proportion to their overlap.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .analysis import ContributionRow
from .ingest import Paper, Section
from .rouge import DEFAULT_CONFIG, RougeConfig, rouge_n, tokenize

__all__ = [
    "SectionOverlap",
    "SectionQuota",
    "BudgetAllocation",
    "compute_weights",
    "largest_remainder",
    "allocate",
    "overlap_source",
    "LONGSUMM_BUDGET_WORDS",
    "LAYSUMM_BUDGET_WORDS",
    "DEFAULT_CUTOFF",
]

LONGSUMM_BUDGET_WORDS = 600
LAYSUMM_BUDGET_WORDS = 150
DEFAULT_CUTOFF = 20.0


@dataclass(frozen=True)
class SectionOverlap:
    index: int
    r1_overlap: float  # 0-100 scale

    def __post_init__(self):
        if not self.r1_overlap >= 0:
            raise ValueError(f"overlap must be non-negative, got {self.r1_overlap}")


@dataclass(frozen=True)
class SectionQuota:
    weight: float
    token_quota: int
    sentence_quota: int


@dataclass(frozen=True)
class BudgetAllocation:
    quotas: dict[int, SectionQuota]
    total_budget_tokens: int
    cutoff: float = 0.0
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def retained(self) -> list[int]:
        return sorted(i for i, q in self.quotas.items() if q.weight > 0)

    def sentence_quota(self, index: int) -> int:
        q = self.quotas.get(index)
        return q.sentence_quota if q else 0


def compute_weights(overlaps: Sequence[SectionOverlap], cutoff: float) -> dict[int, float]:
    """Normalized weights of the sections whose overlap reaches ``cutoff``.

    If no section survives (or all survivors have zero overlap) the single
    highest-overlap section, earliest on ties, takes the whole weight.
    """
    if not overlaps:
        raise ValueError("compute_weights needs at least one section overlap")
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    survivors = [o for o in overlaps if o.r1_overlap >= cutoff]
    total = math.fsum(o.r1_overlap for o in survivors)
    weights = {o.index: 0.0 for o in overlaps}
    if not survivors or total <= 0:
        best = min(overlaps, key=lambda o: (-o.r1_overlap, o.index))
        weights[best.index] = 1.0
        return weights
    for o in survivors:
        weights[o.index] = o.r1_overlap / total
    return weights


def largest_remainder(shares: Mapping[int, float], total: int) -> dict[int, int]:
    """Integer apportionment of ``total`` units by largest remainder.

    ``shares`` are non-negative fractions summing to one.  Leftover units
    go to the largest fractional parts; ties favour the smaller key.
    """
    exact = {k: total * w for k, w in shares.items()}
    floors = {k: int(math.floor(v)) for k, v in exact.items()}
    leftover = total - sum(floors.values())
    order = sorted(exact, key=lambda k: (-(exact[k] - floors[k]), k))
    for k in order[:max(leftover, 0)]:
        floors[k] += 1
    return floors


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def allocate(
    weights: Mapping[int, float],
    total_budget_tokens: int,
    sections: Sequence[Section],
    cutoff: float = 0.0,
) -> BudgetAllocation:
    """Turn section weights into token and sentence quotas.

    ``sections[i]`` is the section behind weight key ``i``.  Token quotas
    apportion ``total_budget_tokens`` by largest remainder over the retained
    (positive-weight) sections.  A retained section's sentence quota is its
    token quota divided by the section's mean sentence length, rounded half
    up, at least one and at most the section's sentence count.
    """
    if total_budget_tokens < 1:
        raise ValueError("total_budget_tokens must be >= 1")
    retained = {i: w for i, w in weights.items() if w > 0}
    tokens = largest_remainder(retained, total_budget_tokens)
    quotas = {}
    for i, w in weights.items():
        if w <= 0:
            quotas[i] = SectionQuota(0.0, 0, 0)
            continue
        sents = sections[i].sentences
        if not sents:
            quotas[i] = SectionQuota(w, tokens[i], 0)
            continue
        mean_len = max(sum(s.token_count for s in sents) / len(sents), 1e-9)
        n = max(1, _round_half_up(tokens[i] / mean_len))
        quotas[i] = SectionQuota(w, tokens[i], min(n, len(sents)))
    return BudgetAllocation(quotas, total_budget_tokens, cutoff)


def _prior_lookup(prior_table: Sequence[ContributionRow]) -> tuple[dict[str, float], float]:
    if not prior_table:
        raise ValueError("prior table is empty")
    table = {row.heading: row.mean_r1 for row in prior_table}
    return table, statistics.median(row.mean_r1 for row in prior_table)


def overlap_source(
    paper: Paper,
    mode: str = "gold",
    gold: str | None = None,
    prior_table: Sequence[ContributionRow] | None = None,
    axis: str = "f1",
    config: RougeConfig = DEFAULT_CONFIG,
) -> list[SectionOverlap]:
    """Per-section ROUGE-1 overlap on the 0-100 scale.

    ``gold`` mode scores each section (candidate) against the gold summary
    (reference) on ``axis``.  ``prior`` mode looks each section up in a
    contribution table by key, then by canonical heading; headings missing
    from the table get the median of the table's ``mean_r1`` column.
    """
    if mode == "gold":
        if gold is None:
            raise ValueError("gold mode requires the gold summary text")
        if axis not in ("f1", "recall"):
            raise ValueError("axis must be 'f1' or 'recall'")
        ref = tokenize(gold, config)
        return [
            SectionOverlap(i, 100 * getattr(rouge_n(tokenize(s.text, config), ref, 1), axis))
            for i, s in enumerate(paper.sections)
        ]
    if mode == "prior":
        if prior_table is None:
            raise ValueError("prior mode requires a contribution table")
        table, median = _prior_lookup(prior_table)
        out = []
        for i, s in enumerate(paper.sections):
            value = table.get(s.key, table.get(s.heading_canonical, median))
            out.append(SectionOverlap(i, value))
        return out
    raise ValueError(f"unknown overlap mode {mode!r}; expected 'gold' or 'prior'")
