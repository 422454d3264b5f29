"""ROUGE-1, ROUGE-2 and ROUGE-L with clipped n-gram counts.

Scores are fractions in [0, 1]; reports multiply by 100.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Sequence, Union

__all__ = [
    "TokenSeq",
    "RougeConfig",
    "RougeScore",
    "VARIANTS",
    "tokenize",
    "ngrams",
    "rouge_n",
    "rouge_l",
    "lcs_length",
    "score_all",
    "f_measure",
]

TokenSeq = tuple[str, ...]

VARIANTS = ("rouge-1", "rouge-2", "rouge-l")

_WORD = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class RougeConfig:
    lowercase: bool = True
    stemming: bool = False
    remove_stopwords: bool = False
    rouge_l_mode: str = "sequence"  # or "union" (summary-level LCS)

    def __post_init__(self):
        if self.rouge_l_mode not in ("sequence", "union"):
            raise ValueError(f"rouge_l_mode must be 'sequence' or 'union', got {self.rouge_l_mode!r}")


DEFAULT_CONFIG = RougeConfig()


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float
    degenerate: bool = False

    def scaled(self) -> tuple[float, float, float]:
        return (100 * self.precision, 100 * self.recall, 100 * self.f1)


ZERO = RougeScore(0.0, 0.0, 0.0, degenerate=True)


def f_measure(precision: float, recall: float) -> float:
    if precision + recall <= 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _score(overlap: int, n_candidate: int, n_reference: int) -> RougeScore:
    degenerate = n_candidate == 0 or n_reference == 0
    p = overlap / n_candidate if n_candidate else 0.0
    r = overlap / n_reference if n_reference else 0.0
    return RougeScore(p, r, f_measure(p, r), degenerate)


@lru_cache(maxsize=1)
def _stopwords() -> frozenset[str]:
    text = resources.files("secsumm.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(text.split())


@lru_cache(maxsize=1)
def _stemmer():
    from nltk.stem.porter import PorterStemmer

    return PorterStemmer()


def tokenize(text: str, config: RougeConfig = DEFAULT_CONFIG) -> TokenSeq:
    """Split on runs of non-alphanumeric characters.

    >>> tokenize("ROUGE-1 = 45.94")
    ('rouge', '1', '45', '94')
    """
    tokens = _WORD.findall(text.lower() if config.lowercase else text)
    if config.remove_stopwords:
        stop = _stopwords()
        tokens = [t for t in tokens if t.lower() not in stop]
    if config.stemming:
        stem = _stemmer().stem
        tokens = [stem(t) if len(t) > 3 else t for t in tokens]
    return tuple(tokens)


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _clipped_overlap(a: Counter, b: Counter) -> int:
    if len(a) > len(b):
        a, b = b, a
    return sum(min(c, b[g]) for g, c in a.items() if g in b)


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int = 1) -> RougeScore:
    """Clipped n-gram overlap between two token sequences."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cand = ngrams(candidate, n)
    ref = ngrams(reference, n)
    n_cand = max(len(candidate) - n + 1, 0)
    n_ref = max(len(reference) - n + 1, 0)
    return _score(_clipped_overlap(cand, ref), n_cand, n_ref)


def _lcs_table(a: Sequence[str], b: Sequence[str]) -> list[list[int]]:
    rows, cols = len(a), len(b)
    table = [[0] * (cols + 1) for _ in range(rows + 1)]
    for i in range(1, rows + 1):
        ai = a[i - 1]
        prev, cur = table[i - 1], table[i]
        for j in range(1, cols + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = prev[j] if prev[j] >= cur[j - 1] else cur[j - 1]
    return table


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """LCS length via the bit-parallel recurrence (Allison-Dix / Hyyro)."""
    if not a or not b:
        return 0
    masks: dict[str, int] = {}
    for j, token in enumerate(b):
        masks[token] = masks.get(token, 0) | (1 << j)
    full = (1 << len(b)) - 1
    v = full
    for token in a:
        m = masks.get(token)
        if m is None:
            continue
        u = v & m
        v = ((v + u) | (v - u)) & full
    return len(b) - bin(v).count("1")


def _lcs_positions(ref: Sequence[str], cand: Sequence[str]) -> set[int]:
    """Positions in ``ref`` covered by one LCS with ``cand``."""
    table = _lcs_table(ref, cand)
    i, j = len(ref), len(cand)
    hits = set()
    while i > 0 and j > 0:
        if ref[i - 1] == cand[j - 1]:
            hits.add(i - 1)
            i -= 1
            j -= 1
        elif table[i - 1][j] >= table[i][j - 1]:
            i -= 1
        else:
            j -= 1
    return hits


Sentences = Sequence[Sequence[str]]


def _as_sentences(seq: Union[Sequence[str], Sentences]) -> list[Sequence[str]]:
    if seq and not isinstance(seq[0], str):
        return [s for s in seq if s]
    return [seq] if seq else []


def _flatten(seq: Union[Sequence[str], Sentences]) -> list[str]:
    if seq and not isinstance(seq[0], str):
        return [t for s in seq for t in s]
    return list(seq)


def rouge_l(
    candidate: Union[Sequence[str], Sentences],
    reference: Union[Sequence[str], Sentences],
    config: RougeConfig = DEFAULT_CONFIG,
) -> RougeScore:
    """LCS-based ROUGE.

    Each side is either a flat token sequence or a list of per-sentence
    token sequences.  ``sequence`` mode flattens both sides and takes one
    LCS.  ``union`` mode is the summary-level variant: for every reference
    sentence the union of its LCS hits against each candidate sentence is
    counted, clipped by the remaining token counts of both sides.
    """
    if config.rouge_l_mode == "sequence":
        cand, ref = _flatten(candidate), _flatten(reference)
        return _score(lcs_length(cand, ref), len(cand), len(ref))

    cand_sents, ref_sents = _as_sentences(candidate), _as_sentences(reference)
    n_cand = sum(len(s) for s in cand_sents)
    n_ref = sum(len(s) for s in ref_sents)
    if not n_cand or not n_ref:
        return _score(0, n_cand, n_ref)
    cand_counts = Counter(t for s in cand_sents for t in s)
    ref_counts = Counter(t for s in ref_sents for t in s)
    hits = 0
    for ref_sent in ref_sents:
        union: set[int] = set()
        for cand_sent in cand_sents:
            union |= _lcs_positions(ref_sent, cand_sent)
        for pos in sorted(union):
            token = ref_sent[pos]
            if cand_counts[token] > 0 and ref_counts[token] > 0:
                hits += 1
                cand_counts[token] -= 1
                ref_counts[token] -= 1
    return _score(hits, n_cand, n_ref)


def _sentence_tokens(text: str, config: RougeConfig) -> list[TokenSeq]:
    from .ingest import segment_sentences

    return [tokenize(s.text, config) for s in segment_sentences(text)]


def score_all(candidate: str, reference: str, config: RougeConfig = DEFAULT_CONFIG) -> dict[str, RougeScore]:
    """ROUGE-1, ROUGE-2 and ROUGE-L for one candidate/reference text pair."""
    if config.rouge_l_mode == "union":
        cand_sents = _sentence_tokens(candidate, config)
        ref_sents = _sentence_tokens(reference, config)
        cand = tuple(t for s in cand_sents for t in s)
        ref = tuple(t for s in ref_sents for t in s)
        rl = rouge_l(cand_sents, ref_sents, config)
    else:
        cand, ref = tokenize(candidate, config), tokenize(reference, config)
        rl = rouge_l(cand, ref, config)
    return {"rouge-1": rouge_n(cand, ref, 1), "rouge-2": rouge_n(cand, ref, 2), "rouge-l": rl}
