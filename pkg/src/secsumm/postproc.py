"""Summary clean-up: bracketed citations, non-English characters, math symbols.

Patterns, the transliteration table and the math symbol inventory live in
``data/postproc.json``; pass a :class:`CleanupRules` to override them.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from typing import Callable, Iterable

from .ingest import count_tokens

__all__ = [
    "PASSES",
    "CleanupRules",
    "CleanupReport",
    "load_rules",
    "strip_citations",
    "strip_noneng",
    "strip_math",
    "transliterate",
    "is_math_char",
    "postprocess",
    "clean_text",
]

PASSES = ("citations", "unicode", "math")


@dataclass(frozen=True)
class CleanupRules:
    citation_patterns: tuple[re.Pattern, ...]
    transliteration: dict[str, str]
    math_symbols: frozenset[str]
    math_exclude: frozenset[str]


@dataclass(frozen=True)
class CleanupReport:
    citations_removed: int = 0
    unicode_chars_removed: int = 0
    math_spans_removed: int = 0

    def __add__(self, other: "CleanupReport") -> "CleanupReport":
        return CleanupReport(
            self.citations_removed + other.citations_removed,
            self.unicode_chars_removed + other.unicode_chars_removed,
            self.math_spans_removed + other.math_spans_removed,
        )

    @property
    def total(self) -> int:
        return self.citations_removed + self.unicode_chars_removed + self.math_spans_removed


def _rules_from_dict(raw: dict) -> CleanupRules:
    return CleanupRules(
        citation_patterns=tuple(re.compile(p) for p in raw["citation_patterns"]),
        transliteration=dict(raw.get("transliteration", {})),
        math_symbols=frozenset(raw.get("math_symbols", "")),
        math_exclude=frozenset(raw.get("math_exclude", "")),
    )


@lru_cache(maxsize=1)
def _default_rules() -> CleanupRules:
    raw = json.loads(resources.files("secsumm.data").joinpath("postproc.json").read_text("utf-8"))
    return _rules_from_dict(raw)


def load_rules(path: str | None = None) -> CleanupRules:
    if path is None:
        return _default_rules()
    with open(path, encoding="utf-8") as fh:
        return _rules_from_dict(json.load(fh))


def _remove_spans(text: str, spans: Iterable[tuple[int, int]]) -> str:
    """Delete ``spans`` and mend the whitespace each deletion leaves behind."""
    out: list[str] = []
    pos = 0
    for lo, hi in spans:
        out.append(text[pos:lo])
        pos = hi
        tail = "".join(out)
        left_space = not tail or tail[-1].isspace()
        right = text[hi:hi + 1]
        if left_space and right.isspace():
            while pos < len(text) and text[pos].isspace():
                pos += 1
        elif left_space and (not right or right in ".,;:!?)"):
            out = [tail.rstrip()]
    out.append(text[pos:])
    return "".join(out)


def _fixpoint(text: str, step: Callable[[str], tuple[str, int]]) -> tuple[str, int]:
    total = 0
    while True:
        text, n = step(text)
        if not n:
            return text, total
        total += n


def strip_citations(text: str, rules: CleanupRules | None = None) -> tuple[str, int]:
    """Remove numeric ``[..]`` groups and parenthesized author-year citations."""
    rules = rules or _default_rules()

    def step(s: str) -> tuple[str, int]:
        spans = []
        for pattern in rules.citation_patterns:
            spans += [m.span() for m in pattern.finditer(s)]
        spans = _disjoint(spans)
        return (_remove_spans(s, spans), len(spans)) if spans else (s, 0)

    return _fixpoint(text, step)


def _disjoint(spans: list[tuple[int, int]]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for lo, hi in sorted(spans):
        if out and lo < out[-1][1]:
            continue
        out.append((lo, hi))
    return out


def _is_kept_ascii(ch: str) -> bool:
    return " " <= ch <= "~" or ch in "\n\t\r"


def transliterate(ch: str, rules: CleanupRules | None = None) -> str:
    """ASCII replacement for one character ('' when there is none)."""
    if _is_kept_ascii(ch):
        return ch
    rules = rules or _default_rules()
    if ch in rules.transliteration:
        return rules.transliteration[ch]
    decomposed = unicodedata.normalize("NFKD", ch)
    return "".join(c for c in decomposed if _is_kept_ascii(c))


def strip_noneng(
    text: str,
    rules: CleanupRules | None = None,
    transliterate_chars: bool = True,
    keep: Callable[[str], bool] | None = None,
) -> tuple[str, int]:
    """Map or drop every character outside printable ASCII.

    With ``transliterate_chars`` (default) characters are first replaced by
    their ASCII equivalent where one exists (``é`` -> ``e``, an em dash -> ``-``);
    otherwise they are deleted outright.  Characters for which ``keep``
    returns true are left alone.  The count is the number of characters
    changed or removed.
    """
    rules = rules or _default_rules()
    out = []
    spans = []
    changed = 0
    for i, ch in enumerate(text):
        if _is_kept_ascii(ch) or (keep is not None and keep(ch)):
            continue
        changed += 1
        sub = transliterate(ch, rules) if transliterate_chars else ""
        if sub:
            out.append((i, sub))
        else:
            spans.append((i, i + 1))
    if not changed:
        return text, 0
    subs = dict(out)
    removed = {lo for lo, _ in spans}
    # rebuild with substitutions, then mend whitespace around the removals
    pieces, new_spans, cursor = [], [], 0
    for i, ch in enumerate(text):
        if i in removed:
            new_spans.append((cursor, cursor + 1))
            pieces.append(ch)
            cursor += 1
            continue
        piece = subs.get(i, ch)
        pieces.append(piece)
        cursor += len(piece)
    rebuilt = "".join(pieces)
    merged = _merge_adjacent(new_spans)
    return _remove_spans(rebuilt, merged), changed


def _merge_adjacent(spans: list[tuple[int, int]]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for lo, hi in spans:
        if out and out[-1][1] == lo:
            out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


def is_math_char(ch: str, rules: CleanupRules | None = None) -> bool:
    rules = rules or _default_rules()
    if ch in rules.math_exclude:
        return False
    return ch in rules.math_symbols or unicodedata.category(ch) == "Sm"


def strip_math(text: str, rules: CleanupRules | None = None) -> tuple[str, int]:
    """Remove math symbols; each contiguous run counts as one span.

    >>> strip_math("accuracy ≈ 0.9 ± 0.1")
    ('accuracy 0.9 0.1', 2)
    """
    rules = rules or _default_rules()
    spans = []
    for i, ch in enumerate(text):
        if is_math_char(ch, rules):
            spans.append((i, i + 1))
    if not spans:
        return text, 0
    merged = _merge_adjacent(spans)
    return _remove_spans(text, merged), len(merged)


def clean_text(
    text: str,
    enabled: Iterable[str] = PASSES,
    rules: CleanupRules | None = None,
    transliterate_chars: bool = True,
) -> tuple[str, CleanupReport]:
    """Run the enabled passes (always in citations, unicode, math order).

    The sequence repeats until nothing changes, so applying it to its own
    output is a no-op.
    """
    rules = rules or _default_rules()
    enabled = set(enabled)
    unknown = enabled - set(PASSES)
    if unknown:
        raise ValueError(f"unknown post-processing passes {sorted(unknown)}; expected {PASSES}")
    math_on = "math" in enabled
    keep = (lambda ch: is_math_char(ch, rules)) if math_on else None
    report = CleanupReport()
    while True:
        cit = uni = mth = 0
        if "citations" in enabled:
            text, cit = strip_citations(text, rules)
        if "unicode" in enabled:
            text, uni = strip_noneng(text, rules, transliterate_chars, keep=keep)
        if math_on:
            text, mth = strip_math(text, rules)
        round_report = CleanupReport(cit, uni, mth)
        if not round_report.total:
            return text, report
        report = report + round_report


def postprocess(draft, enabled: Iterable[str] = PASSES, rules: CleanupRules | None = None,
                transliterate_chars: bool = True):
    """Clean every piece of a :class:`~secsumm.assemble.SummaryDraft`.

    Pieces that end up empty are dropped; ``token_count`` is recomputed.
    Returns ``(draft, CleanupReport)``.
    """
    enabled = tuple(enabled)
    report = CleanupReport()
    pieces = []
    for piece in draft.pieces:
        text, r = clean_text(piece.text, enabled, rules, transliterate_chars)
        report = report + r
        if text.strip():
            pieces.append(replace(piece, text=text.strip()))
    if not report.total:
        return draft, report
    return replace(draft, pieces=tuple(pieces), token_count=sum(count_tokens(p.text) for p in pieces)), report
