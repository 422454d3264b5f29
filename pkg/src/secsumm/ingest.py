"""Paper ingestion: science-parse / LaySumm JSON into a normalized ``Paper``.

Two input layouts are understood.

science_parse::

    {"id": str, "title": str, "abstractText": str?,
     "sections": [{"heading": str?, "text": str}]}

The raw science-parse CLI output, which nests the same fields under
``"metadata"`` and carries the PDF name in ``"name"``, is accepted too.

laysumm::

    {"id": str, "title": str?, "abstract": str | [str],
     "sections": [{"title": str?, "paragraphs": [str]} | {"title": str?, "text": str}]}

``"heading"`` is accepted as an alias of ``"title"`` inside sections, and
``"doi"`` / ``"paper_id"`` as aliases of ``"id"``.  Unknown fields are ignored.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping

__all__ = [
    "IngestError",
    "ParseError",
    "SchemaError",
    "Sentence",
    "Section",
    "Paper",
    "count_tokens",
    "load_abbreviations",
    "segment_sentences",
    "normalize_heading",
    "parse_paper",
    "FORMATS",
]

FORMATS = ("science_parse", "laysumm")


class IngestError(ValueError):
    """Base class for document ingestion failures."""


class ParseError(IngestError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class SchemaError(IngestError):
    def __init__(self, field_name: str, message: str | None = None):
        super().__init__(message or f"missing or invalid required field {field_name!r}")
        self.field = field_name


def count_tokens(text: str) -> int:
    """Length of ``text`` in whitespace-delimited words (budget unit)."""
    return len(text.split())


@dataclass(frozen=True)
class Sentence:
    text: str
    index_in_section: int
    token_count: int


@dataclass(frozen=True)
class Section:
    heading_raw: str
    heading_canonical: str
    sentences: tuple[Sentence, ...]
    # Unique within a paper: heading_canonical, plus "-<position>" on repeats.
    key: str = ""

    @property
    def text(self) -> str:
        return " ".join(s.text for s in self.sentences)

    @property
    def token_count(self) -> int:
        return sum(s.token_count for s in self.sentences)


@dataclass(frozen=True)
class Paper:
    id: str
    title: str
    abstract: Section | None
    sections: tuple[Section, ...] = field(default_factory=tuple)

    @property
    def is_empty(self) -> bool:
        return not self.sections

    def section_by_key(self, key: str) -> Section | None:
        for section in self.sections:
            if section.key == key:
                return section
        return None


# ---------------------------------------------------------------------------
# sentence segmentation

@lru_cache(maxsize=None)
def _default_abbreviations() -> frozenset[str]:
    text = resources.files("secsumm.data").joinpath("abbreviations.txt").read_text("utf-8")
    return frozenset(_parse_abbreviation_lines(text.splitlines()))


def _parse_abbreviation_lines(lines: Iterable[str]) -> list[str]:
    out = []
    for line in lines:
        line = line.strip().lower()
        if line and not line.startswith("#"):
            out.append(" ".join(line.split()))
    return out


def load_abbreviations(path: str | None = None) -> frozenset[str]:
    """Read an abbreviation list (one entry per line, ``#`` comments).

    With no path the bundled list is returned.
    """
    if path is None:
        return _default_abbreviations()
    with open(path, encoding="utf-8") as fh:
        return frozenset(_parse_abbreviation_lines(fh))


# terminal punctuation, optional closing quotes/brackets, whitespace, then
# an uppercase letter or digit (possibly behind an opening quote/bracket)
_BOUNDARY = re.compile(r"""[.?!]+["'”’)\]]*(?=\s+["'“‘(\[]?(\w))""")
_INITIAL = re.compile(r"^[^\W\d_]\.$")  # checked for uppercase below
_LEADING_PUNCT = "([{\"'“‘"


def _is_protected(prefix: str, abbreviations: frozenset[str]) -> bool:
    """``prefix`` is the text up to and including a candidate period."""
    words = prefix.split()
    if not words:
        return True
    last = words[-1].lstrip(_LEADING_PUNCT).lower()
    raw_last = words[-1].lstrip(_LEADING_PUNCT)
    if _INITIAL.match(raw_last) and raw_last[0].isupper():
        return True
    if last in abbreviations:
        return True
    if len(words) >= 2 and f"{words[-2].lstrip(_LEADING_PUNCT).lower()} {last}" in abbreviations:
        return True
    return False


def segment_sentences(
    text: str, abbreviations: frozenset[str] | None = None
) -> list[Sentence]:
    """Split ``text`` into sentences with a rule-based boundary detector.

    A boundary is a run of ``.``, ``?`` or ``!`` followed by whitespace and
    an uppercase letter or digit.  Periods closing a protected abbreviation
    or a single uppercase initial ("J. Smith") are not boundaries.  Each returned sentence is a
    stripped substring of ``text``.
    """
    if abbreviations is None:
        abbreviations = _default_abbreviations()
    spans: list[tuple[int, int]] = []
    start = 0
    for m in _BOUNDARY.finditer(text):
        nxt = m.group(1)
        if not (nxt.isupper() or nxt.isdigit()):
            continue
        end = m.end()
        punct = m.group(0)
        if punct[0] == "." and len(punct.rstrip("\"'”’)]")) == 1:
            if _is_protected(text[start:m.start() + 1], abbreviations):
                continue
        spans.append((start, end))
        start = end
    spans.append((start, len(text)))

    sentences = []
    for lo, hi in spans:
        piece = text[lo:hi].strip()
        if piece:
            sentences.append(Sentence(piece, len(sentences), count_tokens(piece)))
    return sentences


# ---------------------------------------------------------------------------
# headings

_ROMAN_ENUM = r"(?=[mdclxvi])m{0,4}(?:c[md]|d?c{0,3})(?:x[cl]|l?x{0,3})(?:i[xv]|v?i{0,3})\."
_ENUM = re.compile(rf"^(?:\d+(?:\.\d+)*\.?|{_ROMAN_ENUM})\s+")


def normalize_heading(raw: str, conflation: Mapping[str, str] | None = None) -> str:
    """Lowercase, collapse whitespace and drop a leading enumeration.

    >>> normalize_heading("3. Related  Work")
    'related work'
    """
    heading = " ".join(raw.lower().split())
    heading = _ENUM.sub("", heading, count=1)
    if conflation:
        heading = conflation.get(heading, heading)
    return heading


# ---------------------------------------------------------------------------
# adapters

def _load_json(document: bytes | str):
    if isinstance(document, bytes):
        try:
            text = document.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ParseError(f"invalid UTF-8: {exc.reason}", exc.start) from exc
    else:
        text = document
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise ParseError(f"malformed JSON: {exc.msg}", offset) from exc


def _require_str(obj: Mapping, *names: str, optional: bool = False) -> str | None:
    for name in names:
        value = obj.get(name)
        if value is None:
            continue
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return str(value)
        if not isinstance(value, str):
            raise SchemaError(name, f"field {name!r} must be a string")
        return value
    if optional:
        return None
    raise SchemaError(names[0])


def _science_parse_raw(obj: Mapping) -> tuple[str | None, str, str | None, list[tuple[str | None, str]]]:
    if "metadata" in obj and isinstance(obj["metadata"], Mapping):
        meta = obj["metadata"]
        doc_id = _require_str(obj, "id", optional=True)
        if doc_id is None:
            name = _require_str(obj, "name", optional=True)
            doc_id = re.sub(r"\.pdf$", "", name, flags=re.I) if name else None
        body = meta
    else:
        doc_id = _require_str(obj, "id", optional=True)
        body = obj
    title = _require_str(body, "title", optional=True) or ""
    abstract = _require_str(body, "abstractText", optional=True)
    sections = body.get("sections")
    if not isinstance(sections, list):
        raise SchemaError("sections")
    raw = []
    for i, sec in enumerate(sections):
        if not isinstance(sec, Mapping):
            raise SchemaError(f"sections[{i}]", f"sections[{i}] must be an object")
        text = sec.get("text")
        if not isinstance(text, str):
            raise SchemaError(f"sections[{i}].text")
        heading = sec.get("heading")
        raw.append((heading if isinstance(heading, str) else None, text))
    return doc_id, title, abstract, raw


def _join_paragraphs(value, field_name: str) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, list) and all(isinstance(p, str) for p in value):
        return "\n".join(value)
    raise SchemaError(field_name, f"field {field_name!r} must be a string or list of strings")


def _laysumm_raw(obj: Mapping) -> tuple[str | None, str, str | None, list[tuple[str | None, str]]]:
    doc_id = _require_str(obj, "id", "paper_id", "doi", optional=True)
    title = _require_str(obj, "title", optional=True) or ""
    abstract = None
    if obj.get("abstract") is not None:
        abstract = _join_paragraphs(obj["abstract"], "abstract")
    sections = obj.get("sections")
    if not isinstance(sections, list):
        raise SchemaError("sections")
    raw = []
    for i, sec in enumerate(sections):
        if not isinstance(sec, Mapping):
            raise SchemaError(f"sections[{i}]", f"sections[{i}] must be an object")
        if "paragraphs" in sec:
            text = _join_paragraphs(sec["paragraphs"], f"sections[{i}].paragraphs")
        elif isinstance(sec.get("text"), str):
            text = sec["text"]
        else:
            raise SchemaError(f"sections[{i}].paragraphs")
        heading = sec.get("title", sec.get("heading"))
        raw.append((heading if isinstance(heading, str) else None, text))
    return doc_id, title, abstract, raw


def _build_section(
    heading_raw: str,
    canonical: str,
    text: str,
    abbreviations: frozenset[str] | None,
) -> Section:
    return Section(heading_raw, canonical, tuple(segment_sentences(text, abbreviations)), canonical)


def parse_paper(
    document: bytes | str,
    format: str = "science_parse",
    *,
    default_id: str | None = None,
    conflation: Mapping[str, str] | None = None,
    abbreviations: frozenset[str] | None = None,
) -> Paper:
    """Parse one JSON document into a :class:`Paper`.

    Args:
        document: UTF-8 bytes (or an already-decoded string).
        format: ``"science_parse"`` or ``"laysumm"``.
        default_id: id to use when the document carries none (for instance
            the file name stem).
        conflation: optional exact-match heading map applied after
            normalization.
        abbreviations: sentence splitter abbreviation list override.

    Raises:
        ParseError: the bytes are not valid JSON; carries the byte offset.
        SchemaError: a required field is missing or mistyped.
    """
    obj = _load_json(document)
    if not isinstance(obj, Mapping):
        raise SchemaError("<root>", "document root must be a JSON object")
    if format == "science_parse":
        doc_id, title, abstract_text, raw_sections = _science_parse_raw(obj)
    elif format == "laysumm":
        doc_id, title, abstract_text, raw_sections = _laysumm_raw(obj)
    else:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    doc_id = doc_id or default_id
    if not doc_id:
        raise SchemaError("id")

    sections: list[Section] = []
    abstract = None
    if abstract_text is not None:
        abstract = _build_section("Abstract", "abstract", abstract_text, abbreviations)
        if abstract.sentences:
            sections.append(abstract)
        else:
            abstract = None

    for position, (heading, text) in enumerate(raw_sections):
        if heading is None or not heading.strip():
            heading_raw = heading or ""
            canonical = f"unnamed-{position}"
        else:
            heading_raw = heading
            canonical = normalize_heading(heading, conflation)
        section = _build_section(heading_raw, canonical, text, abbreviations)
        if section.sentences:
            sections.append(section)

    # repeated canonical headings stay distinct: suffix the paper position
    seen: set[str] = set()
    keyed = []
    for index, section in enumerate(sections):
        key = section.heading_canonical
        if key in seen:
            key = f"{key}-{index}"
            section = Section(section.heading_raw, section.heading_canonical, section.sentences, key)
        seen.add(key)
        keyed.append(section)
    if abstract is not None:
        abstract = keyed[0]
    return Paper(doc_id, title, abstract, tuple(keyed))
