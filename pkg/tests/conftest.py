from __future__ import annotations

import json
from pathlib import Path

import pytest

from secsumm.ingest import Paper, Section, normalize_heading, segment_sentences

FIXTURES = Path(__file__).parent / "fixtures"


def make_section(text: str, heading: str = "body", key: str | None = None) -> Section:
    canonical = normalize_heading(heading)
    return Section(heading, canonical, tuple(segment_sentences(text)), key or canonical)


def make_paper(pid: str, sections: list[tuple[str, str]], abstract: str | None = None) -> Paper:
    """``sections`` is a list of (heading, text)."""
    doc = {"id": pid, "title": pid, "sections": [{"heading": h, "text": t} for h, t in sections]}
    if abstract is not None:
        doc["abstractText"] = abstract
    from secsumm.ingest import parse_paper

    return parse_paper(json.dumps(doc).encode(), "science_parse")


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


_CRITERIA: list[tuple[str, str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.skipped):
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        outcome = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _CRITERIA.append((props["criterion"], outcome, props.get("measured", "")))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, measured in _CRITERIA:
        line = f"[{outcome}] {name}"
        if measured:
            line += f"  ({measured})"
        terminalreporter.write_line(line)
