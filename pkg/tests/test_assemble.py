import json

import pytest

from secsumm.assemble import (
    AssemblyError,
    WeightConfig,
    assemble_longsumm,
    lead150_laysumm,
    manifest_record,
    write_manifest,
    write_summary,
)
from secsumm.extract import ScorerSpec
from secsumm.postproc import postprocess

from conftest import make_paper

GOLD = "a b c d e f g h"


@pytest.fixture
def traced_paper():
    # intro overlap with GOLD: R1 F1 = 2*(5/7*5/8)/(5/7+5/8) = 2/3 -> 66.67
    # method overlap: 3 of 7 tokens, 3 of 8 gold -> F1 = 0.4 -> 40.0
    # weights 66.67/106.67 = 0.625 and 0.375
    return make_paper("t", [("Intro", "A b c. X y. D e."), ("Method", "F g h. Q r s t.")])


def run(paper, budget, scorer="oracle", cutoff=20.0):
    return assemble_longsumm(paper, WeightConfig("gold", cutoff), ScorerSpec(scorer), budget, gold=GOLD)


class TestLongSumm:
    def test_weights(self, traced_paper):
        alloc = run(traced_paper, 8).allocation
        assert alloc.quotas[0].weight == pytest.approx(0.625)
        assert alloc.quotas[1].weight == pytest.approx(0.375)

    def test_budget_8(self, traced_paper):
        # token quotas 5 and 3; mean lengths 8/3 and 3.5 -> 2 and 1 sentences
        d = run(traced_paper, 8)
        assert d.text == "A b c. D e. F g h."
        assert d.token_count == 8 and not d.over_budget

    def test_budget_7_trims_lowest_weight_section(self, traced_paper):
        d = run(traced_paper, 7)
        q = d.allocation.quotas
        assert (q[0].token_quota, q[1].token_quota) == (4, 3)
        assert (q[0].sentence_quota, q[1].sentence_quota) == (2, 1)
        assert d.text == "A b c. D e."
        assert d.token_count == 5 and not d.over_budget

    def test_budget_1_keeps_single_sentence(self, traced_paper):
        d = run(traced_paper, 1)
        assert d.text == "A b c." and d.over_budget

    def test_single_section_gets_whole_budget(self):
        paper = make_paper("s", [("Body", "One two. Three four. Five six.")])
        d = assemble_longsumm(paper, WeightConfig("gold", 0.0), ScorerSpec("lead"), 600, gold="one")
        assert d.text == "One two. Three four. Five six."
        assert d.allocation.quotas[0].weight == 1.0

    def test_document_order_in_output(self, traced_paper):
        d = run(traced_paper, 100, scorer="centrality", cutoff=0.0)
        keys = [(p.section_index, p.sentence_index) for p in d.pieces]
        assert keys == sorted(keys)

    def test_deterministic(self, traced_paper):
        assert run(traced_paper, 7) == run(traced_paper, 7)

    def test_empty_paper(self):
        with pytest.raises(AssemblyError):
            run(make_paper("e", []), 10)

    def test_within_budget_for_all_scorers(self, traced_paper):
        for scorer in ("lead", "centrality", "oracle"):
            for budget in range(3, 20):
                d = run(traced_paper, budget, scorer=scorer)
                assert d.token_count <= budget and not d.over_budget

    def test_postprocess_keeps_budget(self):
        paper = make_paper("c", [("Intro", "Model [1] works. Results (Lee, 2020) hold.")])
        d = assemble_longsumm(paper, WeightConfig("gold", 0.0), ScorerSpec("lead"), 7, gold="model works")
        cleaned, report = postprocess(d)
        assert cleaned.text == "Model works. Results hold."
        assert cleaned.token_count <= d.token_count and report.citations_removed == 2


def sentences(n, length):
    return " ".join(" ".join(["Word"] * (length - 1) + ["end."]) for _ in range(n))


class TestLead150:
    def test_short_abstract_whole(self):
        text = sentences(4, 20)
        paper = make_paper("a", [("Intro", "Body.")], abstract=text)
        d = lead150_laysumm(paper)
        assert d.token_count == 80 and d.text == text and not d.truncated

    def test_sentence_complete_stops_before_overflow(self):
        paper = make_paper("a", [], abstract=sentences(10, 20))
        d = lead150_laysumm(paper)
        assert len(d.pieces) == 7 and d.token_count == 140

    def test_hard_mode_takes_exactly_150(self):
        paper = make_paper("a", [], abstract=sentences(10, 20))
        d = lead150_laysumm(paper, hard=True)
        assert d.token_count == 150 and d.truncated
        assert d.text.split() == paper.abstract.text.split()[:150]

    def test_long_first_sentence_truncated(self):
        paper = make_paper("a", [], abstract=sentences(1, 180))
        d = lead150_laysumm(paper)
        assert d.token_count == 150 and d.truncated

    def test_missing_abstract(self):
        paper = make_paper("m", [("Intro", "First body sentence. Second one.")])
        with pytest.raises(AssemblyError, match="no abstract"):
            lead150_laysumm(paper)
        assert lead150_laysumm(paper, fallback=True).text == "First body sentence. Second one."

    def test_body_is_irrelevant(self):
        a = make_paper("x", [("Intro", "One.")], abstract="Same abstract here.")
        b = make_paper("x", [("Intro", "Completely different."), ("More", "Stuff.")],
                       abstract="Same abstract here.")
        assert lead150_laysumm(a) == lead150_laysumm(b)

    def test_idempotent_on_own_output(self):
        paper = make_paper("a", [], abstract=sentences(10, 20))
        first = lead150_laysumm(paper)
        again = lead150_laysumm(make_paper("a", [], abstract=first.text))
        assert again.text == first.text


class TestOutputs:
    def test_write_summary_and_manifest(self, traced_paper, tmp_path):
        d = run(traced_paper, 8)
        path = write_summary(d, tmp_path)
        assert path.name == "t.txt"
        assert path.read_text(encoding="utf-8") == "A b c. D e. F g h.\n"
        write_manifest([manifest_record(d)], tmp_path / "m.jsonl")
        rec = json.loads((tmp_path / "m.jsonl").read_text())
        assert rec["pieces"] == [[0, 0], [0, 2], [1, 0]]
        assert rec["token_count"] == 8 and rec["weights"] == {"0": 0.625, "1": 0.375}
