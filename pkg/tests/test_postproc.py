import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secsumm.assemble import Piece, SummaryDraft
from secsumm.postproc import (
    CleanupReport,
    clean_text,
    is_math_char,
    load_rules,
    postprocess,
    strip_citations,
    strip_math,
    strip_noneng,
)


def is_subsequence(small, big):
    it = iter(big)
    return all(ch in it for ch in small)


class TestCitations:
    @pytest.mark.parametrize(
        "text, expected, n",
        [
            ("as shown in [12, 13] the model", "as shown in the model", 1),
            ("(Vaswani et al., 2017) proposed", "proposed", 1),
            ("see [1-3, 7].", "see.", 1),
            ("as (Smith and Jones, 2019; Lee, 2020a) noted", "as noted", 1),
            ("no citations here", "no citations here", 0),
            ("the list [a, b] is kept", "the list [a, b] is kept", 0),
        ],
    )
    def test_examples(self, text, expected, n):
        assert strip_citations(text) == (expected, n)

    def test_year_in_prose_is_kept(self):
        assert strip_citations("In 2017 we began.") == ("In 2017 we began.", 0)


class TestUnicode:
    def test_transliteration(self):
        assert strip_noneng("naïve") == ("naive", 1)
        assert strip_noneng("résumé \u2014 draft") == ("resume - draft", 3)

    def test_strict_mode_drops(self):
        assert strip_noneng("naïve", transliterate_chars=False) == ("nave", 1)

    def test_untransliterable_is_removed_with_whitespace_mended(self):
        text, n = strip_noneng("word 中文 word")
        assert text == "word word" and n == 2

    def test_ascii_untouched(self):
        assert strip_noneng("plain ASCII, 100%!") == ("plain ASCII, 100%!", 0)


class TestMath:
    def test_example(self):
        assert strip_math("accuracy ≈ 0.9 ± 0.1") == ("accuracy 0.9 0.1", 2)

    def test_contiguous_run_is_one_span(self):
        assert strip_math("x ∀∃ y") == ("x y", 1)

    def test_ascii_operators_excluded(self):
        for ch in "+<=>|~^":
            assert not is_math_char(ch)
        assert strip_math("a+b=c") == ("a+b=c", 0)


# Three artifacts in one string, expected output written by hand.
FIXTURE_IN = ("Prior work [3] and (Smith and Jones, 2019; Lee et al., 2020) showed "
              "that loss ∑ ≤ 5 holds for café data \u2014 naïvely.")
FIXTURE_OUT = "Prior work and showed that loss 5 holds for cafe data - naively."


class TestCleanText:
    def test_fixture(self):
        text, report = clean_text(FIXTURE_IN)
        assert text == FIXTURE_OUT
        assert report == CleanupReport(citations_removed=2, unicode_chars_removed=3, math_spans_removed=2)

    def test_unicode_pass_alone_keeps_no_math(self):
        text, report = clean_text("a ≤ b", enabled=["unicode"])
        assert text == "a b" and report.unicode_chars_removed == 1

    def test_pass_subset(self):
        text, _ = clean_text(FIXTURE_IN, enabled=["citations"])
        assert "[3]" not in text and "≤" in text and "é" in text

    def test_unknown_pass(self):
        with pytest.raises(ValueError):
            clean_text("x", enabled=["emoji"])

    def test_rules_file_override(self, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text('{"citation_patterns": ["\\\\{\\\\d+\\\\}"]}', encoding="utf-8")
        rules = load_rules(str(path))
        assert strip_citations("see {4} here [4]", rules) == ("see here [4]", 1)

    @settings(max_examples=300, deadline=None)
    @given(st.text(alphabet=st.sampled_from(list("ab [1,2]();.é\u2014≈±∑中 etal2019")), max_size=60))
    def test_idempotent_and_subsequence_in_strict_mode(self, text):
        once, _ = clean_text(text, transliterate_chars=False)
        twice, report = clean_text(once, transliterate_chars=False)
        assert twice == once and report.total == 0
        assert is_subsequence(once, text)

    @settings(max_examples=300, deadline=None)
    @given(st.text(max_size=60))
    def test_idempotent_on_arbitrary_text(self, text):
        once, _ = clean_text(text)
        assert clean_text(once) == (once, CleanupReport())
        assert all(32 <= ord(c) < 127 or c in "\t\n\r" for c in once)


def draft_of(*texts):
    pieces = tuple(Piece(0, i, t) for i, t in enumerate(texts))
    return SummaryDraft("d", pieces, sum(len(t.split()) for t in texts), "longsumm")


class TestPostprocessDraft:
    def test_disabled_is_identity(self):
        d = draft_of(FIXTURE_IN)
        out, report = postprocess(d, enabled=())
        assert out is d and report.total == 0

    def test_second_run_reports_nothing(self):
        out, report = postprocess(draft_of(FIXTURE_IN, "Plain."))
        assert out.text == FIXTURE_OUT + " Plain."
        assert out.token_count == len(out.text.split())
        again, report2 = postprocess(out)
        assert again == out and report2.total == 0

    def test_empty_piece_dropped(self):
        out, _ = postprocess(draft_of("[1]", "Kept."))
        assert [p.text for p in out.pieces] == ["Kept."]
        assert out.token_count == 1
