import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secsumm.rouge import RougeConfig, lcs_length, rouge_l, rouge_n, score_all, tokenize

from oracles import full_dp_lcs, naive_rouge_l, naive_rouge_n

seqs = st.lists(st.sampled_from("abcde"), max_size=12)


def toks(text):
    return tokenize(text)


class TestTokenize:
    def test_examples(self):
        assert tokenize("The cat's mat.") == ("the", "cat", "s", "mat")
        assert tokenize("") == ()
        assert tokenize("ROUGE-1 = 45.94") == ("rouge", "1", "45", "94")

    def test_case_preserved_when_configured(self):
        assert tokenize("The Cat", RougeConfig(lowercase=False)) == ("The", "Cat")

    def test_stemming_flag(self):
        assert tokenize("running models", RougeConfig(stemming=True)) == ("run", "model")

    def test_stopword_flag(self):
        assert tokenize("the cat and the mat", RougeConfig(remove_stopwords=True)) == ("cat", "mat")

    def test_underscore_splits(self):
        assert tokenize("snake_case") == ("snake", "case")


class TestRougeN:
    def test_unigram_example(self):
        s = rouge_n(toks("the cat sat"), toks("the cat ate"), 1)
        assert (s.precision, s.recall, s.f1) == pytest.approx((2 / 3, 2 / 3, 2 / 3), abs=1e-12)

    def test_bigram_example(self):
        s = rouge_n(toks("the cat sat"), toks("the cat ate"), 2)
        assert (s.precision, s.recall, s.f1) == pytest.approx((0.5, 0.5, 0.5), abs=1e-12)

    def test_identity(self):
        s = rouge_n(toks("a b c a"), toks("a b c a"), 1)
        assert s.precision == s.recall == s.f1 == 1.0

    def test_clipping(self):
        # candidate repeats "the" four times; reference has it twice
        s = rouge_n(toks("the the the the"), toks("the cat the mat"), 1)
        assert s.precision == 0.5 and s.recall == 0.5

    def test_short_side_is_degenerate(self):
        s = rouge_n(toks("a"), toks("a b"), 2)
        assert (s.precision, s.recall, s.f1) == (0.0, 0.0, 0.0)
        assert s.degenerate

    def test_n_must_be_positive(self):
        with pytest.raises(ValueError):
            rouge_n(("a",), ("a",), 0)


class TestRougeL:
    def test_example(self):
        s = rouge_l(toks("the cat sat"), toks("the cat ate"))
        assert (s.precision, s.recall, s.f1) == pytest.approx((2 / 3, 2 / 3, 2 / 3))

    def test_reversed_sequence(self):
        s = rouge_l(toks("a b c d"), toks("d c b a"))
        assert s.precision == s.recall == 0.25

    def test_identity(self):
        assert rouge_l(toks("x y z"), toks("x y z")).f1 == 1.0

    def test_empty_side(self):
        s = rouge_l((), toks("x"))
        assert s.f1 == 0.0 and s.degenerate

    def test_union_mode_textbook_case(self):
        # reference w1..w5 against candidate sentences (w1 w2 w6 w7 w8) and
        # (w1 w3 w8 w9 w5): the union of LCS hits is w1 w2 w3 w5
        ref = [["w1", "w2", "w3", "w4", "w5"]]
        cand = [["w1", "w2", "w6", "w7", "w8"], ["w1", "w3", "w8", "w9", "w5"]]
        s = rouge_l(cand, ref, RougeConfig(rouge_l_mode="union"))
        assert s.recall == pytest.approx(4 / 5)
        assert s.precision == pytest.approx(4 / 10)

    def test_union_single_sentences_equals_sequence(self):
        a, b = toks("the cat sat on the mat"), toks("a cat sat on a mat")
        union = rouge_l([a], [b], RougeConfig(rouge_l_mode="union"))
        assert union.f1 == pytest.approx(rouge_l(a, b).f1)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            RougeConfig(rouge_l_mode="summary")

    def test_lcs_matches_dp_on_random_inputs(self):
        rng = random.Random(7)
        for _ in range(300):
            a = [rng.choice("abcdef") for _ in range(rng.randint(0, 30))]
            b = [rng.choice("abcdef") for _ in range(rng.randint(0, 30))]
            assert lcs_length(a, b) == full_dp_lcs(a, b)

    def test_lcs_beyond_machine_word(self):
        a = list("ab" * 60)
        b = list("ba" * 70)
        assert lcs_length(a, b) == full_dp_lcs(a, b)


class TestScoreAll:
    def test_example_row(self):
        scores = score_all("the cat sat", "the cat ate")
        assert scores["rouge-1"].f1 == pytest.approx(2 / 3)
        assert scores["rouge-2"].f1 == pytest.approx(0.5)
        assert scores["rouge-l"].f1 == pytest.approx(2 / 3)

    def test_empty_candidate(self):
        scores = score_all("", "anything at all")
        assert all(s.precision == s.recall == s.f1 == 0.0 for s in scores.values())

    def test_union_mode_uses_sentences(self):
        cfg = RougeConfig(rouge_l_mode="union")
        scores = score_all("W1 w2 w6 w7 w8. W1 w3 w8 w9 w5.", "W1 w2 w3 w4 w5.", cfg)
        assert scores["rouge-l"].recall == pytest.approx(4 / 5)


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(seqs, seqs, st.integers(1, 3))
    def test_matches_naive_oracle(self, a, b, n):
        s = rouge_n(a, b, n)
        assert (s.precision, s.recall, s.f1) == pytest.approx(naive_rouge_n(a, b, n), abs=1e-12)
        l = rouge_l(a, b)
        assert (l.precision, l.recall, l.f1) == pytest.approx(naive_rouge_l(a, b), abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(seqs, seqs)
    def test_swap_symmetry(self, a, b):
        for n in (1, 2):
            x, y = rouge_n(a, b, n), rouge_n(b, a, n)
            assert x.precision == y.recall and x.recall == y.precision
            assert x.f1 == pytest.approx(y.f1, abs=1e-15)
        x, y = rouge_l(a, b), rouge_l(b, a)
        assert x.f1 == pytest.approx(y.f1, abs=1e-15)

    @settings(max_examples=200, deadline=None)
    @given(seqs, seqs)
    def test_bounds(self, a, b):
        for s in (rouge_n(a, b, 1), rouge_n(a, b, 2), rouge_l(a, b)):
            assert 0.0 <= s.precision <= 1.0 and 0.0 <= s.recall <= 1.0 and 0.0 <= s.f1 <= 1.0
            assert s.f1 <= max(s.precision, s.recall) + 1e-15
            if s.precision == 0 or s.recall == 0:
                assert s.f1 == 0.0

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=12), st.integers(1, 3))
    def test_self_score_is_one(self, a, n):
        if len(a) >= n:
            assert rouge_n(a, a, n).f1 == 1.0

    @settings(max_examples=200, deadline=None)
    @given(seqs, seqs)
    def test_lcs_bounded_by_unigram_overlap(self, a, b):
        lcs = lcs_length(a, b)
        assert lcs <= min(len(a), len(b))
        overlap = round(rouge_n(a, b, 1).precision * len(a)) if a else 0
        assert lcs <= overlap

    def test_config_determinism(self):
        cfg = RougeConfig(stemming=True)
        assert score_all("Models were running fast", "The model runs", cfg) == \
            score_all("Models were running fast", "The model runs", cfg)
