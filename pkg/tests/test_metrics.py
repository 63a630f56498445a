from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import given
from hypothesis import strategies as st

from maple.metrics import accuracy, extract_choice, lcs_length, rouge_l

token_lists = st.lists(
    st.sampled_from(["the", "cat", "sat", "mat", "dog", "ran"]), min_size=0, max_size=12
)


def lcs_recursive(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    """Independent oracle: memoized head/tail recursion, no DP table."""

    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))

    return go(0, 0)


class TestExtractChoice:
    @pytest.mark.parametrize(
        "response,expected",
        [
            ("(B)", "B"),
            ("The answer is (C) because of the dates.", "C"),
            ("I cannot decide.", None),
            ("(A) but maybe (B)", "A"),
            ("Answer: B.", "B"),
            ("maybe D", "D"),
            ("H is not a valid fallback option", None),
            ("lowercase (a) does not count, but (Z) does", "Z"),
            ("", None),
        ],
    )
    def test_extraction(self, response, expected):
        assert extract_choice(response) == expected

    def test_parenthesized_beats_standalone(self):
        assert extract_choice("A careful reader picks (C)") == "C"


class TestAccuracy:
    def test_all_match(self):
        assert accuracy(["a", "b", "c", "d"], ["a", "b", "c", "d"]).value == 1.0

    def test_half_match(self):
        metric = accuracy(["a", "x", "c", "y"], ["a", "b", "c", "d"])
        assert metric.value == 0.5
        assert metric.n == 4

    def test_all_none_scores_zero(self):
        assert accuracy([None, None], ["a", "b"]).value == 0.0

    def test_normalization(self):
        assert accuracy(["  Mixed   Case "], ["mixed case"]).value == 1.0

    def test_errors(self):
        with pytest.raises(ValueError, match="length"):
            accuracy(["a"], ["a", "b"])
        with pytest.raises(ValueError, match="nothing"):
            accuracy([], [])

    @given(st.lists(st.tuples(st.text(max_size=5), st.text(max_size=5)), min_size=1, max_size=20),
           st.randoms(use_true_random=False))
    def test_permutation_equivariance(self, pairs, rnd):
        preds = [p for p, _ in pairs]
        golds = [g for _, g in pairs]
        baseline = accuracy(preds, golds).value
        shuffled = pairs[:]
        rnd.shuffle(shuffled)
        assert accuracy([p for p, _ in shuffled], [g for _, g in shuffled]).value == baseline


class TestRougeL:
    def test_identical_nonempty_strings(self):
        assert rouge_l("the cat sat", "the cat sat") == 1.0

    def test_disjoint_strings(self):
        assert rouge_l("aa bb cc", "dd ee ff") == 0.0

    def test_worked_example(self):
        # LCS("the cat sat on the mat", "the cat ate the mat") = 4
        # P = 4/6, R = 4/5, F = 8/11
        value = rouge_l("the cat sat on the mat", "the cat ate the mat")
        assert value == pytest.approx(8.0 / 11.0, abs=1e-12)

    def test_empty_inputs(self):
        assert rouge_l("", "") == 0.0
        assert rouge_l("words here", "") == 0.0
        assert rouge_l("", "words here") == 0.0

    def test_case_insensitive_tokens(self):
        assert rouge_l("The Cat", "the cat") == 1.0

    @given(a=token_lists, b=token_lists)
    def test_symmetry_and_range(self, a, b):
        left = rouge_l(" ".join(a), " ".join(b))
        right = rouge_l(" ".join(b), " ".join(a))
        assert left == right
        assert 0.0 <= left <= 1.0

    @given(a=token_lists, b=token_lists)
    def test_lcs_matches_recursive_oracle(self, a, b):
        assert lcs_length(a, b) == lcs_recursive(tuple(a), tuple(b))

    @given(a=token_lists.filter(bool))
    def test_self_similarity_is_one(self, a):
        assert rouge_l(" ".join(a), " ".join(a)) == 1.0

    @given(a=token_lists, b=token_lists)
    def test_f_score_from_exact_lcs(self, a, b):
        # recompute F from the oracle LCS with exact rational arithmetic
        value = rouge_l(" ".join(a), " ".join(b))
        lcs = lcs_recursive(tuple(a), tuple(b))
        if not a or not b or lcs == 0:
            assert value == 0.0
        else:
            precision = Fraction(lcs, len(a))
            recall = Fraction(lcs, len(b))
            expected = 2 * precision * recall / (precision + recall)
            assert value == pytest.approx(float(expected), abs=1e-12)
