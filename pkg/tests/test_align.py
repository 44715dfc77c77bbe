from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alignvar import (
    AlignmentPairs,
    BinarySequence,
    InvalidAlignmentError,
    ScoringScheme,
    matched_ones_alignment,
    min_matched_ones_among_optimal,
    optimal_score,
    optimal_traceback,
    score_of_alignment,
)
from alignvar.align import alignment_columns, matched_ones
from alignvar.oracles import brute_force_optimal, lcs_length, naive_score
from alignvar.scoring import to_fraction

from strategies import words

SCHEMES = [ScoringScheme(s11=1), ScoringScheme(s11=2), ScoringScheme(s11=50)]


# -- sequences and scoring -------------------------------------------------------


def test_sequence_validation():
    with pytest.raises(ValueError):
        BinarySequence("012")
    with pytest.raises(TypeError):
        BinarySequence(101)
    assert str(BinarySequence("")) == "ε"
    assert BinarySequence.from_bits([1, 0, 1]).symbols == "101"
    with pytest.raises(ValueError):
        BinarySequence.from_bits([2])


def test_sequence_array_is_readonly():
    arr = BinarySequence("1001").array
    assert arr.tolist() == [1, 0, 0, 1]
    with pytest.raises(ValueError):
        arr[0] = 0


def test_to_fraction_uses_decimal_repr():
    assert to_fraction(0.4) == Fraction(2, 5)
    assert to_fraction("3/7") == Fraction(3, 7)


def test_scheme_scaling_roundtrip():
    sc = ScoringScheme(s11=Fraction(7, 3), s00=Fraction(1, 2), q=Fraction(-1, 4))
    assert sc.scale == 12
    assert sc.int_table.tolist() == [[6, 0], [0, 28]]
    assert sc.int_gap == -3
    assert sc.unscale(28) == Fraction(7, 3)
    assert ScoringScheme.lcs().s(1, 1) == 1


# -- optimal score -----------------------------------------------------------------


def test_empty_words():
    assert optimal_score("", "1") == 0
    assert optimal_score("", "") == 0
    score, optima = brute_force_optimal("", "1")
    assert score == 0 and optima == [()]


def test_two_letter_example_has_two_optima():
    score, optima = brute_force_optimal("10", "01", ScoringScheme(s11=1))
    assert score == 1 and len(optima) == 2
    assert optimal_score("10", "01", ScoringScheme(s11=1)) == 1


@given(words(), words(), st.sampled_from(SCHEMES))
def test_dp_matches_brute_force(x, y, sc):
    assert optimal_score(x, y, sc) == brute_force_optimal(x, y, sc)[0]


@given(words(max_size=12), words(max_size=12))
def test_identity_scores_give_lcs(x, y):
    assert optimal_score(x, y, ScoringScheme.lcs()) == lcs_length(x, y)


@given(words(max_size=7), words(max_size=7),
       st.fractions(min_value=-2, max_value=3, max_denominator=5),
       st.fractions(min_value=-1, max_value=0, max_denominator=4))
def test_general_rational_scheme(x, y, s11, q):
    sc = ScoringScheme(s11=s11, s01=Fraction(-1, 3), q=q)
    assert optimal_score(x, y, sc) == naive_score(x, y, sc) == brute_force_optimal(x, y, sc)[0]


def test_large_scores_fall_back_to_python_ints():
    sc = ScoringScheme(s11=2**61)
    x, y = "1011", "0111"
    assert optimal_score(x, y, sc) == 3 * 2**61


# -- traceback -----------------------------------------------------------------------


@given(words(max_size=9), words(max_size=9), st.sampled_from(SCHEMES))
def test_traceback_is_optimal(x, y, sc):
    a = optimal_traceback(x, y, sc)
    a.check_bounds(len(x), len(y))
    assert score_of_alignment(x, y, a, sc) == optimal_score(x, y, sc)
    assert a.pairs in brute_force_optimal(x, y, sc)[1]


def test_traceback_tie_policy_prefers_diagonal_then_gap_in_x():
    # from (2,2) the diagonal (0 vs 1) loses, the gap in x keeps the score,
    # then (2,1) takes the 0-0 diagonal
    a = optimal_traceback("10", "01", ScoringScheme(s11=1))
    assert a.pairs == ((2, 1),)


def test_score_of_alignment_counts_gaps():
    sc = ScoringScheme(s11=3, q=Fraction(-1, 2))
    assert score_of_alignment("101", "11", [(1, 1), (3, 2)], sc) == 6 - Fraction(1, 2)


def test_alignment_pairs_validation():
    with pytest.raises(InvalidAlignmentError):
        AlignmentPairs(((1, 1), (1, 2)))
    with pytest.raises(InvalidAlignmentError):
        AlignmentPairs(((2, 2), (3, 1)))
    with pytest.raises(InvalidAlignmentError):
        score_of_alignment("1", "1", [(2, 1)], ScoringScheme())


# -- matched ones -----------------------------------------------------------------------


@given(words(max_size=9), words(max_size=9), st.sampled_from(SCHEMES))
def test_min_matched_ones_against_brute_force(x, y, sc):
    _, optima = brute_force_optimal(x, y, sc)
    expected = min(sum(1 for i, j in a if x[i - 1] == y[j - 1] == "1") for a in optima)
    assert min_matched_ones_among_optimal(x, y, sc) == expected


def test_matched_ones_alignment_section_two_example():
    x, y = "1011000001", "10010101"
    a = matched_ones_alignment(x, y)
    # match all ones, then as many zeros as both sides offer in each gap
    assert len(matched_ones(a, BinarySequence(x), BinarySequence(y))) == 4
    assert score_of_alignment(x, y, a, ScoringScheme(s11=1)) == 6
    top, bottom = alignment_columns(x, y, a.pairs)
    assert top.replace("_", "") == x and bottom.replace("_", "") == y


@given(words(max_size=10), words(max_size=10))
def test_matched_ones_alignment_is_valid(x, y):
    a = matched_ones_alignment(x, y)
    a.check_bounds(len(x), len(y))
    ones = min(x.count("1"), y.count("1"))
    assert len(matched_ones(a, BinarySequence(x), BinarySequence(y))) == ones
    assert all(x[i - 1] == y[j - 1] for i, j in a)


def test_dp_agrees_on_long_random_words():
    rng = np.random.default_rng(5)
    for _ in range(5):
        x = "".join(rng.choice(["0", "1"], 60))
        y = "".join(rng.choice(["0", "1"], 55))
        assert optimal_score(x, y, ScoringScheme(s11=7)) == naive_score(x, y, ScoringScheme(s11=7))
