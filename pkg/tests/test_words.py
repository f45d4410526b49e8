from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from plagrange.exact import INF, Surd, compare
from plagrange.words import (
    ContinuedFraction,
    EmptyCF,
    EmptyPeriod,
    Unrelated,
    canonical_rotation,
    cf_value,
    classify_symmetry,
    cut_quality_periodic,
    eventually_periodic_value,
    lambda_periodic,
    lambda_periodic_sq,
    lr_of_cf,
    lr_to_runs,
    parse_cf,
    period_matrix,
    periodic_value,
    run_lengths,
    runs_to_lr,
    surd_cf,
    underline_lambda,
    underline_lambda_float,
    underline_lambda_runs,
    word_power_lambda,
)

words = st.text(alphabet="LR", max_size=40)
nonempty_words = st.text(alphabet="LR", min_size=1, max_size=40)
periods = st.lists(st.integers(1, 4), min_size=1, max_size=8)


def sqrt_q(n, d=1):
    return Surd.sqrt_of(Fraction(n, d))


def tail(terms):
    """``[0, t0, t1, ...]`` in floating point."""
    x = 0.0
    for a in reversed(terms):
        x = 1.0 / (a + x)
    return x


def float_cut_quality(period, i, n_terms=2000):
    """``b_i`` plus both periodic tails, truncated far out."""
    ell = len(period)
    fwd = [period[(i + j) % ell] for j in range(n_terms)]
    back = [period[(i - 2 - j) % ell] for j in range(n_terms)]
    return period[i - 1] + tail(fwd) + tail(back)


# LR words ---------------------------------------------------------------------

def test_runs_examples():
    assert lr_to_runs("RRLR") == [("R", 2), ("L", 1), ("R", 1)]
    assert lr_to_runs("") == []
    assert runs_to_lr([("L", 3), ("R", 2)]) == "LLLRR"


@given(words)
def test_runs_round_trip(w):
    runs = lr_to_runs(w)
    assert runs_to_lr(runs) == w
    assert all(n >= 1 for _, n in runs)
    assert all(a[0] != b[0] for a, b in zip(runs, runs[1:]))


# continued fractions ------------------------------------------------------------

def test_cf_value_examples():
    assert cf_value([1, 1, 1]) == Fraction(3, 2)
    assert cf_value([0, 2]) == Fraction(1, 2)
    assert cf_value([2, 1, 2]) == Fraction(8, 3)
    with pytest.raises(EmptyCF):
        cf_value([])


def test_period_matrix_examples():
    assert period_matrix([2]) == (2, 1, 1, 0)
    assert period_matrix([2, 1]) == (3, 2, 1, 1)
    assert period_matrix([2, 2, 1, 1]) == (12, 7, 5, 3)
    with pytest.raises(EmptyPeriod):
        period_matrix([])


@given(periods)
def test_period_matrix_determinant(period):
    a, b, c, d = period_matrix(period)
    assert a * d - b * c == (-1) ** len(period)


def test_periodic_value_examples():
    assert periodic_value([2]) == Surd(1, 1, 2)
    assert periodic_value([1]) == Surd(1, 1, 5, 2)
    x = periodic_value([2, 1])
    assert x == Surd(1, 1, 3)
    assert x == 2 + 1 / (1 + 1 / x)


def test_eventually_periodic_examples():
    assert eventually_periodic_value([], [2]) == Surd(1, 1, 2)
    assert eventually_periodic_value([1], [2]) == Surd(0, 1, 2)
    assert eventually_periodic_value([0], [1]) == Surd(-1, 1, 5, 2)
    assert ContinuedFraction((1,), (2,)).value() == Surd(0, 1, 2)


@given(st.lists(st.integers(1, 5), max_size=4), periods, st.integers(0, 3))
def test_surd_cf_round_trip(pre, period, a0):
    pre = [a0] + pre
    x = eventually_periodic_value(pre, period)
    cf = surd_cf(x)
    assert eventually_periodic_value(cf.terms, cf.period) == x
    assert lambda_periodic(cf.period) == lambda_periodic(period)


# cut qualities ----------------------------------------------------------------------

def test_cut_quality_examples():
    assert cut_quality_periodic([2], 1) == 2 * sqrt_q(2)
    assert cut_quality_periodic([2, 1], 1) == 2 * sqrt_q(3)
    assert cut_quality_periodic([2, 1], 2) == sqrt_q(3)
    with pytest.raises(IndexError):
        cut_quality_periodic([2, 1], 3)


def test_lambda_periodic_examples():
    assert lambda_periodic([1]) == sqrt_q(5)
    assert lambda_periodic([2, 2, 1, 1]) == sqrt_q(221, 25)
    assert lambda_periodic([3, 3, 2, 1, 1, 1, 1, 2]) == sqrt_q(7157, 529)


@settings(max_examples=100)
@given(periods, st.data())
def test_cut_quality_matches_tail_sum(period, data):
    i = data.draw(st.integers(1, len(period)))
    assert abs(float(cut_quality_periodic(period, i)) - float_cut_quality(period, i)) < 1e-9


@given(periods)
def test_cut_quality_shares_discriminant(period):
    from plagrange.words import _discriminant

    discs = set()
    for i in range(len(period)):
        rot = period[i:] + period[:i]
        discs.add(_discriminant(*period_matrix(rot)))
    assert len(discs) == 1


@given(periods)
def test_lambda_periodic_is_max_of_cuts(period):
    cuts = [cut_quality_periodic(period, i) for i in range(1, len(period) + 1)]
    lam = lambda_periodic(period)
    assert lam == max(cuts)
    assert lam * lam == lambda_periodic_sq(period)


@settings(max_examples=1000)
@given(periods, st.integers(0, 7))
def test_lambda_periodic_rotation_reversal(period, r):
    r %= len(period)
    lam = lambda_periodic(period)
    assert lambda_periodic(period[r:] + period[:r]) == lam
    assert lambda_periodic(period[::-1]) == lam
    assert lambda_periodic(period * 2) == lam


def test_word_power_lambda_examples():
    assert word_power_lambda("LR") == sqrt_q(5)
    assert word_power_lambda("L") is INF
    assert word_power_lambda("LRL") == 2 * sqrt_q(3)
    assert word_power_lambda("LRL") == lambda_periodic([1, 2])


# lower bound for finite words ---------------------------------------------------------

def test_underline_lambda_examples():
    # runs (1, 1): the only cut is i = 1 and both even-length tails are empty
    assert underline_lambda("RL") == 1
    assert underline_lambda("LLLLL") == 0
    assert underline_lambda("") == 0
    # runs (1, 1, 1): i = 1 gives 1; i = 2 gives 1 + [0, 1, 1] = 3/2
    assert underline_lambda("RLR") == Fraction(3, 2)


def test_underline_lambda_cut_first():
    assert underline_lambda("LLLLL", cut_first=True) == 5
    assert underline_lambda("RL", cut_first=True) == 1
    # a0 = 3 with forward tail [0, 1, 1] of even length
    assert underline_lambda_runs([3, 1, 1], cut_first=True) == Fraction(7, 2)


def test_underline_lambda_hand_value():
    # runs (1, 2, 3, 1, 2): cut i = 2 has term 3, back [0, 2, 1] = 1/3, forward [0, 1, 2] = 2/3
    a = [1, 2, 3, 1, 2]
    assert underline_lambda(lr_of_cf(a)) == Fraction(3) + Fraction(1, 3) + Fraction(2, 3)


@settings(max_examples=2000)
@given(words, nonempty_words, nonempty_words, st.booleans())
def test_underline_lambda_monotone(w, x, y, cut_first):
    assert underline_lambda(x + w + y, cut_first) >= underline_lambda(w, cut_first)


@settings(max_examples=2000)
@given(nonempty_words, st.booleans())
def test_underline_lambda_below_periodic(w, cut_first):
    assume("L" in w and "R" in w)
    lam = word_power_lambda(w)
    assert compare(Surd.from_rational(underline_lambda(w, cut_first)), lam) <= 0


@settings(max_examples=1000)
@given(st.lists(st.integers(1, 30), max_size=25), st.booleans())
def test_float_bound_matches_exact(a, cut_first):
    exact = underline_lambda_runs(a, cut_first)
    assert abs(underline_lambda_float(a, cut_first) - float(exact)) < 1e-9 * (1 + float(exact))


# symmetry and text ------------------------------------------------------------------------

def test_classify_symmetry_examples():
    assert classify_symmetry([2, 1], [1, 2]) == "S"
    p163 = [2, 2, 1, 2, 1, 2, 1, 1]
    assert classify_symmetry(p163, [1, 1, 2, 1, 2, 1, 2, 2][3:] + [1, 1, 2, 1, 2, 1, 2, 2][:3]) == "R"
    p1493 = [2, 2, 1, 2, 1, 1, 1, 2, 1, 1]
    assert classify_symmetry(p1493, p1493[4:] + p1493[:4]) == "A"
    with pytest.raises(Unrelated):
        classify_symmetry([2, 1], [3])


def test_parse_cf():
    assert parse_cf("2211") == [2, 2, 1, 1]
    assert parse_cf("[3,3,2,1,1,1,1,2]") == [3, 3, 2, 1, 1, 1, 1, 2]
    assert parse_cf("221^{7}") == [2, 2] + [1] * 7
    assert parse_cf("1^82") == [1] * 8 + [2]
    assert parse_cf("221122 1^{12}") == [2, 2, 1, 1, 2, 2] + [1] * 12
    with pytest.raises(ValueError):
        parse_cf("2x1")


@given(periods)
def test_canonical_rotation_is_rotation_invariant(period):
    assert canonical_rotation(period) == canonical_rotation(period[1:] + period[:1])


@given(st.lists(st.integers(1, 6), min_size=1, max_size=10))
def test_lr_of_cf_runs(terms):
    assert run_lengths(lr_of_cf(terms)) == terms
