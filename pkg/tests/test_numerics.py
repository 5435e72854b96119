from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlab.errors import IndeterminateSign, UnknownConstant
from dlab.numerics import (
    RealInterval,
    Sign,
    Verdict,
    certified_compare,
    certified_sign,
    constant_ids,
    enclose_constant,
    rational_constant,
    register_rational,
)

fractions = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)
positive = st.fractions(min_value=Fraction(1, 10**4), max_value=10**4, max_denominator=10**4)


def mp(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def encloses(iv: RealInterval, x) -> bool:
    return mp(iv.lower) <= x <= mp(iv.upper)


def test_exact_interval_basics():
    x = RealInterval.exact(Fraction(1, 3))
    assert x.is_exact and x.width == 0 and x.midpoint == Fraction(1, 3)
    assert (x * 3) == RealInterval.exact(1)
    assert (1 - x).lower == Fraction(2, 3)
    assert (2 / x).lower == 6
    assert (x ** 3).lower == Fraction(1, 27)


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        RealInterval(Fraction(2), Fraction(1))


def test_sign():
    assert RealInterval(Fraction(-1), Fraction(2)).sign() is None
    assert RealInterval.exact(0).sign() == 0
    assert RealInterval(Fraction(1, 10**9), Fraction(1)).sign() == 1


@pytest.mark.parametrize("cid", ["pi", "e", "log2", "sqrt2", "zeta2", "zeta3"])
@pytest.mark.parametrize("bits", [64, 300, 2000])
def test_constants_against_mpmath(cid, bits):
    mpmath.mp.prec = bits + 200
    ref = {"pi": mpmath.pi, "e": mpmath.e, "log2": mpmath.log(2), "sqrt2": mpmath.sqrt(2),
           "zeta2": mpmath.zeta(2), "zeta3": mpmath.zeta(3)}[cid]
    iv = enclose_constant(cid, bits)
    assert encloses(iv, +ref)
    assert iv.width <= Fraction(4, 2 ** bits)


def test_unknown_constant():
    with pytest.raises(UnknownConstant):
        enclose_constant("catalan", 64)


def test_registered_rational_constant_is_exact():
    register_rational("three_sevenths", "3/7")
    assert "three_sevenths" in constant_ids()
    assert rational_constant("three_sevenths") == Fraction(3, 7)
    assert enclose_constant("three_sevenths", 64).is_exact


@settings(max_examples=200, deadline=None)
@given(positive, st.sampled_from([32, 64, 200]))
def test_log_exp_enclose_mpmath(q, bits):
    mpmath.mp.prec = bits + 100
    x = RealInterval.exact(q)
    assert encloses(x.log(bits), mpmath.log(mp(q)))
    assert encloses(RealInterval.exact(q / 100).exp(bits), mpmath.exp(mp(q / 100)))


@settings(max_examples=200, deadline=None)
@given(positive, st.integers(2, 5), st.sampled_from([32, 64, 200]))
def test_root_encloses(q, r, bits):
    iv = RealInterval.exact(q).root(r, bits)
    assert iv.lower ** r <= q <= iv.upper ** r


@settings(max_examples=300, deadline=None)
@given(fractions, fractions, st.sampled_from([8, 30, 64]))
def test_rounded_arithmetic_contains_exact(a, b, bits):
    ia, ib = RealInterval.exact(a), RealInterval.exact(b)
    assert (ia + ib).rounded(bits).contains(a + b)
    assert (ia - ib).rounded(bits).contains(a - b)
    assert (ia * ib).rounded(bits).contains(a * b)
    if b != 0:
        assert (ia / ib).rounded(bits).contains(a / b)


@settings(max_examples=100, deadline=None)
@given(fractions, st.integers(8, 200))
def test_rounding_is_monotone_refinement(a, bits):
    coarse = RealInterval.exact(a).rounded(bits)
    fine = RealInterval.exact(a).rounded(2 * bits)
    assert coarse.contains(fine)


@pytest.mark.parametrize("cid", ["pi", "zeta3", "log2"])
def test_constant_refinement_nests(cid):
    chain = [enclose_constant(cid, p) for p in (64, 128, 512, 2048)]
    assert all(a.contains(b) for a, b in zip(chain, chain[1:]))


def test_certified_sign_escalates():
    # 355/113 exceeds pi by about 2.7e-7: needs more than a handful of bits
    diff = lambda p: enclose_constant("pi", p) - Fraction(355, 113)  # noqa: E731
    assert certified_sign(diff, 1 << 12, precision=8) is Sign.NEGATIVE


def test_certified_sign_of_exact_zero():
    assert certified_sign(RealInterval.exact(0)) is Sign.ZERO


def test_certified_sign_indeterminate_at_cap():
    same = lambda p: enclose_constant("zeta3", p) - enclose_constant("zeta3", p)  # noqa: E731
    with pytest.raises(IndeterminateSign) as err:
        certified_sign(same, 256)
    assert err.value.precision == 256


def test_certified_compare_verdicts():
    pi = lambda p: enclose_constant("pi", p)  # noqa: E731
    assert certified_compare(pi, "<=", Fraction(22, 7)) is Verdict.HOLDS
    assert certified_compare(pi, ">", Fraction(22, 7)) is Verdict.FAILS
    assert certified_compare(pi, "<", pi, precision_cap=256) is Verdict.INDETERMINATE
    with pytest.raises(ValueError):
        certified_compare(pi, "==", 3)


def test_verdict_combine():
    assert Verdict.combine([Verdict.HOLDS, Verdict.HOLDS]) is Verdict.HOLDS
    assert Verdict.combine([Verdict.HOLDS, Verdict.INDETERMINATE]) is Verdict.INDETERMINATE
    assert Verdict.combine([Verdict.INDETERMINATE, Verdict.FAILS]) is Verdict.FAILS
