import itertools
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlab.bounds import SequenceBounds
from dlab.errors import ChainStepFailed, InvalidSpec, NoPivot, SearchBudgetExceeded, VanishingForm
from dlab.forms import EvaluationPoint, FormSequence, LinearForm
from dlab.generators import build_sequence
from dlab.minkowski import (
    Membership,
    body_from_value,
    box_size,
    build_body,
    canonical,
    exhaustive_search,
    find_lattice_point,
    pivot_index,
    proof_chain_check,
    replay,
)
from dlab.numerics import RealInterval, Verdict

SQRT2 = EvaluationPoint.of("1", "sqrt2")


def sqrt2_convergents(count):
    p, q, out = 1, 1, []
    for _ in range(count):
        out.append((q, p))
        p, q = p + 2 * q, p + q
    return out


def test_body_halfwidths():
    body = body_from_value(SQRT2, 1, Fraction(1, 100))
    assert body.x0_bound() == 50
    assert body.coord_halfwidth == RealInterval.exact(Fraction(1, 50))
    assert body.volume().contains(4)
    body2 = body_from_value(EvaluationPoint.of("1", "1/3", "1/5"), 2, Fraction(1, 2))
    assert body2.coord_halfwidth.contains(1) and body2.coord_halfwidth.width < Fraction(1, 2 ** 60)
    assert body2.volume().contains(8)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.fractions(min_value=Fraction(1, 10**6), max_value=Fraction(1, 2), max_denominator=10**6))
def test_volume_identity(r, L):
    pt = EvaluationPoint.parse(["1"] + ["1/3"] * r)
    assert body_from_value(pt, r, L).volume().contains(2 ** (r + 1))


def test_sqrt2_point_matches_convergents():
    # oracle: best approximations of sqrt2 are its convergent denominators
    body = body_from_value(SQRT2, 1, Fraction(1, 100))
    a = find_lattice_point(body, "rounding")
    e = find_lattice_point(body, "exhaustive")
    assert a.x == e.x == (29, 41)
    assert (29, 41) in sqrt2_convergents(8)
    mpmath.mp.prec = 100
    assert abs(29 * mpmath.sqrt(2) - 41) <= 0.02


def test_sqrt2_small_body():
    body = body_from_value(SQRT2, 1, Fraction(2, 5))
    assert body.x0_bound() == 1
    assert find_lattice_point(body).x == find_lattice_point(body, "exhaustive").x == (1, 1)


def test_zero_x0_admissible_when_w_at_least_one():
    pt = EvaluationPoint.of("1", "1/3", "1/5")
    body = body_from_value(pt, 2, Fraction(1, 2))
    x = find_lattice_point(body).x
    assert x[0] == 0 and body.contains_exact(x)


def test_large_r1_body_uses_convergents():
    # |x0| up to 5 * 10^11: a linear scan would be hopeless
    body = body_from_value(SQRT2, 1, Fraction(1, 10**12))
    pt = find_lattice_point(body)
    assert pt.x in sqrt2_convergents(40)
    assert body.membership(pt.x) is Membership.INSIDE


def test_exhaustive_budget():
    body = body_from_value(SQRT2, 1, Fraction(1, 10**6))
    assert box_size(body) > 10**4
    with pytest.raises(SearchBudgetExceeded):
        exhaustive_search(body, 10**4)


def test_canonical_representative():
    assert canonical((-3, 1, 2)) == (3, -1, -2)
    assert canonical((0, -1, 5)) == (0, 1, -5)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 2),
       st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=7), min_size=2, max_size=2),
       st.fractions(min_value=Fraction(1, 300), max_value=Fraction(1, 2), max_denominator=300))
def test_rounding_matches_exhaustive(r, xs, L):
    pt = EvaluationPoint.parse([Fraction(1)] + xs[:r])
    body = body_from_value(pt, r, L)
    if box_size(body) > 10**5:
        return
    a, e = find_lattice_point(body), exhaustive_search(body)
    assert a.x == e.x
    assert body.contains_exact(a.x) and any(a.x)
    # brute-force minimality over the box
    X = body.x0_bound()
    Ms = [body.coordinate_bound(i) for i in range(1, r + 1)]
    inside = [canonical(x) for x in itertools.product(range(-X, X + 1), *[range(-M, M + 1) for M in Ms])
              if any(x) and body.contains_exact(x)]
    assert min(inside) == a.x


def test_irrational_membership_is_certified():
    body = body_from_value(EvaluationPoint.of("1", "pi", "e"), 2, Fraction(1, 1000))
    pt = find_lattice_point(body)
    assert pt.membership is Membership.INSIDE and pt.certified


def test_build_body_rejects_vanishing_form():
    seq = build_sequence("adversarial_rational", 1, 8)
    with pytest.raises(VanishingForm):
        build_body(seq, None, 6)


def test_pivot_examples():
    seq = build_sequence("synthetic_geometric", 1, 10)
    # |L_j| = 2^-j, |x0| = 8: need 2^-j <= 1/16, first at j = 4
    rec = pivot_index(8, seq, None, 10)
    assert rec.k == 4 and rec.lower_witness
    assert rec.checks[3] is Verdict.FAILS
    first = pivot_index(1, seq, None, 10, start=1)
    assert first.k == 1 and not first.lower_witness
    with pytest.raises(NoPivot):
        pivot_index(2 ** 12, seq, None, 10)
    with pytest.raises(InvalidSpec):
        pivot_index(0, seq, None, 10)


def test_pivot_with_irrational_values():
    forms = {n: LinearForm((-y, x), n) for n, (x, y) in enumerate(sqrt2_convergents(12), start=1)}
    seq = FormSequence(forms, SQRT2)
    rec = pivot_index(29, seq, None, 12)
    mpmath.mp.prec = 100
    # k = least j with |x_j sqrt2 - y_j| <= 1/58
    expected = next(j for j, (x, y) in enumerate(sqrt2_convergents(12), start=1)
                    if abs(x * mpmath.sqrt(2) - y) <= mpmath.mpf(1) / 58)
    assert rec.k == expected


def test_half_integer_remark():
    # integer 1 = x + y with |x| = 3/10 <= 1/2 forces |y| = 7/10 >= |x|
    x = Fraction(3, 10)
    y = 1 - x
    assert abs(x) <= Fraction(1, 2) and abs(y) >= abs(x)


@pytest.mark.parametrize("n", [5, 11, 30])
def test_synthetic_chain_replay(n):
    seq = build_sequence("synthetic_geometric", 5, 30)
    rp = replay(seq, n, 256, precision_cap=4096)
    assert rp.chain.verdict is Verdict.HOLDS
    assert rp.chain.zero_integer and rp.pivot.k == 1
    rp.chain.raise_if_failed()


def test_apery_chain_at_60():
    seq = build_sequence("apery_zeta3", 50, 60, precision_bits=2048, estimate_from=20)
    rp = replay(seq, 60, 2048, precision_cap=8192)
    assert all(v is Verdict.HOLDS for v in rp.chain.steps.values()), rp.chain.steps
    assert rp.point.x0 != 0 and rp.pivot.lower_witness
    assert rp.pivot.k <= 60


def test_chain_failure_is_reported():
    seq = build_sequence("synthetic_geometric", 5, 12)
    # bounds that make A_n too large for the concluding inequality
    seq.bounds = SequenceBounds.parse("2**n", "8**n", "2")
    body = build_body(seq, None, 10)
    pt = find_lattice_point(body)
    piv = pivot_index(pt.x0, seq, None, 10)
    report = proof_chain_check(body, pt, piv, seq.bounds)
    assert report.verdict is Verdict.FAILS
    with pytest.raises(ChainStepFailed) as err:
        report.raise_if_failed()
    assert err.value.step == report.first_failure
