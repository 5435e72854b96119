import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlab.bounds import SequenceBounds
from dlab.errors import DimensionMismatch, InvalidSpec, UnknownConstant, ZeroForm
from dlab.forms import (
    Coordinate,
    EvaluationPoint,
    FormSequence,
    LinearForm,
    Status,
    evaluate_form,
    exact_value,
    form_length,
    verify_hypotheses_main,
)


def test_coordinate_parsing():
    assert Coordinate.parse("3/7") == Coordinate(Fraction(3, 7))
    assert Coordinate.parse("2*pi") == Coordinate(Fraction(2), (("pi", 1),))
    assert Coordinate.parse("-pi") == Coordinate(Fraction(-1), (("pi", 1),))
    assert Coordinate.parse("zeta3^2").powers == (("zeta3", 2),)
    assert Coordinate.parse("sqrt2^2") == Coordinate(Fraction(2))
    with pytest.raises(UnknownConstant):
        Coordinate.parse("catalan")
    with pytest.raises(InvalidSpec):
        Coordinate.parse("1/0")


def test_point_requires_leading_one():
    with pytest.raises(InvalidSpec):
        EvaluationPoint.of("2", "pi")
    pt = EvaluationPoint.of("1", "sqrt2", "1/3")
    assert pt.dimension == 2 and not pt.is_rational
    assert EvaluationPoint.parse(pt.to_json()) == pt


def test_pell_form_value_against_mpmath():
    mpmath.mp.prec = 400
    pt = EvaluationPoint.of("1", "sqrt2")
    iv = evaluate_form(LinearForm((-17, 12)), pt, 256)
    ref = 12 * mpmath.sqrt(2) - 17
    assert mpmath.mpf(iv.lower.numerator) / iv.lower.denominator <= ref
    assert ref <= mpmath.mpf(iv.upper.numerator) / iv.upper.denominator
    assert iv.width < Fraction(1, 2 ** 250)


def test_symbolic_cancellation_is_exact():
    # 2 * 1 + 0 * sqrt2 - 1 * (sqrt2)^2 = 0 exactly
    pt = EvaluationPoint.of("1", "sqrt2", "sqrt2^2")
    form = LinearForm((-2, 0, 1))
    assert exact_value(form, pt) == 0
    assert evaluate_form(form, pt, 64).is_exact
    pt2 = EvaluationPoint.of("1", "pi", "2*pi")
    assert exact_value(LinearForm((0, 2, -1)), pt2) == 0


def test_dimension_and_zero_errors():
    pt = EvaluationPoint.of("1", "pi")
    with pytest.raises(DimensionMismatch):
        evaluate_form(LinearForm((1, 2, 3)), pt, 64)
    with pytest.raises(ZeroForm):
        evaluate_form(LinearForm((0, 0)), pt, 64)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-10**6, 10**6), min_size=2, max_size=5),
       st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=100), min_size=4, max_size=4))
def test_rational_point_value_is_exact_dot_product(coeffs, xs):
    pt = EvaluationPoint.parse([Fraction(1)] + xs)
    form = LinearForm(tuple(coeffs))
    if form.is_zero:
        return
    expected = coeffs[0] + sum(c * x for c, x in zip(coeffs[1:], xs))
    assert exact_value(form, pt) == expected
    assert evaluate_form(form, pt, 32).contains(expected)


@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=8))
def test_form_length_is_l1_norm(coeffs):
    assert form_length(coeffs) == sum(abs(c) for c in coeffs)


def _pell_like():
    # x_n sqrt2 - y_n with the Pell convergents, |L_n| ~ (sqrt2 - 1)^n
    xs, ys = [1, 2], [1, 3]
    for _ in range(20):
        xs.append(2 * xs[-1] + xs[-2])
        ys.append(2 * ys[-1] + ys[-2])
    forms = {n: LinearForm((-ys[n], xs[n]), n) for n in range(1, 20)}
    bounds = SequenceBounds.parse("3 * 2.5**n", "2.3**n", "3")
    return FormSequence(forms, EvaluationPoint.of("1", "sqrt2"), bounds, name="pell")


def test_hypotheses_pass_on_pell_forms():
    seq = _pell_like()
    rep = verify_hypotheses_main(seq, n_range=(2, 19), precision_bits=128, precision_cap=4096)
    assert not rep.failed, rep.failures()
    assert all(rep.passes(n) for n in range(2, 20))
    assert rep.verdicts[2]["ratio"] is Status.PASS


def test_failures_below_n_min_are_warnings():
    seq = _pell_like()
    A = {str(n): str(Fraction(23, 10) ** n) for n in range(0, 21)}
    A["2"] = "1000"
    seq.bounds = SequenceBounds.parse("3 * 2.5**n", A, "3")
    full = verify_hypotheses_main(seq, n_range=(1, 19), precision_bits=128, precision_cap=4096)
    assert full.first_failure["smallness"] == 2
    late = verify_hypotheses_main(seq, n_range=(1, 19), precision_bits=128, n_min=3, precision_cap=4096)
    assert not late.failed
    assert any("smallness fails at n=2" in w for w in late.warnings)


def test_each_failure_names_its_index():
    forms = {n: LinearForm((1, 1), n) for n in range(1, 8)}
    forms[4] = LinearForm((0, 0), 4)
    bounds = SequenceBounds.parse({str(n): "2" if n != 6 else "1" for n in range(0, 8)}, "1/2", "1")
    seq = FormSequence(forms, EvaluationPoint.of("1", "1/3"), bounds)
    rep = verify_hypotheses_main(seq, n_range=(1, 7))
    assert rep.first_failure["nonzero"] == 4
    assert rep.first_failure["length"] == 6
    assert rep.first_failure["monotonicity"] == 6
    assert ("nonzero", 4) in rep.failures()


def test_rank_monotone_and_dimension():
    forms = {1: LinearForm((1, 1, 1), 1), 2: LinearForm((1, 1), 2), 3: LinearForm((1, 1, 1, 1), 3)}
    seq = FormSequence(forms, EvaluationPoint.of("1", "1/3", "1/5"), SequenceBounds.parse("10", "1", "1"))
    rep = verify_hypotheses_main(seq, n_range=(1, 3))
    assert rep.first_failure["rank_monotone"] == 2
    assert rep.first_failure["dimension"] == 3
    assert any("sup r_n" in w for w in rep.warnings)


def test_skipped_without_table_entries():
    forms = {n: LinearForm((1, 2), n) for n in range(1, 4)}
    seq = FormSequence(forms, EvaluationPoint.of("1", "1/3"), SequenceBounds.parse({"1": "5", "2": "5", "3": "5"},
                                                                                    "1/2", "1"))
    rep = verify_hypotheses_main(seq, n_range=(1, 3))
    assert rep.verdicts[1]["monotonicity"] is Status.SKIPPED
    assert rep.verdicts[1]["ratio"] is Status.SKIPPED


def test_missing_bounds_rejected():
    seq = FormSequence({1: LinearForm((1, 1))}, EvaluationPoint.of("1", "pi"))
    with pytest.raises(InvalidSpec):
        verify_hypotheses_main(seq, n_range=(1, 1))


def test_json_round_trip():
    seq = _pell_like()
    text = seq.dumps(1, 10)
    again = FormSequence.loads(text)
    assert again.point == seq.point
    assert [again.form(n).coefficients for n in range(1, 11)] == [seq.form(n).coefficients for n in range(1, 11)]
    assert json.loads(again.dumps()) == json.loads(text)


@pytest.mark.parametrize("doc", [
    "not json",
    "[]",
    json.dumps({"point": ["1", "pi"]}),
    json.dumps({"point": ["1", "nope"], "coefficients": {}}),
    json.dumps({"point": ["1", "pi"], "coefficients": {"1": ["1.5", "2"]}}),
    json.dumps({"point": ["1", "pi"], "coefficients": {"1": ["1", "2"]}, "r": {"1": 3}}),
])
def test_malformed_documents(doc):
    with pytest.raises(InvalidSpec):
        FormSequence.loads(doc)
