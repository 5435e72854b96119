from fractions import Fraction

import mpmath
import pytest

from dlab.bounds import BoundUnavailable, ExpressionBound, SequenceBounds, TableBound, bound_from_json
from dlab.errors import InvalidSpec


def test_exact_expression():
    b = SequenceBounds.parse("2**n", "3*n + 1/2", "Q(n) / 4")
    assert b.value("Q", 5, 64).lower == 32
    assert b.value("A", 2, 64).lower == Fraction(13, 2)
    assert b.value("B", 5, 64).lower == 8


def test_decimal_literal_is_exact():
    b = SequenceBounds.parse("0.1 * n", "1", "1")
    assert b.value("Q", 3, 64).is_exact
    assert b.value("Q", 3, 64).lower == Fraction(3, 10)


def test_transcendental_expression_encloses_mpmath():
    mpmath.mp.prec = 300
    b = SequenceBounds.parse({"1": "3", "2": "7"}, "exp(0.5 * sigma(n + 1))", "1", sigma="log(Q(n))")
    iv = b.value("A", 1, 200)
    ref = mpmath.sqrt(7)
    lo = mpmath.mpf(iv.lower.numerator) / iv.lower.denominator
    hi = mpmath.mpf(iv.upper.numerator) / iv.upper.denominator
    assert lo <= ref <= hi


def test_constants_as_names():
    iv = SequenceBounds.parse("pi * n", "1", "1").value("Q", 2, 64)
    assert Fraction("6.2831853071") < iv.lower <= iv.upper < Fraction("6.2831853072")


def test_table_out_of_range():
    b = SequenceBounds.parse({"1": "2"}, "1", "1")
    with pytest.raises(BoundUnavailable):
        b.value("Q", 5, 64)
    assert b.has("Q", 1) and not b.has("Q", 5)


def test_missing_sigma():
    with pytest.raises(BoundUnavailable):
        SequenceBounds.parse("1", "1", "1").value("sigma", 1, 64)


def test_non_positive_bound_rejected():
    with pytest.raises(InvalidSpec):
        SequenceBounds.parse("n - 3", "1", "1").value("Q", 1, 64)


@pytest.mark.parametrize("text", ["__import__('os')", "n.real", "lambda: 1", "open('x')", "[1, 2]"])
def test_unsafe_expressions_rejected(text):
    with pytest.raises(InvalidSpec):
        ExpressionBound(text)


def test_self_reference_is_caught():
    with pytest.raises(InvalidSpec):
        SequenceBounds.parse("Q(n)", "1", "1").value("Q", 1, 64)


def test_json_round_trip():
    b = SequenceBounds.parse({"1": "2", "2": "5/2"}, "exp(n)", "2", sigma="log(Q(n))", metadata={"c1": "1/3"})
    again = SequenceBounds.from_json(b.to_json())
    assert again.to_json() == b.to_json()
    assert isinstance(bound_from_json({"1": "2"}), TableBound)
    assert isinstance(bound_from_json(3), ExpressionBound)


def test_from_json_missing_field():
    with pytest.raises(InvalidSpec):
        SequenceBounds.from_json({"Q": "1", "A": "1"})
