"""Integer linear forms, evaluation points and hypothesis verification.

A point coordinate is a rational multiple of a product of constant powers,
written ``"3/7"``, ``"sqrt2"``, ``"zeta3^2"`` or ``"2*pi"``. Evaluation groups
coordinates that share the same symbolic monomial and sums their
coefficients exactly, so cancellations such as ``X^2 - 2`` at ``sqrt2`` give
an exact zero instead of a tiny straddling interval.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .bounds import BoundUnavailable, SequenceBounds
from .errors import (
    DimensionMismatch,
    IndeterminateSign,
    InvalidSpec,
    UnknownConstant,
    ZeroForm,
)
from .numerics import (
    DEFAULT_PRECISION_CAP,
    RealInterval,
    Sign,
    Verdict,
    certified_compare,
    certified_sign,
    enclose_constant,
    rational_constant,
)

SCHEMA_VERSION = 1

Powers = tuple[tuple[str, int], ...]

_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:(?:\^|\*\*)(\d+))?$")


def _normalize(coefficient: Fraction, powers: dict[str, int]) -> tuple[Fraction, Powers]:
    out = {}
    for name, k in powers.items():
        if k == 0:
            continue
        value = rational_constant(name)
        if value is not None:
            coefficient *= value ** k
            continue
        if name == "sqrt2":
            coefficient *= 2 ** (k // 2)
            k %= 2
            if k == 0:
                continue
        out[name] = k
    return coefficient, tuple(sorted(out.items()))


@dataclass(frozen=True)
class Coordinate:
    """``coefficient * prod(constant ** power)`` with exact bookkeeping."""

    coefficient: Fraction
    powers: Powers = ()

    @classmethod
    def make(cls, coefficient, powers: Mapping[str, int] | None = None) -> "Coordinate":
        c, p = _normalize(Fraction(coefficient), dict(powers or {}))
        if c == 0:
            p = ()
        return cls(c, p)

    @classmethod
    def parse(cls, text: str | int | Fraction) -> "Coordinate":
        if isinstance(text, (int, Fraction)):
            return cls.make(text)
        coefficient = Fraction(1)
        powers: dict[str, int] = {}
        body = str(text).replace(" ", "")
        if not body:
            raise InvalidSpec("empty coordinate")
        sign = 1
        if body.startswith("-") and not re.match(r"^-[\d.]", body):
            sign, body = -1, body[1:]
        # split on single '*' only, keeping '**' powers intact
        for factor in re.split(r"(?<!\*)\*(?!\*)", body):
            m = _FACTOR.match(factor)
            if m:
                name = m.group(1)
                rational_constant(name)  # raises UnknownConstant
                powers[name] = powers.get(name, 0) + int(m.group(2) or 1)
                continue
            try:
                coefficient *= Fraction(factor)
            except (ValueError, ZeroDivisionError):
                raise InvalidSpec(f"cannot parse coordinate factor {factor!r}") from None
        return cls.make(sign * coefficient, powers)

    @property
    def is_rational(self) -> bool:
        return not self.powers

    def __mul__(self, other: "Coordinate") -> "Coordinate":
        merged = dict(self.powers)
        for name, k in other.powers:
            merged[name] = merged.get(name, 0) + k
        return Coordinate.make(self.coefficient * other.coefficient, merged)

    def __pow__(self, k: int) -> "Coordinate":
        return Coordinate.make(self.coefficient ** k, {n: e * k for n, e in self.powers})

    def enclose(self, precision_bits: int) -> RealInterval:
        return self.coefficient * enclose_powers(self.powers, precision_bits)

    def __str__(self) -> str:
        parts = [name if k == 1 else f"{name}^{k}" for name, k in self.powers]
        if not parts:
            return str(self.coefficient)
        if self.coefficient == 1:
            return "*".join(parts)
        if self.coefficient == -1:
            return "-" + "*".join(parts)
        return "*".join([str(self.coefficient)] + parts)


def enclose_powers(powers: Powers, precision_bits: int) -> RealInterval:
    out = RealInterval.exact(1)
    for name, k in powers:
        out = out * enclose_constant(name, max(precision_bits, 8)) ** k
    return out


ONE = Coordinate(Fraction(1))


@dataclass(frozen=True)
class EvaluationPoint:
    """Real vector (xi_0, ..., xi_R) with xi_0 = 1."""

    coordinates: tuple[Coordinate, ...]

    def __post_init__(self):
        if not self.coordinates or self.coordinates[0] != ONE:
            raise InvalidSpec("the first coordinate of an evaluation point must be exactly 1")

    @classmethod
    def parse(cls, items: Iterable) -> "EvaluationPoint":
        coords = tuple(c if isinstance(c, Coordinate) else Coordinate.parse(c) for c in items)
        return cls(coords)

    @classmethod
    def of(cls, *items) -> "EvaluationPoint":
        return cls.parse(items)

    def __len__(self) -> int:
        return len(self.coordinates)

    def __getitem__(self, i: int) -> Coordinate:
        return self.coordinates[i]

    @property
    def dimension(self) -> int:
        return len(self.coordinates) - 1

    @property
    def is_rational(self) -> bool:
        return all(c.is_rational for c in self.coordinates)

    def enclose(self, i: int, precision_bits: int) -> RealInterval:
        return self.coordinates[i].enclose(precision_bits)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coordinates]


@dataclass(frozen=True)
class LinearForm:
    coefficients: tuple[int, ...]
    n: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))

    @property
    def r(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not any(self.coefficients)


def form_length(form: LinearForm | Iterable[int]) -> int:
    coeffs = form.coefficients if isinstance(form, LinearForm) else form
    return sum(abs(c) for c in coeffs)


def exact_value(form: LinearForm, point: EvaluationPoint) -> Fraction | None:
    """Exact value when the grouped symbolic parts cancel or the point is rational."""
    groups = _grouped(form, point)
    if any(c for powers, c in groups.items() if powers):
        return None
    return groups.get((), Fraction(0))


def _grouped(form: LinearForm, point: EvaluationPoint) -> dict[Powers, Fraction]:
    if len(form.coefficients) > len(point):
        raise DimensionMismatch(
            f"form has {len(form.coefficients)} coefficients, point has {len(point)} coordinates")
    if form.is_zero:
        raise ZeroForm("all coefficients are zero")
    groups: dict[Powers, Fraction] = {}
    for c, coord in zip(form.coefficients, point.coordinates):
        if c:
            groups[coord.powers] = groups.get(coord.powers, Fraction(0)) + c * coord.coefficient
    return groups


def evaluate_form(form: LinearForm, point: EvaluationPoint, precision_bits: int) -> RealInterval:
    """Enclosure of sum(l_i * xi_i)."""
    groups = _grouped(form, point)
    total = RealInterval.exact(groups.pop((), Fraction(0)), precision_bits)
    for powers, c in groups.items():
        if c:
            total = total + c * enclose_powers(powers, precision_bits)
    return total


# ---------------------------------------------------------------------------
# sequences


FormProducer = Callable[[int], LinearForm]


class FormSequence:
    """Indexed family of integer linear forms at one evaluation point.

    ``forms`` is either a callable n -> LinearForm or a mapping. Values
    L_n(xi) are cached per (n, precision) behind a lock.
    """

    def __init__(self, forms: FormProducer | Mapping[int, LinearForm], point: EvaluationPoint,
                 bounds: SequenceBounds | None = None, *, first_index: int | None = None,
                 last_index: int | None = None, name: str = "custom", spec: dict | None = None):
        if isinstance(forms, Mapping):
            table = {int(k): v for k, v in forms.items()}
            if not table:
                raise InvalidSpec("empty form table")
            self._producer: FormProducer = table.__getitem__
            first_index = min(table) if first_index is None else first_index
            last_index = max(table) if last_index is None else last_index
            self._table = table
        else:
            self._producer = forms
            self._table = None
        self.point = point
        self.bounds = bounds
        self.first_index = 0 if first_index is None else first_index
        self.last_index = last_index
        self.name = name
        self.spec = dict(spec or {})
        self._forms: dict[int, LinearForm] = {}
        self._values: dict[tuple[int, int], RealInterval] = {}
        self._lock = threading.RLock()

    def has(self, n: int) -> bool:
        if n < self.first_index or (self.last_index is not None and n > self.last_index):
            return False
        return self._table is None or n in self._table

    def form(self, n: int) -> LinearForm:
        with self._lock:
            hit = self._forms.get(n)
        if hit is not None:
            return hit
        if not self.has(n):
            raise IndexError(f"index {n} outside the sequence range")
        f = self._producer(n)
        if not isinstance(f, LinearForm):
            f = LinearForm(tuple(f), n)
        with self._lock:
            self._forms[n] = f
        return f

    def r(self, n: int) -> int:
        return self.form(n).r

    def value(self, n: int, precision_bits: int) -> RealInterval:
        key = (n, precision_bits)
        with self._lock:
            hit = self._values.get(key)
        if hit is not None:
            return hit
        out = evaluate_form(self.form(n), self.point, precision_bits)
        with self._lock:
            self._values[key] = out
        return out

    def abs_value(self, n: int, precision_bits: int) -> RealInterval:
        return abs(self.value(n, precision_bits))

    def evaluator(self, n: int) -> Callable[[int], RealInterval]:
        return lambda p: self.value(n, p)

    def abs_evaluator(self, n: int) -> Callable[[int], RealInterval]:
        return lambda p: self.abs_value(n, p)

    def exact_value(self, n: int) -> Fraction | None:
        return exact_value(self.form(n), self.point)

    def indices(self, lo: int | None = None, hi: int | None = None) -> range:
        lo = self.first_index if lo is None else lo
        hi = self.last_index if hi is None else hi
        if hi is None:
            raise ValueError("an upper index is required for unbounded sequences")
        return range(lo, hi + 1)

    def to_json(self, lo: int | None = None, hi: int | None = None) -> dict:
        ns = [n for n in self.indices(lo, hi) if self.has(n)]
        doc = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "point": self.point.to_json(),
            "r": {str(n): self.r(n) for n in ns},
            "coefficients": {str(n): [str(c) for c in self.form(n).coefficients] for n in ns},
        }
        if self.bounds is not None:
            doc["bounds"] = self.bounds.to_json()
        if self.spec:
            doc["generator"] = self.spec
        return doc

    def dumps(self, lo: int | None = None, hi: int | None = None) -> str:
        return json.dumps(self.to_json(lo, hi), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, doc: Mapping) -> "FormSequence":
        if not isinstance(doc, Mapping):
            raise InvalidSpec("form sequence document must be a JSON object")
        try:
            point = EvaluationPoint.parse(doc["point"])
            raw = doc["coefficients"]
        except KeyError as exc:
            raise InvalidSpec(f"missing field {exc}") from None
        except UnknownConstant as exc:
            raise InvalidSpec(f"unknown constant {exc}") from None
        if not isinstance(raw, Mapping):
            raise InvalidSpec("'coefficients' must map n to coefficient lists")
        forms = {}
        for key, coeffs in raw.items():
            try:
                n = int(key)
                forms[n] = LinearForm(tuple(int(str(c)) for c in coeffs), n)
            except (TypeError, ValueError):
                raise InvalidSpec(f"malformed coefficients at n={key!r}") from None
        for key, r in (doc.get("r") or {}).items():
            n = int(key)
            if n in forms and forms[n].r != int(r):
                raise InvalidSpec(f"declared r_{n} = {r} but the form has {forms[n].r + 1} coefficients")
        bounds = SequenceBounds.from_json(doc["bounds"]) if doc.get("bounds") is not None else None
        return cls(forms, point, bounds, name=str(doc.get("name", "custom")),
                   spec=doc.get("generator"))

    @classmethod
    def loads(cls, text: str) -> "FormSequence":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"invalid JSON: {exc}") from None
        return cls.from_json(doc)


# ---------------------------------------------------------------------------
# hypothesis verification


class Status(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INDETERMINATE = "INDETERMINATE"
    SKIPPED = "SKIPPED"


HYPOTHESES = ("dimension", "rank_monotone", "length", "nonzero", "smallness", "ratio", "monotonicity")

_FROM_VERDICT = {Verdict.HOLDS: Status.PASS, Verdict.FAILS: Status.FAIL,
                 Verdict.INDETERMINATE: Status.INDETERMINATE}


@dataclass
class HypothesisReport:
    n_range: tuple[int, int]
    n_min: int
    precision_bits: int
    verdicts: dict[int, dict[str, Status]]
    first_failure: dict[str, int | None]
    warnings: list[str] = field(default_factory=list)
    growth: dict = field(default_factory=dict)

    def passes(self, n: int) -> bool:
        return all(s in (Status.PASS, Status.SKIPPED) for s in self.verdicts[n].values()) \
            and self.verdicts[n]["nonzero"] is Status.PASS

    @property
    def failed(self) -> bool:
        return any(v is not None for v in self.first_failure.values())

    @property
    def indeterminate(self) -> bool:
        return any(s is Status.INDETERMINATE
                   for n, row in self.verdicts.items() if n >= self.n_min for s in row.values())

    def failures(self) -> list[tuple[str, int]]:
        return sorted(((h, n) for h, n in self.first_failure.items() if n is not None),
                      key=lambda t: (t[1], HYPOTHESES.index(t[0])))

    def to_json(self) -> dict:
        return {
            "n_range": list(self.n_range),
            "n_min": self.n_min,
            "precision_bits": self.precision_bits,
            "verdicts": {str(n): {h: s.value for h, s in row.items()} for n, row in self.verdicts.items()},
            "first_failure": dict(self.first_failure),
            "warnings": list(self.warnings),
            "growth": self.growth,
        }


def _status(fn) -> Status:
    try:
        v = fn()
    except IndeterminateSign:
        return Status.INDETERMINATE
    except BoundUnavailable:
        return Status.SKIPPED
    return v if isinstance(v, Status) else _FROM_VERDICT[v]


def verify_hypotheses_main(seq: FormSequence, point: EvaluationPoint | None = None,
                           bounds: SequenceBounds | None = None, n_range: tuple[int, int] | None = None,
                           precision_bits: int = 64, *, n_min: int | None = None,
                           precision_cap: int = DEFAULT_PRECISION_CAP) -> HypothesisReport:
    """Check each hypothesis of the main criterion for every n in ``n_range``.

    Failures below ``n_min`` are reported as warnings only. The growth
    condition on A_n^(1/r_n) is a finite-range trend, never a verdict.
    """
    point = seq.point if point is None else point
    bounds = seq.bounds if bounds is None else bounds
    if bounds is None:
        raise InvalidSpec("hypothesis verification needs declared bounds Q, A, B")
    if n_range is None:
        n_range = (seq.first_index, seq.last_index)
    lo, hi = n_range
    if hi is None or hi < lo:
        raise ValueError("n_range must be a finite non-empty range")
    n_min = lo if n_min is None else n_min
    p = precision_bits
    cap = max(precision_cap, p)
    cmp = lambda a, op, b: certified_compare(a, op, b, precision=p, precision_cap=cap)  # noqa: E731
    ev = bounds.evaluator
    if seq.point is not point:
        seq = FormSequence(seq.form, point, bounds, first_index=seq.first_index,
                           last_index=seq.last_index, name=seq.name)

    verdicts: dict[int, dict[str, Status]] = {}
    for n in range(lo, hi + 1):
        row: dict[str, Status] = {}
        form = seq.form(n)
        fits = form.r + 1 <= len(point)
        row["dimension"] = Status.PASS if fits else Status.FAIL
        if seq.has(n - 1) and n - 1 >= lo - 1:
            row["rank_monotone"] = Status.PASS if seq.r(n - 1) <= form.r else Status.FAIL
        else:
            row["rank_monotone"] = Status.SKIPPED
        row["length"] = _status(lambda: cmp(form_length(form), "<=", ev("Q", n)))
        if not fits or form.is_zero:
            for h in ("nonzero", "smallness", "ratio"):
                row[h] = Status.FAIL if form.is_zero and fits and h == "nonzero" else Status.SKIPPED
        else:
            absL = seq.abs_evaluator(n)

            def nonzero():
                return Status.PASS if certified_sign(seq.evaluator(n), cap, precision=p) != Sign.ZERO \
                    else Status.FAIL

            row["nonzero"] = _status(nonzero)
            row["smallness"] = _status(lambda: cmp(lambda q: ev("A", n)(q) * absL(q), "<=", 1))
            if seq.has(n - 1) and not seq.form(n - 1).is_zero and seq.r(n - 1) + 1 <= len(point):
                prev = seq.abs_evaluator(n - 1)
                row["ratio"] = _status(lambda: cmp(prev, "<=", lambda q: ev("B", n)(q) * absL(q)))
            else:
                row["ratio"] = Status.SKIPPED
        row["monotonicity"] = _status(lambda: cmp(
            lambda q: ev("Q", n - 1)(q) * ev("B", n - 1)(q), "<=",
            lambda q: ev("Q", n)(q) * ev("B", n)(q)))
        verdicts[n] = {h: row[h] for h in HYPOTHESES}

    first_failure: dict[str, int | None] = {h: None for h in HYPOTHESES}
    notes: list[str] = []
    for n, row in verdicts.items():
        for h, s in row.items():
            if s is not Status.FAIL:
                continue
            if n < n_min:
                notes.append(f"{h} fails at n={n} (below n_min={n_min})")
            elif first_failure[h] is None:
                first_failure[h] = n
    if verdicts and any(row["dimension"] is Status.FAIL for row in verdicts.values()):
        notes.append(f"point dimension {point.dimension} is below sup r_n on the checked range")

    return HypothesisReport((lo, hi), n_min, p, verdicts, first_failure, notes,
                            _growth(seq, bounds, lo, hi))


def _growth(seq: FormSequence, bounds: SequenceBounds, lo: int, hi: int) -> dict:
    """Trend of log(A_n)/r_n on the range; a diagnostic, not a proof of divergence."""
    values = []
    for n in range(lo, hi + 1):
        try:
            a = bounds.value("A", n, 64)
        except BoundUnavailable:
            continue
        r = seq.r(n)
        if r <= 0:
            continue
        values.append((n, float(a.log(64).midpoint) / r))
    steps = [b[1] - a[1] for a, b in zip(values, values[1:])]
    return {
        "quantity": "log(A_n)/r_n",
        "values": {str(n): f"{v:.6g}" for n, v in values},
        "non_decreasing": all(s >= 0 for s in steps),
        "increasing_fraction": f"{(sum(s > 0 for s in steps) / len(steps)) if steps else 0:.4f}",
        "conclusive": False,
    }

