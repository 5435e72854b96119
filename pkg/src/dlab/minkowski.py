"""The convex body C_n, lattice points inside it, the pivot index and the
inequality chain behind the main criterion.

C_n is the set of x in R^(r+1) with

    |x_0| <= 1 / (2 |L_n(xi)|)    and    |x_0 xi_i - x_i| <= (2 |L_n(xi)|)^(1/r),

which has volume 2^(r+1). Membership is decided on the equivalent power
form 2 |x_0| |L| <= 1 and |x_0 xi_i - x_i|^r <= 2 |L|, exactly when |L| and
xi are rational and by escalating interval precision otherwise. Points on
the boundary that stay undecided at the precision cap are accepted
(outward rounding) and flagged as uncertified.

Among the points of C_n the search returns the canonical one: sign chosen
so the first nonzero coordinate is positive, then lexicographically smallest.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence

from .bounds import SequenceBounds
from .errors import (
    ChainStepFailed,
    IndeterminateSign,
    InvalidSpec,
    NoPivot,
    NoPointFound,
    SearchBudgetExceeded,
    VanishingForm,
)
from .forms import EvaluationPoint, FormSequence
from .numerics import (
    DEFAULT_PRECISION_CAP,
    RealInterval,
    Sign,
    Verdict,
    certified_compare,
    certified_sign,
)

DEFAULT_BUDGET = 10**6
_LINEAR_PREFIX = 64


class Membership(str, Enum):
    INSIDE = "INSIDE"
    OUTSIDE = "OUTSIDE"
    BOUNDARY = "BOUNDARY"


@dataclass(frozen=True)
class ConvexBody:
    n: int
    r: int
    point: EvaluationPoint
    abs_value: Callable[[int], RealInterval] = field(repr=False)
    exact_abs: Fraction | None
    precision_bits: int
    x0_halfwidth: RealInterval
    coord_halfwidth: RealInterval
    precision_cap: int = DEFAULT_PRECISION_CAP
    sequence: FormSequence | None = field(default=None, repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return self.r + 1

    @property
    def exact(self) -> bool:
        """True when membership is decided by exact rational arithmetic."""
        return self.exact_abs is not None and all(
            self.point[i].is_rational for i in range(self.r + 1))

    def volume(self, precision_bits: int | None = None) -> RealInterval:
        """Enclosure of 2 x0_halfwidth (2 w)^r; contains 2^(r+1)."""
        return 2 * self.x0_halfwidth * (2 * self.coord_halfwidth) ** self.r

    def x0_bound(self) -> int:
        """Largest integer X with X <= 1/(2|L|), outward if undecided at the cap."""
        if self.exact_abs is not None:
            return math.floor(Fraction(1) / (2 * self.exact_abs))
        p = self.precision_bits
        while True:
            h = 1 / (2 * self.abs_value(p))
            lo, hi = math.floor(h.lower), math.floor(h.upper)
            if lo == hi or p >= self.precision_cap:
                return hi
            p = min(2 * p, self.precision_cap)

    def coordinate_bound(self, i: int) -> int:
        """M_i with |x_i| <= M_i for every point of the body."""
        X = self.x0_bound()
        xi = self.point.enclose(i, self.precision_bits)
        return math.ceil(X * max(abs(xi.lower), abs(xi.upper)) + self.coord_halfwidth.upper)

    # -- membership ---------------------------------------------------------

    def _exact_data(self):
        L = self.exact_abs
        coords = [self.point[i].coefficient for i in range(self.r + 1)]
        return L, coords

    def contains_exact(self, x: Sequence[int]) -> bool:
        """Exact rational membership; only for exact bodies."""
        if not self.exact:
            raise ValueError("body is not exact")
        L, xi = self._exact_data()
        x0 = x[0]
        if 2 * abs(x0) * L > 1:
            return False
        return all(abs(x0 * xi[i] - x[i]) ** self.r <= 2 * L for i in range(1, self.r + 1))

    def coordinate_status(self, x0: int, i: int, xi_value: int, precision_bits: int | None = None
                          ) -> Membership:
        """Status of the single constraint |x0 xi_i - x_i|^r <= 2|L|."""
        if self.exact:
            L, xi = self._exact_data()
            ok = abs(x0 * xi[i] - xi_value) ** self.r <= 2 * L
            return Membership.INSIDE if ok else Membership.OUTSIDE
        p = precision_bits or self.precision_bits
        while True:
            d = abs(x0 * self.point.enclose(i, p) - xi_value) ** self.r
            two_l = 2 * self.abs_value(p)
            if d.upper <= two_l.lower:
                return Membership.INSIDE
            if d.lower > two_l.upper:
                return Membership.OUTSIDE
            if p >= self.precision_cap:
                return Membership.BOUNDARY
            p = min(2 * p, self.precision_cap)

    def x0_status(self, x0: int) -> Membership:
        if x0 == 0:
            return Membership.INSIDE
        if self.exact_abs is not None:
            return Membership.INSIDE if 2 * abs(x0) * self.exact_abs <= 1 else Membership.OUTSIDE
        p = self.precision_bits
        while True:
            v = 2 * abs(x0) * self.abs_value(p)
            if v.upper <= 1:
                return Membership.INSIDE
            if v.lower > 1:
                return Membership.OUTSIDE
            if p >= self.precision_cap:
                return Membership.BOUNDARY
            p = min(2 * p, self.precision_cap)

    def membership(self, x: Sequence[int]) -> Membership:
        if len(x) != self.r + 1:
            raise InvalidSpec(f"point has {len(x)} coordinates, body has dimension {self.r + 1}")
        statuses = [self.x0_status(x[0])]
        for i in range(1, self.r + 1):
            if statuses[-1] is Membership.OUTSIDE:
                break
            statuses.append(self.coordinate_status(x[0], i, x[i]))
        if Membership.OUTSIDE in statuses:
            return Membership.OUTSIDE
        if Membership.BOUNDARY in statuses:
            return Membership.BOUNDARY
        return Membership.INSIDE

    def refined(self, precision_bits: int) -> "ConvexBody":
        return _make_body(self.n, self.r, self.point, self.abs_value, self.exact_abs,
                          precision_bits, self.precision_cap, self.sequence)

    def to_json(self) -> dict:
        return {"n": self.n, "r": self.r, "precision_bits": self.precision_bits,
                "x0_bound": str(self.x0_bound()),
                "x0_halfwidth": [f"{float(self.x0_halfwidth.lower):.17g}", f"{float(self.x0_halfwidth.upper):.17g}"],
                "coord_halfwidth": [f"{float(self.coord_halfwidth.lower):.17g}",
                                    f"{float(self.coord_halfwidth.upper):.17g}"],
                "exact": self.exact}


def _make_body(n, r, point, abs_value, exact_abs, p, cap, seq):
    if r < 1:
        raise InvalidSpec("the body needs r >= 1")
    if len(point) < r + 1:
        raise InvalidSpec(f"point has {len(point)} coordinates, the body needs {r + 1}")
    L = RealInterval.exact(exact_abs) if exact_abs is not None else abs_value(p)
    if L.lower <= 0:
        raise IndeterminateSign("|L_n(xi)| is not separated from 0", precision=p)
    x0h = 1 / (2 * L) if not L.is_exact else RealInterval.exact(Fraction(1) / (2 * L.lower))
    w = 2 * L if r == 1 else (2 * L).root(r, p)
    return ConvexBody(n, r, point, abs_value, exact_abs, p, x0h, w, max(cap, p), seq)


def build_body(seq: FormSequence, point: EvaluationPoint | None, n: int, precision_bits: int = 256, *,
               precision_cap: int = DEFAULT_PRECISION_CAP) -> ConvexBody:
    """C_n for the form L_n of ``seq`` at ``point``."""
    point = seq.point if point is None else point
    if point is not seq.point:
        seq = FormSequence(seq.form, point, seq.bounds, first_index=seq.first_index,
                           last_index=seq.last_index, name=seq.name)
    cap = max(precision_cap, precision_bits)
    exact = seq.exact_value(n)
    if exact is not None:
        if exact == 0:
            raise VanishingForm(f"L_{n}(xi) = 0; the body is unbounded")
        return _make_body(n, seq.r(n), point, seq.abs_evaluator(n), abs(exact), precision_bits, cap, seq)
    p = precision_bits
    if certified_sign(seq.evaluator(n), cap, precision=p) == Sign.ZERO:
        raise VanishingForm(f"L_{n}(xi) = 0; the body is unbounded")
    while seq.value(n, p).sign() is None:
        p *= 2
    return _make_body(n, seq.r(n), point, seq.abs_evaluator(n), None, p, cap, seq)


def body_from_value(point: EvaluationPoint, r: int, abs_value: Fraction | RealInterval |
                    Callable[[int], RealInterval], *, n: int = 0, precision_bits: int = 64,
                    precision_cap: int = DEFAULT_PRECISION_CAP) -> ConvexBody:
    """Body for a given |L| (exact rational, fixed interval, or re-evaluable)."""
    exact = None
    if isinstance(abs_value, (int, Fraction)):
        exact = Fraction(abs_value)
        if exact <= 0:
            raise InvalidSpec("|L| must be positive")
        f = lambda p: RealInterval.exact(exact)  # noqa: E731
    elif isinstance(abs_value, RealInterval):
        iv = abs_value
        exact = iv.lower if iv.is_exact else None
        f = lambda p: iv  # noqa: E731
    else:
        f = abs_value
    return _make_body(n, r, point, f, exact, precision_bits, max(precision_cap, precision_bits), None)


# ---------------------------------------------------------------------------
# lattice search


@dataclass(frozen=True)
class LatticePoint:
    x: tuple[int, ...]
    membership: Membership
    mode: str

    @property
    def x0(self) -> int:
        return self.x[0]

    @property
    def certified(self) -> bool:
        return self.membership is Membership.INSIDE

    @property
    def x0_nonzero(self) -> bool:
        return self.x[0] != 0

    def to_json(self) -> dict:
        return {"x": [str(v) for v in self.x], "membership": self.membership.value,
                "certified": self.certified, "x0_nonzero": self.x0_nonzero, "mode": self.mode}


def canonical(x: Sequence[int]) -> tuple[int, ...]:
    """Representative of {x, -x} whose first nonzero coordinate is positive."""
    for v in x:
        if v:
            return tuple(x) if v > 0 else tuple(-c for c in x)
    return tuple(x)


def _candidates(body: ConvexBody, x0: int, i: int) -> list[tuple[int, Membership]]:
    """Integers x_i near x0 xi_i allowed by the i-th constraint, ascending."""
    xi = body.point.enclose(i, body.precision_bits)
    w = body.coord_halfwidth.upper
    lo = math.ceil(min(x0 * xi.lower, x0 * xi.upper) - w)
    hi = math.floor(max(x0 * xi.lower, x0 * xi.upper) + w)
    out = []
    for v in range(lo, hi + 1):
        s = body.coordinate_status(x0, i, v)
        if s is not Membership.OUTSIDE:
            out.append((v, s))
    return out


def _combine(statuses) -> Membership:
    return Membership.BOUNDARY if Membership.BOUNDARY in statuses else Membership.INSIDE


def _point_at(body: ConvexBody, x0: int) -> LatticePoint | None:
    """Lexicographically smallest canonical point with this x0 >= 0."""
    xs = body.x0_status(x0)
    if xs is Membership.OUTSIDE:
        return None
    if x0 == 0:
        # the smallest canonical point with x0 = 0 is (0, ..., 0, 1),
        # available exactly when w >= 1
        zero = [body.coordinate_status(0, i, 0) for i in range(1, body.r)]
        one = body.coordinate_status(0, body.r, 1)
        if one is Membership.OUTSIDE:
            return None
        return LatticePoint((0,) * body.r + (1,), _combine([*zero, one]), "rounding")
    coords, statuses = [x0], [xs]
    for i in range(1, body.r + 1):
        cands = _candidates(body, x0, i)
        if not cands:
            return None
        coords.append(cands[0][0])
        statuses.append(cands[0][1])
    return LatticePoint(tuple(coords), _combine(statuses), "rounding")


def _continued_fraction(q: Fraction, limit: int = 10_000) -> list[int]:
    out = []
    while len(out) < limit:
        a = math.floor(q)
        out.append(a)
        frac = q - a
        if frac == 0:
            break
        q = 1 / frac
    return out


def _convergent_denominators(body: ConvexBody, precision_bits: int) -> tuple[list[int], bool]:
    """Convergent denominators shared by every real in the enclosure of xi_1.

    Returns (denominators, complete) where complete means xi_1 is rational
    and the list reaches its exact denominator.
    """
    c = body.point[1]
    if c.is_rational:
        cf = _continued_fraction(c.coefficient)
        complete = True
    else:
        iv = body.point.enclose(1, precision_bits)
        a, b = _continued_fraction(iv.lower), _continued_fraction(iv.upper)
        cf = []
        for u, v in zip(a, b):
            if u != v:
                break
            cf.append(u)
        cf = cf[:-1]
        complete = False
    dens, q_prev, q = [], 0, 1
    for a in cf[1:]:
        q_prev, q = q, a * q + q_prev
        dens.append(q)
    return dens, complete


def _search_r1(body: ConvexBody, X: int) -> LatticePoint | None:
    # the smallest x0 >= 1 with ||x0 xi|| <= w is a best approximation of the
    # second kind, hence a convergent denominator; scan a short prefix
    # linearly, then jump along the convergents of xi_1
    for x0 in range(1, min(X, _LINEAR_PREFIX) + 1):
        found = _point_at(body, x0)
        if found is not None:
            return found
    if X <= _LINEAR_PREFIX:
        return None
    p = body.precision_bits
    while True:
        dens, complete = _convergent_denominators(body, p)
        for q in dens:
            if q <= _LINEAR_PREFIX:
                continue
            if q > X:
                return None
            found = _point_at(body, q)
            if found is not None:
                return found
        if complete or p >= body.precision_cap:
            return None
        p = min(2 * p, body.precision_cap)


def find_lattice_point(body: ConvexBody, mode: str = "rounding", *, budget: int = DEFAULT_BUDGET,
                       scan_limit: int = DEFAULT_BUDGET) -> LatticePoint:
    """Canonical nonzero integer point of the body.

    rounding: scan x0 = 0, 1, ... and take the smallest admissible integer
    near x0 xi_i per coordinate (for r = 1 the scan follows convergent
    denominators beyond a short prefix). Falls back to exhaustive search
    when nothing is found.
    exhaustive: enumerate the full integer box.
    """
    if mode == "exhaustive":
        return exhaustive_search(body, budget)
    if mode != "rounding":
        raise InvalidSpec(f"unknown search mode {mode!r}")
    X = body.x0_bound()
    found = _point_at(body, 0)
    if found is None:
        if body.r == 1:
            found = _search_r1(body, X)
        else:
            for x0 in range(1, min(X, scan_limit) + 1):
                found = _point_at(body, x0)
                if found is not None:
                    break
            else:
                if X > scan_limit:
                    raise SearchBudgetExceeded(X, scan_limit)
    if found is not None:
        return found
    try:
        point = exhaustive_search(body, budget)
    except NoPointFound:
        raise NoPointFound(f"no lattice point in C_{body.n}") from None
    return LatticePoint(point.x, point.membership, "rounding+exhaustive")


def box_size(body: ConvexBody) -> int:
    X = body.x0_bound()
    size = 2 * X + 1
    for i in range(1, body.r + 1):
        size *= 2 * body.coordinate_bound(i) + 1
    return size


def exhaustive_search(body: ConvexBody, budget: int = DEFAULT_BUDGET) -> LatticePoint:
    """Scan every integer point of the box |x0| <= X, |x_i| <= M_i.

    For each x0 the constraints on the other coordinates are independent,
    so each coordinate range is filtered in full and the admissible points
    are the product of the filtered ranges.
    """
    size = box_size(body)
    if size > budget:
        raise SearchBudgetExceeded(size, budget)
    X = body.x0_bound()
    bounds = [body.coordinate_bound(i) for i in range(1, body.r + 1)]
    best: tuple[int, ...] | None = None
    best_status = Membership.INSIDE
    exact = body.exact
    if exact:
        L, xi = body._exact_data()
        # integer form of |x0 a/b - x|^r <= 2 u/v:  v |x0 a - x b|^r <= 2 u b^r
        u, v = L.numerator, L.denominator
        fracs = [(xi[i].numerator, xi[i].denominator) for i in range(1, body.r + 1)]
        rhs = [2 * u * b ** body.r for _, b in fracs]
    for x0 in range(-X, X + 1):
        s0 = body.x0_status(x0)
        if s0 is Membership.OUTSIDE:
            continue
        allowed = []
        for idx, M in enumerate(bounds):
            if exact:
                a, b = fracs[idx]
                r, lim = body.r, rhs[idx]
                row = [(x, Membership.INSIDE) for x in range(-M, M + 1)
                       if v * abs(x0 * a - x * b) ** r <= lim]
            else:
                row = [(x, s) for x in range(-M, M + 1)
                       if (s := body.coordinate_status(x0, idx + 1, x)) is not Membership.OUTSIDE]
            if not row:
                break
            allowed.append(row)
        else:
            for combo in itertools.product(*allowed):
                x = (x0,) + tuple(c for c, _ in combo)
                if not any(x):
                    continue
                cx = canonical(x)
                if best is None or cx < best:
                    best = cx
                    best_status = _combine([s0, *(s for _, s in combo)])
    if best is None:
        raise NoPointFound(f"no nonzero lattice point in C_{body.n}")
    # the body is symmetric, so the canonical representative has the same status
    return LatticePoint(best, best_status, "exhaustive")


# ---------------------------------------------------------------------------
# pivot index and the proof chain


@dataclass(frozen=True)
class PivotRecord:
    k: int
    x0: int
    start: int
    lower_witness: bool
    checks: dict[int, Verdict]

    def to_json(self) -> dict:
        return {"k": self.k, "x0": str(self.x0), "start": self.start,
                "lower_witness": self.lower_witness,
                "missing_lower_witness": not self.lower_witness}


def pivot_index(x0: int, seq: FormSequence, point: EvaluationPoint | None, n: int,
                precision_bits: int = 256, *, start: int | None = None,
                precision_cap: int = DEFAULT_PRECISION_CAP) -> PivotRecord:
    """Least k >= start with |x0| <= 1/(2|L_k(xi)|), checked as 2|x0||L_k| <= 1."""
    if x0 == 0:
        raise InvalidSpec("the pivot needs x0 != 0")
    if point is not None and point is not seq.point:
        seq = FormSequence(seq.form, point, seq.bounds, first_index=seq.first_index,
                           last_index=seq.last_index, name=seq.name)
    start = seq.first_index if start is None else start
    checks: dict[int, Verdict] = {}
    cap = max(precision_cap, precision_bits)
    for j in range(start, n + 1):
        v = certified_compare(lambda p, j=j: 2 * abs(x0) * seq.abs_value(j, p), "<=", 1,
                              precision=precision_bits, precision_cap=cap)
        checks[j] = v
        if v is Verdict.INDETERMINATE:
            raise IndeterminateSign(f"cannot decide the pivot condition at j={j}")
        if v is Verdict.HOLDS:
            return PivotRecord(j, x0, start, j > start, checks)
    raise NoPivot(f"|x0| = {abs(x0)} exceeds 1/(2|L_j|) for every j in [{start}, {n}]")


CHAIN_STEPS = ("a", "b", "c", "d", "e", "f")


@dataclass
class ChainReport:
    n: int
    k: int
    x: tuple[int, ...]
    integer: int
    steps: dict[str, Verdict]
    zero_integer: bool
    notes: dict[str, str] = field(default_factory=dict)

    @property
    def verdict(self) -> Verdict:
        return Verdict.combine(self.steps.values())

    @property
    def first_failure(self) -> str | None:
        for s in CHAIN_STEPS:
            if self.steps.get(s) is not Verdict.HOLDS:
                return s
        return None

    def raise_if_failed(self) -> None:
        step = self.first_failure
        if step is not None:
            raise ChainStepFailed(step, self.notes.get(step, self.steps[step].value))

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "x": [str(v) for v in self.x], "integer": str(self.integer),
                "zero_integer": self.zero_integer, "verdict": self.verdict.value,
                "steps": {s: v.value for s, v in self.steps.items()}, "notes": dict(self.notes)}


def proof_chain_check(body: ConvexBody, x: LatticePoint | Sequence[int], pivot: PivotRecord,
                      bounds: SequenceBounds | None = None, *, precision_bits: int | None = None
                      ) -> ChainReport:
    """Replay the proof's inequalities for the point x and pivot k.

    (a) N = sum l_ik x_i is an integer and equals x0 L_k(xi) + y with
        y = sum l_ik (x_i - x0 xi_i);
    (b) |x0 L_k(xi)| <= 1/2;
    (c) |y| >= |x0 L_k(xi)| (when N = 0 this holds with equality and the
        zero_integer flag is set);
    (d) |y| <= Q_k (2/A_n)^(1/r_n), checked as |y|^r_n A_n <= 2 Q_k^r_n;
    (e) |y| >= 1/(2 B_k);
    (f) A_n <= 2 (2 B_k Q_k)^r_n, A_n <= 2^(r_n+1) (B_n Q_n)^r_n and Q_k B_k <= Q_n B_n.
    """
    seq = body.sequence
    if seq is None:
        raise InvalidSpec("proof replay needs a body built from a form sequence")
    bounds = seq.bounds if bounds is None else bounds
    if bounds is None:
        raise InvalidSpec("proof replay needs declared bounds")
    xs = tuple(x.x if isinstance(x, LatticePoint) else map(int, x))
    n, k, r = body.n, pivot.k, body.r
    x0 = xs[0]
    if x0 != pivot.x0:
        raise InvalidSpec("pivot was computed for a different x0")
    form = seq.form(k)
    if form.r > r:
        raise InvalidSpec(f"r_{k} = {form.r} exceeds r_{n} = {r}")
    coeffs = form.coefficients
    p0 = precision_bits or body.precision_bits
    cap = body.precision_cap
    kw = dict(precision=p0, precision_cap=cap)
    N = sum(c * v for c, v in zip(coeffs, xs))
    point = body.point

    def Lk(p):
        return seq.value(k, p)

    def y(p):
        acc = RealInterval.exact(0)
        for i, c in enumerate(coeffs):
            if c:
                acc = acc + c * (xs[i] - x0 * point.enclose(i, p))
        return acc

    def abs_y(p):
        # y = N - x0 L_k; use whichever enclosure is tighter
        a, b = abs(y(p)), abs(N - x0 * Lk(p))
        return a if a.width <= b.width else b

    def x0Lk(p):
        return abs(x0 * Lk(p))

    Q, A, B = (bounds.evaluator(name, k) for name in ("Q", "A", "B"))
    An = bounds.evaluator("A", n)
    Qn, Bn = bounds.evaluator("Q", n), bounds.evaluator("B", n)
    steps: dict[str, Verdict] = {}
    notes: dict[str, str] = {}

    total = x0 * Lk(p0) + y(p0)
    steps["a"] = Verdict.of(total.contains(N))
    steps["b"] = certified_compare(lambda p: 2 * x0Lk(p), "<=", 1, **kw)
    zero = N == 0
    if zero:
        steps["c"] = Verdict.HOLDS
        notes["c"] = "integer is 0: y = -x0 L_k, so |y| = |x0 L_k| and the inequality is an equality"
    else:
        steps["c"] = certified_compare(abs_y, ">=", x0Lk, **kw)
    steps["d"] = certified_compare(lambda p: abs_y(p) ** r * An(p), "<=", lambda p: 2 * Q(p) ** r, **kw)
    steps["e"] = certified_compare(lambda p: 2 * B(p) * abs_y(p), ">=", 1, **kw)
    f_parts = [
        certified_compare(An, "<=", lambda p: 2 * (2 * B(p) * Q(p)) ** r, **kw),
        certified_compare(An, "<=", lambda p: (1 << (r + 1)) * (Bn(p) * Qn(p)) ** r, **kw),
        # identical when k = n; comparing a quantity with itself never separates
        Verdict.HOLDS if k == n else
        certified_compare(lambda p: Q(p) * B(p), "<=", lambda p: Qn(p) * Bn(p), **kw),
    ]
    steps["f"] = Verdict.combine(f_parts)
    notes["f"] = ", ".join(v.value for v in f_parts)
    if not pivot.lower_witness:
        notes["e"] = "pivot sits at the first index; no lower witness for |x0| > 1/(2|L_(k-1)|)"
    return ChainReport(n, k, xs, N, steps, zero, notes)


@dataclass
class Replay:
    body: ConvexBody
    point: LatticePoint
    pivot: PivotRecord
    chain: ChainReport

    def to_json(self) -> dict:
        return {"body": self.body.to_json(), "lattice_point": self.point.to_json(),
                "pivot": self.pivot.to_json(), "chain": self.chain.to_json()}


def replay(seq: FormSequence, n: int, precision_bits: int = 256, *, mode: str = "rounding",
           budget: int = DEFAULT_BUDGET, precision_cap: int = DEFAULT_PRECISION_CAP,
           start: int | None = None) -> Replay:
    """build_body -> find_lattice_point -> pivot_index -> proof_chain_check."""
    body = build_body(seq, None, n, precision_bits, precision_cap=precision_cap)
    pt = find_lattice_point(body, mode, budget=budget)
    if pt.x0 == 0:
        raise NoPivot(f"the point of C_{n} has x0 = 0 (A_n <= 2 regime); no pivot exists")
    piv = pivot_index(pt.x0, seq, None, n, precision_bits, start=start, precision_cap=precision_cap)
    chain = proof_chain_check(body, pt, piv)
    return Replay(body, pt, piv, chain)
