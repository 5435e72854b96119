"""Bundled form sequences and the monomial lift of polynomial sequences.

Classical sequences come from Apery-type three-term recurrences. Each has
two integer-seeded solutions (b_n, a_n) with a_n / b_n -> constant and a
denominator-clearing factor built from d_n = lcm(1..n):

    zeta(3):  n^3 u_n = (34n^3 - 51n^2 + 27n - 5) u_{n-1} - (n-1)^3 u_{n-2}
              b: 1, 5, 73, ...   a: 0, 6, ...   L_n = 2 d_n^3 (b_n zeta3 - a_n)
    zeta(2):  n^2 u_n = (11n^2 - 11n + 3) u_{n-1} + (n-1)^2 u_{n-2}
              b: 1, 3, 19, ...   a: 0, 5, ...   L_n = d_n^2 (b_n zeta2 - a_n)
    log 2:    n u_n = 3(2n - 1) u_{n-1} - (n - 1) u_{n-2}
              q: 1, 3, 13, ...   p: 0, 2, ...   L_n = d_n (q_n log2 - p_n)

The log 2 forms are d_n times the integral of x^n (1-x)^n / (1+x)^(n+1)
over [0, 1]. The seeds are the classical ones from Apery's proofs.

For these sequences Q_n is the exact form length, sigma(n) = log Q_n, and
A_n, B_n are derived from certified exponent estimates over the requested
window, in the exponential form used by the dimension bound.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .bounds import ExpressionBound, SequenceBounds, TableBound
from .errors import DegreeMismatch, InvalidSpec
from .forms import Coordinate, EvaluationPoint, FormSequence, LinearForm, form_length

KINDS = ("apery_zeta3", "apery_zeta2", "log2_pade", "synthetic_geometric",
         "adversarial_rational", "monomial_lift")
CLASSICAL = ("apery_zeta3", "apery_zeta2", "log2_pade")
LIFT_FAMILIES = ("pell_sqrt2", "x2_minus_2")

_lcm_cache = [1]
_lcm_lock = threading.Lock()


def lcm_upto(n: int) -> int:
    """d_n = lcm(1, ..., n), with d_0 = 1."""
    with _lcm_lock:
        while len(_lcm_cache) <= n:
            k = len(_lcm_cache)
            _lcm_cache.append(math.lcm(_lcm_cache[-1], k))
        return _lcm_cache[n]


class _Recurrence:
    """Memoized pair of solutions of a three-term recurrence."""

    def __init__(self, step: Callable[[int, Fraction, Fraction], Fraction], seeds_b, seeds_a):
        self._step = step
        self._b = [Fraction(x) for x in seeds_b]
        self._a = [Fraction(x) for x in seeds_a]
        self._lock = threading.Lock()

    def __call__(self, n: int) -> tuple[Fraction, Fraction]:
        with self._lock:
            while len(self._b) <= n:
                k = len(self._b)
                self._b.append(self._step(k, self._b[k - 1], self._b[k - 2]))
                self._a.append(self._step(k, self._a[k - 1], self._a[k - 2]))
            return self._b[n], self._a[n]


def _zeta3_step(n, u1, u2):
    return ((34 * n**3 - 51 * n**2 + 27 * n - 5) * u1 - (n - 1) ** 3 * u2) / n**3


def _zeta2_step(n, u1, u2):
    return ((11 * n**2 - 11 * n + 3) * u1 + (n - 1) ** 2 * u2) / n**2


def _log2_step(n, u1, u2):
    return (3 * (2 * n - 1) * u1 - (n - 1) * u2) / n


RECURRENCES = {
    "apery_zeta3": _Recurrence(_zeta3_step, (1, 5), (0, 6)),
    "apery_zeta2": _Recurrence(_zeta2_step, (1, 3), (0, 5)),
    "log2_pade": _Recurrence(_log2_step, (1, 3), (0, 2)),
}
_CONSTANT = {"apery_zeta3": "zeta3", "apery_zeta2": "zeta2", "log2_pade": "log2"}


def clearing_factor(kind: str, n: int) -> int:
    d = lcm_upto(n)
    if kind == "apery_zeta3":
        return 2 * d**3
    if kind == "apery_zeta2":
        return d**2
    if kind == "log2_pade":
        return d
    raise InvalidSpec(f"{kind} has no clearing factor")


def classical_form(kind: str, n: int) -> LinearForm:
    if n < 0:
        raise InvalidSpec("n must be non-negative")
    b, a = RECURRENCES[kind](n)
    f = clearing_factor(kind, n)
    l0, l1 = -f * a, f * b
    if l0.denominator != 1 or l1.denominator != 1:
        raise ArithmeticError(f"{kind}: clearing factor does not clear denominators at n={n}")
    return LinearForm((int(l0), int(l1)), n)


def apery_form(s: int, n: int) -> LinearForm:
    """Integer form l0 + l1*zeta(s) for s in {2, 3}."""
    if s not in (2, 3):
        raise InvalidSpec("s must be 2 or 3")
    return classical_form(f"apery_zeta{s}", n)


# ---------------------------------------------------------------------------
# polynomial sequences and the monomial lift


def monomials(t: int, d: int) -> list[tuple[int, ...]]:
    """Exponent tuples of total degree <= d in graded lexicographic order.

    Within one degree, tuples are sorted in descending lexicographic order,
    so for t = 2, d = 1 the order is (0,0), (1,0), (0,1).
    """
    if t < 1 or d < 0:
        raise InvalidSpec("need t >= 1 and d >= 0")
    out = []
    for deg in range(d + 1):
        level = [c for c in _compositions(deg, t)]
        level.sort(reverse=True)
        out.extend(level)
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def monomial_count(t: int, d: int) -> int:
    return math.comb(d + t, t)


Polynomial = Mapping[tuple[int, ...], int]


@dataclass
class PolynomialSequence:
    """P_n in Z[X_1..X_t] with declared degrees d_n and exponent profile.

    ``alpha``, ``beta``, ``gamma`` are bound expressions in n (see
    ``dlab.bounds``) for the two-sided estimate
    e^-alpha_n <= |P_n| <= e^-gamma_n and length(P_n) <= e^beta_n.
    """

    t: int
    polynomial: Callable[[int], Polynomial]
    degree: Callable[[int], int]
    alpha: str | None = None
    beta: str | None = None
    gamma: str | None = None
    first_index: int = 0
    name: str = "polynomials"

    def checked(self, n: int) -> Polynomial:
        poly = {tuple(k): int(v) for k, v in self.polynomial(n).items() if v}
        d = self.degree(n)
        for exps in poly:
            if len(exps) != self.t:
                raise InvalidSpec(f"monomial {exps} does not have {self.t} exponents")
            if sum(exps) > d:
                raise DegreeMismatch(f"P_{n} has a term of degree {sum(exps)} > d_n = {d}")
        return poly


def lift_point(thetas, t: int, d: int) -> EvaluationPoint:
    coords = [c if isinstance(c, Coordinate) else Coordinate.parse(c) for c in thetas]
    if len(coords) != t:
        raise InvalidSpec(f"expected {t} base values, got {len(coords)}")
    out = []
    for exps in monomials(t, d):
        c = Coordinate.make(1)
        for base, e in zip(coords, exps):
            c = c * base ** e
        out.append(c)
    return EvaluationPoint(tuple(out))


def lift_polynomial(poly: Polynomial, t: int, d: int, n: int = 0) -> LinearForm:
    index = {m: i for i, m in enumerate(monomials(t, d))}
    coeffs = [0] * len(index)
    for exps, c in poly.items():
        if sum(exps) > d:
            raise DegreeMismatch(f"term {exps} exceeds degree {d}")
        coeffs[index[tuple(exps)]] += int(c)
    return LinearForm(tuple(coeffs), n)


def monomial_lift(pseq: PolynomialSequence, thetas, n_max: int) -> FormSequence:
    """Linear forms over xi_i = theta^i with L_n(xi) = P_n(theta).

    r_n = C(d_n + t, t) - 1; the point covers the largest degree up to n_max.
    When the sequence declares alpha, beta, gamma the bounds are
    Q_n = e^beta_n, A_n = e^gamma_n, B_n = e^(alpha_n - gamma_{n-1}).
    """
    if isinstance(thetas, EvaluationPoint):
        thetas = thetas.coordinates[1:]
    thetas = list(thetas)
    if len(thetas) != pseq.t:
        raise InvalidSpec(f"point has {len(thetas)} values, sequence has t = {pseq.t}")
    top = max(pseq.degree(n) for n in range(pseq.first_index, n_max + 1))
    point = lift_point(thetas, pseq.t, top)

    def produce(n: int) -> LinearForm:
        return lift_polynomial(pseq.checked(n), pseq.t, pseq.degree(n), n)

    bounds = None
    if pseq.alpha and pseq.beta and pseq.gamma:
        bounds = SequenceBounds.parse(
            Q=f"exp({pseq.beta})",
            A=f"exp({pseq.gamma})",
            B=f"exp({pseq.alpha}) / A(n - 1)",
            metadata={"alpha": pseq.alpha, "beta": pseq.beta, "gamma": pseq.gamma, "t": pseq.t},
        )
    return FormSequence(produce, point, bounds, first_index=pseq.first_index, last_index=n_max,
                        name=pseq.name)


def _pell(n: int) -> tuple[int, int]:
    """(x, y) with (1 + sqrt2)^n = y + x*sqrt2."""
    y, x = 1, 0
    for _ in range(n):
        y, x = y + 2 * x, x + y
    return x, y


def pell_polynomials() -> PolynomialSequence:
    """P_n = (x_n X - y_n)(X + 1) with |P_n(sqrt2)| = (sqrt2 - 1)^(n-1)."""

    def poly(n):
        x, y = _pell(n)
        return {(2,): x, (1,): x - y, (0,): -y}

    return PolynomialSequence(1, poly, lambda n: 2, alpha="0.89*n", beta="0.9*n + 1",
                              gamma="0.88*(n - 1)", first_index=1, name="pell_sqrt2")


def root_polynomials() -> PolynomialSequence:
    """The constant sequence X^2 - 2; its lift vanishes at sqrt2."""
    return PolynomialSequence(1, lambda n: {(2,): 1, (0,): -2}, lambda n: 2,
                              alpha="n + 1", beta="n + 2", gamma="n", first_index=1,
                              name="x2_minus_2")


# ---------------------------------------------------------------------------
# specs


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        kind = self.kind.replace("-", "_")
        if kind not in KINDS:
            raise InvalidSpec(f"unknown generator {self.kind!r}; choose from {', '.join(KINDS)}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", _validate_params(kind, dict(self.params)))

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": {k: str(v) for k, v in sorted(self.params.items())}}

    @classmethod
    def from_json(cls, doc) -> "GeneratorSpec":
        if isinstance(doc, str):
            try:
                doc = json.loads(doc)
            except json.JSONDecodeError:
                return cls(doc)
        if not isinstance(doc, Mapping) or "kind" not in doc:
            raise InvalidSpec("generator spec needs a 'kind' field")
        return cls(str(doc["kind"]), dict(doc.get("params") or {}))


_DEFAULTS = {
    "synthetic_geometric": {"ratio": 2},
    "adversarial_rational": {"point": Fraction(3, 7), "vanish_at": 5},
    "monomial_lift": {"family": "pell_sqrt2"},
}


def _validate_params(kind: str, params: dict) -> dict:
    out = dict(_DEFAULTS.get(kind, {}))
    out.update(params)
    try:
        if kind == "synthetic_geometric":
            q = int(out["ratio"])
            if q < 2 or Fraction(str(out["ratio"])) != q:
                raise InvalidSpec("geometric ratio must be an integer > 1")
            out["ratio"] = q
        elif kind == "adversarial_rational":
            x = Fraction(str(out["point"]))
            if x.denominator == 1:
                raise InvalidSpec("adversarial point must be a non-integer rational")
            out["point"] = x
            out["vanish_at"] = int(out["vanish_at"])
            if out["vanish_at"] < 1:
                raise InvalidSpec("vanish_at must be >= 1")
        elif kind == "monomial_lift":
            if out["family"] not in LIFT_FAMILIES:
                raise InvalidSpec(f"unknown polynomial family {out['family']!r}")
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, InvalidSpec):
            raise
        raise InvalidSpec(f"bad parameter for {kind}: {exc}") from None
    unknown = set(out) - set(_DEFAULTS.get(kind, {}))
    if unknown:
        raise InvalidSpec(f"unexpected parameters for {kind}: {sorted(unknown)}")
    return out


def default_n_min(spec: GeneratorSpec, n_max: int) -> int:
    if spec.kind in CLASSICAL:
        return max(1, n_max // 3)
    if spec.kind == "monomial_lift":
        return 2
    return 1


def build_sequence(spec: GeneratorSpec | str, n_min: int | None = None, n_max: int = 30, *,
                   precision_bits: int = 256, estimate_from: int | None = None) -> FormSequence:
    """Materialize a bundled sequence with bounds valid on [n_min, n_max].

    ``estimate_from`` widens the exponent-estimate window downwards for the
    classical sequences (useful when proof replays need B_k for small k).
    """
    if isinstance(spec, str):
        spec = GeneratorSpec(spec)
    if n_min is None:
        n_min = default_n_min(spec, n_max)
    if n_max < n_min:
        raise InvalidSpec("n_max must be >= n_min")
    kind = spec.kind
    if kind in CLASSICAL:
        return _classical(spec, n_min, n_max, precision_bits, estimate_from)
    if kind == "synthetic_geometric":
        return synthetic_geometric(spec.params["ratio"], n_max, spec)
    if kind == "adversarial_rational":
        return adversarial_rational(spec.params["point"], spec.params["vanish_at"], n_max, spec)
    family = pell_polynomials() if spec.params["family"] == "pell_sqrt2" else root_polynomials()
    seq = monomial_lift(family, ["sqrt2"], n_max)
    seq.spec = spec.to_json()
    return seq


def _classical(spec, n_min, n_max, precision_bits, estimate_from):
    from .criteria import estimate_exponents

    kind = spec.kind
    point = EvaluationPoint.of("1", _CONSTANT[kind])
    seq = FormSequence(lambda n: classical_form(kind, n), point, None, first_index=0,
                       last_index=n_max + 1, name=kind, spec=spec.to_json())
    lo = min(n_min - 1, n_max - 7)
    if estimate_from is not None:
        lo = min(lo, estimate_from)
    lo = max(lo, 1)
    q_table = TableBound({n: form_length(seq.form(n)) for n in range(0, n_max + 2)})
    sigma = ExpressionBound("log(Q(n))")
    gauge = SequenceBounds(q_table, q_table, q_table, sigma)
    est = estimate_exponents(seq, (lo, n_max), precision_bits,
                             sigma=lambda n, p: gauge.value("sigma", n, p))
    t1, t2 = est.tau1_hat, est.tau2_hat
    seq.bounds = SequenceBounds(
        q_table,
        ExpressionBound(f"exp({t2} * sigma(n + 1))"),
        ExpressionBound(f"exp({t1 - t2} * sigma(n))"),
        sigma,
        {"tau1": str(t1), "tau2": str(t2), "estimate_window": f"{lo}..{n_max}"},
    )
    seq.last_index = n_max + 1
    seq.estimate = est
    return seq


def synthetic_geometric(ratio: int, n_max: int, spec: GeneratorSpec | None = None) -> FormSequence:
    """L_n = X_n at xi_i = ratio^-i, so |L_n(xi)| = ratio^-n exactly.

    r_n = max(n, 1); bounds Q_n = ratio^n, A_n = ratio^(n-1), B_n = ratio.
    """
    size = max(n_max, 1) + 1
    point = EvaluationPoint(tuple(Coordinate.make(Fraction(1, ratio ** i)) for i in range(size)))

    def produce(n: int) -> LinearForm:
        r = max(n, 1)
        coeffs = [0] * (r + 1)
        coeffs[n] = 1
        return LinearForm(tuple(coeffs), n)

    bounds = SequenceBounds.parse(f"{ratio}**n", f"{ratio}**(n - 1)", f"{ratio}",
                                  sigma=f"log({ratio})*(n + 1)")
    return FormSequence(produce, point, bounds, first_index=0, last_index=n_max,
                        name="synthetic_geometric",
                        spec=(spec or GeneratorSpec("synthetic_geometric", {"ratio": ratio})).to_json())


def adversarial_rational(x: Fraction, vanish_at: int, n_max: int,
                         spec: GeneratorSpec | None = None) -> FormSequence:
    """Forms at the rational point (1, p/q) that vanish from ``vanish_at`` on.

    Before ``vanish_at`` the form (1 - p, q) has value exactly 1; from then on
    (-p, q) has value exactly 0, so the nonvanishing hypothesis must fail.
    """
    p, q = x.numerator, x.denominator
    point = EvaluationPoint.of("1", str(x))

    def produce(n: int) -> LinearForm:
        return LinearForm((-p, q) if n >= vanish_at else (1 - p, q), n)

    bound = abs(p) + q + 1
    bounds = SequenceBounds.parse(str(bound), "1", "1")
    return FormSequence(produce, point, bounds, first_index=0, last_index=n_max,
                        name="adversarial_rational",
                        spec=(spec or GeneratorSpec("adversarial_rational",
                                                    {"point": x, "vanish_at": vanish_at})).to_json())


@dataclass(frozen=True)
class Generated:
    form: LinearForm
    point: EvaluationPoint
    bounds: SequenceBounds | None


def generate(spec: GeneratorSpec | str, n: int, **kwargs) -> Generated:
    """Form number n of a bundled sequence, with its point and bounds."""
    if isinstance(spec, str):
        spec = GeneratorSpec(spec)
    n_max = max(n, 8)
    n_min = kwargs.pop("n_min", None)
    if n_min is None:
        n_min = min(n, default_n_min(spec, n_max))
    seq = build_sequence(spec, n_min, n_max, **kwargs)
    return Generated(seq.form(n), seq.point, seq.bounds)


__all__ = [
    "GeneratorSpec", "Generated", "PolynomialSequence", "apery_form", "build_sequence",
    "classical_form", "generate", "lcm_upto", "lift_point", "lift_polynomial", "monomial_count",
    "monomial_lift", "monomials", "adversarial_rational", "synthetic_geometric",
    "pell_polynomials", "root_polynomials",
]
