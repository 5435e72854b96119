"""Checkers for the linear-independence, algebraic-independence and
transcendence criteria.

Exponent parameters are exact rationals; data-derived quantities are
certified intervals. Verdicts are three-valued (HOLDS / FAILS / INDETERMINATE).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import (
    IndeterminateSign,
    InconsistentExponents,
    InvalidDegrees,
    InvalidDelta,
    InvalidKappa,
    InvalidSpec,
    SingularSystem,
    VanishingForm,
    ZeroForm,
)
from .forms import EvaluationPoint, FormSequence, LinearForm, evaluate_form, form_length
from .numerics import (
    DEFAULT_PRECISION_CAP,
    RealInterval,
    Verdict,
    certified_compare,
    certified_sign,
    enclose_constant,
    evaluator,
)

Number = int | Fraction
Evaluable = RealInterval | int | Fraction | Callable[[int], RealInterval]

# estimates are reported on a 2^-48 grid, rounded in the safe direction
_ESTIMATE_GRID = 48


def rational(x) -> Fraction:
    """Exact rational from int, Fraction, decimal string or 'p/q'."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    try:
        return Fraction(str(x).strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidSpec(f"not a rational number: {x!r}") from None


def _ln2(p: int) -> RealInterval:
    return enclose_constant("log2", max(p, 8))


# ---------------------------------------------------------------------------
# exponent estimation and the dimension bound


@dataclass(frozen=True)
class ExponentSample:
    n: int
    log_abs: RealInterval
    sigma_n: RealInterval
    sigma_next: RealInterval

    def tau_at_n(self) -> RealInterval:
        return -self.log_abs / self.sigma_n

    def tau_at_next(self) -> RealInterval:
        return -self.log_abs / self.sigma_next


@dataclass
class ExponentEstimate:
    tau1_hat: Fraction
    tau2_hat: Fraction
    window: tuple[int, int]
    precision_bits: int
    samples: list[ExponentSample] = field(default_factory=list)

    @property
    def residuals(self) -> dict[int, tuple[float, float]]:
        """Per-n slack (tau1_hat - tau_n, tau'_n - tau2_hat), both >= 0."""
        out = {}
        for s in self.samples:
            out[s.n] = (float(self.tau1_hat - s.tau_at_n().upper),
                        float(s.tau_at_next().lower - self.tau2_hat))
        return out

    def to_json(self) -> dict:
        return {
            "tau1_hat": str(self.tau1_hat),
            "tau2_hat": str(self.tau2_hat),
            "tau1_hat_decimal": f"{float(self.tau1_hat):.12f}",
            "tau2_hat_decimal": f"{float(self.tau2_hat):.12f}",
            "window": list(self.window),
            "precision_bits": self.precision_bits,
            "residuals": {str(n): [f"{a:.6e}", f"{b:.6e}"] for n, (a, b) in self.residuals.items()},
        }

    def csv_rows(self) -> list[list[str]]:
        rows = [["n", "log_abs_L_lower", "log_abs_L_upper", "sigma_lower", "sigma_upper"]]
        for s in self.samples:
            rows.append([str(s.n), f"{float(s.log_abs.lower):.17g}", f"{float(s.log_abs.upper):.17g}",
                         f"{float(s.sigma_n.lower):.17g}", f"{float(s.sigma_n.upper):.17g}"])
        return rows


def _separated_abs(seq: FormSequence, n: int, p: int, cap: int) -> tuple[RealInterval, int]:
    """|L_n| at the first precision >= p whose enclosure excludes 0."""
    q = p
    while True:
        v = seq.value(n, q)
        s = v.sign()
        if s == 0:
            raise VanishingForm(f"L_{n}(xi) is exactly zero")
        if s is not None:
            return abs(v), q
        if q >= cap:
            raise IndeterminateSign(f"|L_{n}| not separated from 0 at {q} bits", precision=q)
        q = min(2 * q, cap)


def estimate_exponents(seq: FormSequence, window: tuple[int, int], precision_bits: int = 256, *,
                       sigma: Callable[[int, int], RealInterval] | None = None,
                       precision_cap: int = DEFAULT_PRECISION_CAP) -> ExponentEstimate:
    """Certified one-sided exponent estimates over a finite window.

    tau1_hat = max_n -log|L_n| / sigma(n), using upper endpoints;
    tau2_hat = min_n -log|L_n| / sigma(n+1), using lower endpoints.
    Default gauge: the sequence's sigma bound, else log Q_n from its bounds,
    else log(form length of L_n).
    """
    lo, hi = window
    if hi - lo + 1 < 8:
        raise ValueError("the estimation window needs at least 8 indices")
    p = precision_bits
    cap = max(precision_cap, p)
    if sigma is None:
        if seq.bounds is not None and seq.bounds.sigma is not None:
            sigma = lambda n, q: seq.bounds.value("sigma", n, q)  # noqa: E731
        elif seq.bounds is not None:
            sigma = lambda n, q: seq.bounds.value("Q", n, q).log(q)  # noqa: E731
        else:
            if not seq.has(hi + 1):
                raise ValueError(f"the form-length gauge needs L_{hi + 1}")
            sigma = lambda n, q: RealInterval.exact(form_length(seq.form(n))).log(q)  # noqa: E731
    samples = []
    t1 = t2 = None
    for n in range(lo, hi + 1):
        absL, q = _separated_abs(seq, n, p, cap)
        s_n, s_next = sigma(n, q), sigma(n + 1, q)
        if s_n.lower <= 0:
            raise ValueError(f"sigma({n}) must be positive")
        if s_next.upper < s_n.lower:
            raise ValueError(f"sigma decreases between {n} and {n + 1}")
        sample = ExponentSample(n, absL.log(q), s_n, s_next)
        samples.append(sample)
        a, b = sample.tau_at_n().upper, sample.tau_at_next().lower
        t1 = a if t1 is None else max(t1, a)
        t2 = b if t2 is None else min(t2, b)
    grid = Fraction(1, 1 << _ESTIMATE_GRID)
    t1 = Fraction(math.ceil(t1 / grid)) * grid
    t2 = Fraction(math.floor(t2 / grid)) * grid
    return ExponentEstimate(t1, t2, (lo, hi), p, samples)


@dataclass(frozen=True)
class DimensionBound:
    tau1: Fraction
    tau2: Fraction
    value: Fraction
    integer_bound: int
    max_ell: int
    m: int | None = None
    full_independence: bool | None = None

    def implies_dimension(self, ell: int) -> bool:
        """True when tau1 > (ell - 1) + (tau1 - tau2) * ell, i.e. dim >= ell + 1."""
        return self.tau1 > (ell - 1) + (self.tau1 - self.tau2) * ell

    def to_json(self) -> dict:
        out = {"tau1": str(self.tau1), "tau2": str(self.tau2), "value": str(self.value),
               "value_decimal": f"{float(self.value):.12f}", "integer_bound": self.integer_bound,
               "max_ell": self.max_ell}
        if self.m is not None:
            out["m"] = self.m
            out["full_independence"] = self.full_independence
        return out


def nesterenko_dim_bound(tau1, tau2, m: int | None = None) -> DimensionBound:
    """Lower bound (1 + tau1) / (1 + tau1 - tau2) for the dimension of the
    rational span of 1, theta_1, ..., theta_m."""
    t1, t2 = rational(tau1), rational(tau2)
    if not (t1 >= t2 > 0):
        raise InconsistentExponents(f"need tau1 >= tau2 > 0, got tau1={t1}, tau2={t2}")
    value = (1 + t1) / (1 + t1 - t2)
    integer = math.ceil(value)
    full = None
    if m is not None:
        if m < 1:
            raise ValueError("m must be positive")
        full = t1 > (m - 1) + m * (t1 - t2)
    return DimensionBound(t1, t2, value, integer, integer - 1, m, full)


# ---------------------------------------------------------------------------
# main criterion conclusion


@dataclass(frozen=True)
class ConclusionCheck:
    n: int
    verdict: Verdict
    r_n: int
    sharper: Verdict | None = None
    pivot: int | None = None

    def to_json(self) -> dict:
        out = {"n": self.n, "r_n": self.r_n, "verdict": self.verdict.value}
        if self.sharper is not None:
            out["pivot"] = self.pivot
            out["sharper_verdict"] = self.sharper.value
        return out


def main_conclusion_check(n: int, r_n: int, A_n: Evaluable, B_n: Evaluable, Q_n: Evaluable, *,
                          pivot: tuple[int, Evaluable, Evaluable] | None = None,
                          precision_bits: int = 64,
                          precision_cap: int = DEFAULT_PRECISION_CAP) -> ConclusionCheck:
    """A_n <= 2^(r_n + 1) (B_n Q_n)^r_n, and optionally A_n <= 2 (2 B_k Q_k)^r_n.

    ``pivot`` is (k, B_k, Q_k).
    """
    if r_n < 0:
        raise ValueError("r_n must be non-negative")
    a, b, q = evaluator(A_n), evaluator(B_n), evaluator(Q_n)
    rhs = lambda p: (b(p) * q(p)) ** r_n * (1 << (r_n + 1))  # noqa: E731
    kw = dict(precision=precision_bits, precision_cap=max(precision_cap, precision_bits))
    verdict = certified_compare(a, "<=", rhs, **kw)
    sharper = k = None
    if pivot is not None:
        k, bk, qk = pivot[0], evaluator(pivot[1]), evaluator(pivot[2])
        sharper = certified_compare(a, "<=", lambda p: (2 * bk(p) * qk(p)) ** r_n * 2, **kw)
    return ConclusionCheck(n, verdict, r_n, sharper, k)


# ---------------------------------------------------------------------------
# algebraic independence corollaries


@dataclass(frozen=True)
class InequalityCheck:
    verdict: Verdict
    lhs: str
    rhs: str
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "lhs": self.lhs, "rhs": self.rhs,
                **{k: str(v) for k, v in self.details.items()}}


def _leq(lhs: Fraction, rhs: Fraction, **details) -> InequalityCheck:
    return InequalityCheck(Verdict.of(lhs <= rhs), str(lhs), str(rhs), details)


def _positive_int(name: str, v) -> int:
    if isinstance(v, bool) or int(v) != v or int(v) < 1:
        raise InvalidSpec(f"{name} must be a positive integer")
    return int(v)


def coralg_conclusion_check(n: int, t: int, d_n: int, alpha_n, beta_n, gamma_prev, gamma_n, *,
                            next_values: tuple | None = None, precision_bits: int = 64,
                            precision_cap: int = DEFAULT_PRECISION_CAP) -> InequalityCheck:
    """gamma_n <= log 2 + (C(d_n + t, t) - 1)(alpha_n + beta_n - gamma_{n-1} + log 2).

    ``next_values`` = (alpha_{n+1}, beta_{n+1}) additionally checks the
    monotonicity hypothesis alpha_n + beta_n - gamma_{n-1} <= alpha_{n+1} + beta_{n+1} - gamma_n.
    """
    t, d_n = _positive_int("t", t), _positive_int("d_n", d_n)
    a, b, gp, g = (rational(x) for x in (alpha_n, beta_n, gamma_prev, gamma_n))
    mult = math.comb(d_n + t, t) - 1
    core = a + b - gp
    rhs = lambda p: _ln2(p) + mult * (core + _ln2(p))  # noqa: E731
    verdict = certified_compare(g, "<=", rhs, precision=precision_bits,
                                precision_cap=max(precision_cap, precision_bits))
    details = {"n": n, "multiplier": mult, "binomial": mult + 1}
    if next_values is not None:
        a1, b1 = (rational(x) for x in next_values)
        details["monotone_hypothesis"] = Verdict.of(core <= a1 + b1 - g).value
    return InequalityCheck(verdict, str(g), f"log2 + {mult}*({core} + log2)", details)


def coralg0_bound(t: int, d: int, tau1, tau2) -> InequalityCheck:
    """tau2 <= (C(d + t, t) - 1)(1 + tau1 - tau2)."""
    t, d = _positive_int("t", t), _positive_int("d", d)
    t1, t2 = rational(tau1), rational(tau2)
    mult = math.comb(d + t, t) - 1
    return _leq(t2, mult * (1 + t1 - t2), multiplier=mult)


def coralg1_bound(t: int, delta, kappa, lam, alpha, beta, gamma) -> InequalityCheck:
    """Degree-growing case: branch on kappa = 1/t or kappa < 1/t."""
    t = _positive_int("t", t)
    dl, k, lm, a, b, g = (rational(x) for x in (delta, kappa, lam, alpha, beta, gamma))
    if k <= 0 or k > Fraction(1, t):
        raise InvalidKappa(f"kappa must satisfy 0 < kappa <= 1/{t}, got {k}")
    if dl <= 0 or lm <= 0 or b <= 0:
        raise InvalidSpec("delta, lambda and beta must be positive")
    scale = dl ** t / math.factorial(t)
    rhs = scale * (a + b - g)
    if k == Fraction(1, t):
        return _leq(lm * (1 - 2 * scale), rhs, branch="kappa = 1/t")
    return _leq(lm, rhs, branch="kappa < 1/t")


@dataclass(frozen=True)
class KappaCheck:
    verdict: Verdict
    inequality: InequalityCheck
    increments: dict[int, Verdict]
    growth: dict

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "inequality": self.inequality.to_json(),
                "increments": {str(n): v.value for n, v in self.increments.items()},
                "growth": self.growth}


def kappa_bound(t: int, kappa, lam, beta, degrees: Mapping[int, int] | Sequence[int] | None = None
                ) -> KappaCheck:
    """lambda (t! - kappa) <= beta, with the increment hypothesis
    d_n^t - d_{n-1}^t <= kappa checked on an optional degree table."""
    t = _positive_int("t", t)
    k, lm, b = rational(kappa), rational(lam), rational(beta)
    ineq = _leq(lm * (math.factorial(t) - k), b)
    if degrees is None:
        table: dict[int, int] = {}
    elif isinstance(degrees, Mapping):
        table = {int(n): int(d) for n, d in degrees.items()}
    else:
        table = dict(enumerate(int(d) for d in degrees))
    increments = {n: Verdict.of(table[n] ** t - table[n - 1] ** t <= k)
                  for n in sorted(table) if n - 1 in table}
    # finite-range view of d_n = o(n^(1/t)): d_n^t / n should trend to 0
    ratios = {n: Fraction(d ** t, n) for n, d in sorted(table.items()) if n > 0}
    vals = list(ratios.values())
    half = vals[len(vals) // 2:]
    growth = {"quantity": "d_n^t / n", "values": {str(n): f"{float(v):.6g}" for n, v in ratios.items()},
              "tail_non_increasing": all(x >= y for x, y in zip(half, half[1:])),
              "conclusive": False}
    verdict = Verdict.combine([ineq.verdict, *increments.values()])
    return KappaCheck(verdict, ineq, increments, growth)


@dataclass(frozen=True)
class DepAlgRecord:
    t: int
    d: int
    delta: int
    total: int
    kernel_lower: int
    image_upper: int
    threshold: int
    ratio: Fraction | None
    verdict: Verdict | None
    implied_dimension: Fraction | None

    def to_json(self) -> dict:
        out = {"t": self.t, "d": self.d, "delta": self.delta, "monomials": self.total,
               "kernel_lower_bound": self.kernel_lower, "image_upper_bound": self.image_upper,
               "threshold": self.threshold}
        if self.verdict is not None:
            out.update(ratio=str(self.ratio), verdict=self.verdict.value,
                       implied_dimension=str(self.implied_dimension),
                       conclusion=("no algebraic relation of degree <= %d" % self.delta
                                   if self.verdict is Verdict.HOLDS else "inconclusive"))
        return out


def depalg_threshold(t: int, d: int, delta: int, tau=None, eta=None) -> DepAlgRecord:
    """Threshold C(t+d, t) - C(t+d-delta, t) - 1 for tau/(1+eta).

    With tau and eta given, the verdict HOLDS when tau/(1+eta) exceeds the
    threshold strictly: the span of monomials of degree <= d then has
    dimension at least 1 + tau/(1+eta), more than a degree-delta relation allows.
    """
    t, d, delta = _positive_int("t", t), _positive_int("d", d), _positive_int("delta", delta)
    if delta > d:
        raise InvalidDegrees(f"need d >= delta, got d={d}, delta={delta}")
    total = math.comb(t + d, t)
    kernel = math.comb(t + d - delta, t)
    threshold = total - kernel - 1
    ratio = verdict = implied = None
    if tau is not None:
        ta, et = rational(tau), rational(eta if eta is not None else 0)
        if ta <= 0 or et < 0:
            raise InvalidSpec("tau must be positive and eta non-negative")
        ratio = ta / (1 + et)
        verdict = Verdict.of(ratio > threshold)
        implied = nesterenko_dim_bound(ta + et, ta).value
    return DepAlgRecord(t, d, delta, total, kernel, total - kernel, threshold, ratio, verdict, implied)


@dataclass(frozen=True)
class AlgIndepReport:
    verdict: str
    largest_delta: int
    witnesses: dict[int, int]
    divergence: dict

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "largest_delta_excluded": self.largest_delta,
                "witnesses": {str(k): v for k, v in self.witnesses.items()},
                "divergence": self.divergence}


def _table(f, d):
    return rational(f(d) if callable(f) else f[d])


def algindep_verdict(t: int, tau, eta, d_range: tuple[int, int]) -> AlgIndepReport:
    """Finite-range replay of the algebraic independence criterion.

    For each delta = 1, 2, ... finds a degree d in range with
    tau_d/(1+eta_d) above the exact threshold. The limit hypothesis
    tau_d / (d^(t-1)(1+eta_d)) -> infinity is reported as a trend only;
    the verdict is SUPPORTED when that trend is strictly increasing over
    the range, otherwise INCONCLUSIVE.
    """
    t = _positive_int("t", t)
    lo, hi = d_range
    if lo < 1 or hi < lo:
        raise InvalidSpec("d_range must be a finite range of positive integers")
    ratios = {d: _table(tau, d) / (1 + _table(eta, d)) for d in range(lo, hi + 1)}
    witnesses: dict[int, int] = {}
    delta = 1
    while delta <= hi:
        hit = next((d for d in range(max(lo, delta), hi + 1)
                    if ratios[d] > depalg_threshold(t, d, delta).threshold), None)
        if hit is None:
            break
        witnesses[delta] = hit
        delta += 1
    div = {d: r / d ** (t - 1) for d, r in ratios.items()}
    seq = list(div.values())
    increasing = len(seq) > 1 and all(a < b for a, b in zip(seq, seq[1:]))
    return AlgIndepReport("SUPPORTED" if increasing else "INCONCLUSIVE", delta - 1, witnesses,
                          {"quantity": "tau_d / (d^(t-1) (1 + eta_d))",
                           "values": {str(d): f"{float(v):.6g}" for d, v in div.items()},
                           "strictly_increasing": increasing, "conclusive": False})


# ---------------------------------------------------------------------------
# transcendence corollaries


def _cor8_scalar(d_n, alpha_n, beta_n, gamma_prev, gamma_n, precision_bits, precision_cap):
    d_n = _positive_int("d_n", d_n)
    a, b, gp, g = (rational(x) for x in (alpha_n, beta_n, gamma_prev, gamma_n))
    core = a + b - gp
    v = certified_compare(g, "<=", lambda p: _ln2(p) + d_n * (core + _ln2(p)),
                          precision=precision_bits, precision_cap=max(precision_cap, precision_bits))
    return InequalityCheck(v, str(g), f"log2 + {d_n}*({core} + log2)", {"multiplier": d_n})


def transcendence_check(mode: str, *, precision_bits: int = 64,
                        precision_cap: int = DEFAULT_PRECISION_CAP, **params) -> InequalityCheck:
    """Transcendence criteria.

    cor8:  gamma_n <= log 2 + d_n (alpha_n + beta_n - gamma_{n-1} + log 2); scalars
           (d_n, alpha_n, beta_n, gamma_prev, gamma_n) or tables (d, alpha, beta, gamma).
    cor9:  tau2 <= d + d (tau1 - tau2); params d, tau1, tau2.
    cor10: lambda (1 - 2 delta) <= delta (alpha + beta - gamma), delta < 1/2;
           params delta, lam and scalars or per-n tables alpha, beta, gamma.
    """
    if mode == "cor8":
        if "gamma" in params:
            d, a, b, g = (params[k] for k in ("d", "alpha", "beta", "gamma"))
            per_n = {}
            for n in sorted(int(k) for k in g):
                if n - 1 in g and n in d and n in a and n in b:
                    per_n[n] = _cor8_scalar(d[n], a[n], b[n], g[n - 1], g[n],
                                            precision_bits, precision_cap)
            if not per_n:
                raise InvalidSpec("cor8 tables give no index with gamma_{n-1} available")
            verdict = Verdict.combine(c.verdict for c in per_n.values())
            failing = [n for n, c in per_n.items() if c.verdict is Verdict.FAILS]
            return InequalityCheck(verdict, "gamma_n", "log2 + d_n*(alpha_n + beta_n - gamma_{n-1} + log2)",
                                   {"per_n": {n: c.verdict.value for n, c in per_n.items()},
                                    "first_failure": failing[0] if failing else None})
        return _cor8_scalar(params["d_n"], params["alpha_n"], params["beta_n"], params["gamma_prev"],
                            params["gamma_n"], precision_bits, precision_cap)
    if mode == "cor9":
        d = _positive_int("d", params["d"])
        t1, t2 = rational(params["tau1"]), rational(params["tau2"])
        return _leq(t2, d + d * (t1 - t2), multiplier=d)
    if mode == "cor10":
        dl = rational(params["delta"])
        if dl >= Fraction(1, 2):
            raise InvalidDelta(f"delta must be < 1/2, got {dl}")
        if dl <= 0:
            raise InvalidDelta("delta must be positive")
        lm = rational(params["lam"])
        a, b, g = (params[k] for k in ("alpha", "beta", "gamma"))
        if isinstance(g, Mapping):
            # per-n tables alpha_n, beta_n, gamma_n
            per_n = {int(n): _leq(lm * (1 - 2 * dl), dl * (rational(a[n]) + rational(b[n]) - rational(g[n])))
                     for n in sorted(g, key=int) if n in a and n in b}
            if not per_n:
                raise InvalidSpec("cor10 tables share no index")
            failing = [n for n, c in per_n.items() if c.verdict is Verdict.FAILS]
            return InequalityCheck(Verdict.combine(c.verdict for c in per_n.values()),
                                   f"{lm * (1 - 2 * dl)}", "delta*(alpha_n + beta_n - gamma_n)",
                                   {"per_n": {n: c.verdict.value for n, c in per_n.items()},
                                    "first_failure": failing[0] if failing else None})
        return _leq(lm * (1 - 2 * dl), dl * (rational(a) + rational(b) - rational(g)))
    raise InvalidSpec(f"unknown transcendence mode {mode!r}")


@dataclass(frozen=True)
class GelfondComparison:
    laurent_roy: Verdict
    two_sided: Verdict

    def to_json(self) -> dict:
        return {"alpha_le_3d_beta": self.laurent_roy.value, "alpha_le_d_beta": self.two_sided.value}


def gelfond_compare(d: int, alpha, beta) -> GelfondComparison:
    """alpha <= 3 d beta (one-sided bound) next to alpha <= d beta (two-sided)."""
    d = _positive_int("d", d)
    a, b = rational(alpha), rational(beta)
    return GelfondComparison(Verdict.of(a <= 3 * d * b), Verdict.of(a <= d * b))


# ---------------------------------------------------------------------------
# Siegel's criterion


def determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    m = [list(map(int, row)) for row in matrix]
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def minor(matrix: Sequence[Sequence[int]], i: int, j: int) -> int:
    return determinant([row[:j] + row[j + 1:] for r, row in enumerate(map(list, matrix)) if r != i])


@dataclass
class SiegelReport:
    verdict: Verdict
    m: int
    height: int
    determinant: int
    smallness: list[Verdict]
    epsilon: Fraction
    target_height: int | None = None
    epsilon_threshold: Fraction | None = None
    chosen_rows: tuple[int, ...] | None = None
    system_determinant: int | None = None
    steps: list[tuple[str, Verdict]] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"verdict": self.verdict.value, "m": self.m, "A": str(self.height),
               "determinant": str(self.determinant), "epsilon": str(self.epsilon),
               "smallness": [v.value for v in self.smallness]}
        if self.target_height is not None:
            out.update(H=str(self.target_height), epsilon_threshold=str(self.epsilon_threshold),
                       chosen_rows=list(self.chosen_rows), target_determinant=str(self.system_determinant),
                       steps={k: v.value for k, v in self.steps})
        return out


def siegel_verify(system: Sequence[Sequence[int]], point: EvaluationPoint, epsilon, precision_bits: int = 64,
                  target: Sequence[int] | LinearForm | None = None, *,
                  precision_cap: int = DEFAULT_PRECISION_CAP) -> SiegelReport:
    """Check Siegel's hypotheses on a complete system and replay the proof for ``target``.

    The replay picks the first m rows (in lexicographic order of index sets)
    that together with the target form a nonsingular matrix M, then certifies

        |det M| >= 1,
        minor bounds |M_{0,j}| <= m! A^m and |M_{i,j}| <= m! H A^(m-1),
        det M = sum_i (-1)^i L_i(xi) M_{i,0} (expansion along the first column),
        1/m! <= |L(xi)| A^m + sum |L_{k_i}(xi)| H A^(m-1) <= |L(xi)| A^m + eps m H,
        eps m H < 1/m! (only when eps < 1/(m! m H)),
    and hence L(xi) != 0.
    """
    rows = [list(map(int, r)) for r in system]
    size = len(rows)
    m = size - 1
    if m < 1 or any(len(r) != size for r in rows):
        raise InvalidSpec("a Siegel system needs m+1 forms in m+1 variables, m >= 1")
    if len(point) != size:
        raise InvalidSpec(f"point has {len(point)} coordinates, system needs {size}")
    eps = rational(epsilon)
    if eps <= 0:
        raise InvalidSpec("epsilon must be positive")
    det = determinant(rows)
    if det == 0:
        raise SingularSystem("the system's determinant is zero")
    A = max(abs(x) for r in rows for x in r)
    p = precision_bits
    cap = max(precision_cap, p)
    kw = dict(precision=p, precision_cap=cap)
    values = [lambda q, r=r: evaluate_form(LinearForm(tuple(r)), point, q) for r in rows]
    small = [certified_compare(lambda q, f=f: abs(f(q)), "<=", eps / Fraction(A) ** (m - 1), **kw)
             for f in values]
    report = SiegelReport(Verdict.combine(small), m, A, det, small, eps)
    if target is None:
        return report

    a = list(target.coefficients if isinstance(target, LinearForm) else map(int, target))
    if len(a) != size:
        raise InvalidSpec("target form has the wrong number of coefficients")
    if not any(a):
        raise ZeroForm("target form is zero")
    H = max(abs(x) for x in a)
    fact = math.factorial(m)
    threshold = Fraction(1, fact * m * H)
    chosen = None
    for combo in itertools.combinations(range(size), m):
        M = [a] + [rows[i] for i in combo]
        if determinant(M) != 0:
            chosen = combo
            break
    assert chosen is not None  # rows are a basis, so some m of them complete a
    M = [a] + [rows[i] for i in chosen]
    D = determinant(M)
    steps: list[tuple[str, Verdict]] = []
    steps.append(("abs_det_ge_1", Verdict.of(abs(D) >= 1)))
    minors_ok = all(abs(minor(M, 0, j)) <= fact * A ** m for j in range(size)) and all(
        abs(minor(M, i, j)) <= fact * H * A ** (m - 1) for i in range(1, size) for j in range(size))
    steps.append(("minor_bounds", Verdict.of(minors_ok)))
    target_val = lambda q: evaluate_form(LinearForm(tuple(a)), point, q)  # noqa: E731
    forms_val = [target_val] + [values[i] for i in chosen]
    cof = [(-1) ** i * minor(M, i, 0) for i in range(size)]
    expansion = sum((c * f(p) for c, f in zip(cof, forms_val)), RealInterval.exact(0))
    steps.append(("expansion_contains_det", Verdict.of(expansion.contains(D))))
    chain_upper = lambda q: abs(target_val(q)) * A ** m + sum(  # noqa: E731
        (abs(values[i](q)) for i in chosen), RealInterval.exact(0)) * (H * A ** (m - 1))
    steps.append(("lower_chain", certified_compare(Fraction(1, fact), "<=", chain_upper, **kw)))
    steps.append(("smallness_chain", certified_compare(
        lambda q: sum((abs(values[i](q)) for i in chosen), RealInterval.exact(0)) * (H * A ** (m - 1)),
        "<=", eps * m * H, **kw)))
    if eps < threshold:
        steps.append(("strict_chain", Verdict.of(eps * m * H < Fraction(1, fact))))
        try:
            nz = certified_sign(target_val, cap, precision=p)
            steps.append(("target_nonzero", Verdict.of(nz != 0)))
        except IndeterminateSign:
            steps.append(("target_nonzero", Verdict.INDETERMINATE))
    else:
        steps.append(("strict_chain", Verdict.INDETERMINATE))
    report.target_height = H
    report.epsilon_threshold = threshold
    report.chosen_rows = chosen
    report.system_determinant = D
    report.steps = steps
    report.verdict = Verdict.combine([report.verdict, *(v for _, v in steps)])
    return report


__all__ = [
    "AlgIndepReport", "ConclusionCheck", "DepAlgRecord", "DimensionBound", "ExponentEstimate",
    "GelfondComparison", "InequalityCheck", "KappaCheck", "SiegelReport", "algindep_verdict",
    "coralg0_bound", "coralg1_bound", "coralg_conclusion_check", "depalg_threshold", "determinant",
    "estimate_exponents", "gelfond_compare", "kappa_bound", "main_conclusion_check",
    "nesterenko_dim_bound", "rational", "siegel_verify", "transcendence_check",
]
