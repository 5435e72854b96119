"""Certified real arithmetic.

Intervals carry rational endpoints. Ring operations (+, -, *) and integer
powers are exact; everything else (division of inexact values, log, exp,
roots) is rounded outward to a dyadic grid, so every containment check is an
exact rational comparison.

Transcendental constants come from fixed-point series whose truncation and
rounding errors are tracked explicitly:

* ``sqrt2``: integer square root, error below one unit in the last place.
* ``log2``: 2 atanh(1/3); terms decay like 9^-k, the tail after the first
  vanishing term is below 16/9 ulp.
* ``pi``: Machin's formula 16 atan(1/5) - 4 atan(1/239), alternating tails.
* ``e``: sum of 1/k!, tail bounded by twice the last term.
* ``zeta3``: (5/2) sum (-1)^(k+1) / (k^3 binom(2k, k)), alternating with
  decreasing terms, so the tail is below the first omitted term.
* ``zeta2``: pi^2 / 6 computed from the pi enclosure.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from enum import Enum, IntEnum
from fractions import Fraction
from typing import Callable, Iterable, Union

from .errors import IndeterminateSign, UnknownConstant

Number = Union[int, Fraction]

DEFAULT_PRECISION_CAP = 1 << 20
MIN_CONSTANT_PRECISION = 8
_GUARD = 32
_LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# dyadic rounding


def round_down(x: Fraction, bits: int) -> Fraction:
    """Round toward -inf onto a grid with about ``bits`` significant bits."""
    num, den = x.numerator, x.denominator
    if num == 0:
        return x
    if den & (den - 1) == 0 and abs(num).bit_length() <= bits:
        return x
    shift = bits - (abs(num).bit_length() - den.bit_length())
    if shift >= 0:
        return Fraction((num << shift) // den, 1 << shift)
    return Fraction((num // (den << -shift)) << -shift)


def round_up(x: Fraction, bits: int) -> Fraction:
    return -round_down(-x, bits)


def _floor_scaled(q: Fraction, shift: int) -> int:
    """floor(q * 2^shift)."""
    if shift >= 0:
        return (q.numerator << shift) // q.denominator
    return q.numerator // (q.denominator << -shift)


def _ceil_scaled(q: Fraction, shift: int) -> int:
    return -_floor_scaled(-q, shift)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


# ---------------------------------------------------------------------------
# intervals


@dataclass(frozen=True, slots=True)
class RealInterval:
    """Closed interval [lower, upper] with exact rational endpoints.

    ``precision_bits`` records the working precision that produced the
    enclosure; 0 marks values that were never rounded.
    """

    lower: Fraction
    upper: Fraction
    precision_bits: int = 0

    def __post_init__(self):
        if not isinstance(self.lower, Fraction):
            object.__setattr__(self, "lower", _as_fraction(self.lower))
        if not isinstance(self.upper, Fraction):
            object.__setattr__(self, "upper", _as_fraction(self.upper))
        if self.lower > self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}]")

    @classmethod
    def exact(cls, value: Number, precision_bits: int = 0) -> "RealInterval":
        v = _as_fraction(value)
        return cls(v, v, precision_bits)

    @property
    def is_exact(self) -> bool:
        return self.lower == self.upper

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def __float__(self) -> float:
        return float(self.midpoint)

    def contains(self, other) -> bool:
        if isinstance(other, RealInterval):
            return self.lower <= other.lower and other.upper <= self.upper
        v = _as_fraction(other)
        return self.lower <= v <= self.upper

    __contains__ = contains

    def sign(self) -> int | None:
        """-1, 0 or 1 when the enclosure decides the sign, else None."""
        if self.lower > 0:
            return 1
        if self.upper < 0:
            return -1
        if self.lower == 0 and self.upper == 0:
            return 0
        return None

    # -- ring operations (exact) -------------------------------------------

    @staticmethod
    def _coerce(other) -> "RealInterval | None":
        if isinstance(other, RealInterval):
            return other
        if isinstance(other, (int, Fraction)):
            return RealInterval.exact(other)
        return None

    def __neg__(self) -> "RealInterval":
        return RealInterval(-self.upper, -self.lower, self.precision_bits)

    def __abs__(self) -> "RealInterval":
        if self.lower >= 0:
            return self
        if self.upper <= 0:
            return -self
        return RealInterval(Fraction(0), max(-self.lower, self.upper), self.precision_bits)

    def abs(self) -> "RealInterval":
        return abs(self)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RealInterval(self.lower + o.lower, self.upper + o.upper,
                            max(self.precision_bits, o.precision_bits))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RealInterval(self.lower - o.upper, self.upper - o.lower,
                            max(self.precision_bits, o.precision_bits))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = max(self.precision_bits, o.precision_bits)
        if o.is_exact:
            c = o.lower
            if c >= 0:
                return RealInterval(self.lower * c, self.upper * c, p)
            return RealInterval(self.upper * c, self.lower * c, p)
        if self.is_exact:
            return o * self
        prods = (self.lower * o.lower, self.lower * o.upper,
                 self.upper * o.lower, self.upper * o.upper)
        return RealInterval(min(prods), max(prods), p)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RealInterval":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return RealInterval.exact(1) / (self ** -k)
        if k == 0:
            return RealInterval.exact(1, self.precision_bits)
        lo, hi = self.lower ** k, self.upper ** k
        if k % 2:
            return RealInterval(lo, hi, self.precision_bits)
        if self.lower >= 0:
            return RealInterval(lo, hi, self.precision_bits)
        if self.upper <= 0:
            return RealInterval(hi, lo, self.precision_bits)
        return RealInterval(Fraction(0), max(lo, hi), self.precision_bits)

    # -- rounded operations -------------------------------------------------

    def rounded(self, bits: int) -> "RealInterval":
        """Outward rounding onto ``bits`` significant bits."""
        if self.is_exact and self.lower.denominator & (self.lower.denominator - 1) == 0 \
                and abs(self.lower.numerator).bit_length() <= bits:
            return self
        return RealInterval(round_down(self.lower, bits), round_up(self.upper, bits), bits)

    def _working_bits(self, other: "RealInterval | None" = None, bits: int | None = None) -> int:
        if bits:
            return bits
        p = self.precision_bits
        if other is not None:
            p = max(p, other.precision_bits)
        return p or 64

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.lower <= 0 <= o.upper:
            raise ZeroDivisionError("interval divisor contains 0")
        if self.is_exact and o.is_exact:
            return RealInterval.exact(self.lower / o.lower)
        bits = self._working_bits(o)
        quots = (self.lower / o.lower, self.lower / o.upper,
                 self.upper / o.lower, self.upper / o.upper)
        return RealInterval(round_down(min(quots), bits), round_up(max(quots), bits), bits)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def log(self, bits: int | None = None) -> "RealInterval":
        """Natural logarithm of a positive interval."""
        if self.lower <= 0:
            raise ValueError("log of an interval that is not strictly positive")
        if self.is_exact and self.lower == 1:
            return RealInterval.exact(0)
        bits = self._working_bits(bits=bits)
        w = bits + _GUARD
        lo_q = round_down(self.lower, w)
        hi_q = round_up(self.upper, w)
        s, e = _log_fixed(lo_q, w)
        lo = Fraction(s - e, 1 << w)
        if hi_q != lo_q:
            s, e = _log_fixed(hi_q, w)
        hi = Fraction(s + e, 1 << w)
        return RealInterval(round_down(lo, bits), round_up(hi, bits), bits)

    def exp(self, bits: int | None = None) -> "RealInterval":
        if self.is_exact and self.lower == 0:
            return RealInterval.exact(1)
        bits = self._working_bits(bits=bits)
        w = bits + _GUARD
        lo, _ = _exp_bounds(round_down(self.lower, w), w)
        if self.is_exact:
            _, hi = _exp_bounds(self.lower, w)
        else:
            _, hi = _exp_bounds(round_up(self.upper, w), w)
        return RealInterval(round_down(lo, bits), round_up(hi, bits), bits)

    def root(self, r: int, bits: int | None = None) -> "RealInterval":
        """Positive r-th root by integer bisection on y -> y^r."""
        if r < 1:
            raise ValueError("root order must be positive")
        if self.lower < 0:
            raise ValueError("root of an interval with negative part")
        if r == 1:
            return self
        bits = self._working_bits(bits=bits)
        lo = _root_bound(self.lower, r, bits, upward=False)
        hi = _root_bound(self.upper, r, bits, upward=True)
        return RealInterval(lo, hi, bits)

    def __repr__(self) -> str:
        if self.is_exact:
            return f"RealInterval.exact({self.lower})"
        return f"RealInterval([{float(self.lower)!r}, {float(self.upper)!r}], {self.precision_bits} bits)"


def interval(value) -> RealInterval:
    """Coerce an int, Fraction or RealInterval into a RealInterval."""
    if isinstance(value, RealInterval):
        return value
    return RealInterval.exact(value)


# ---------------------------------------------------------------------------
# fixed-point series; each returns (approx, err) with
# |value * 2^w - approx| <= err


def _atanh_fixed(num: int, den: int, w: int) -> tuple[int, int]:
    # 0 <= num/den <= 1/2; the truncated power carries error < 4/3 ulp
    z2n, z2d = num * num, den * den
    term = (num << w) // den
    total = 0
    k = 0
    while term:
        total += term // (2 * k + 1)
        term = term * z2n // z2d
        k += 1
    return total, 3 * k + 3


def _log2_raw(w: int) -> tuple[int, int]:
    s, e = _atanh_fixed(1, 3, w)
    return 2 * s, 2 * e


def _atan_inv_fixed(n: int, w: int) -> tuple[int, int]:
    n2 = n * n
    power = (1 << w) // n
    total = 0
    k = 0
    while power:
        t = power // (2 * k + 1)
        total += -t if k & 1 else t
        power //= n2
        k += 1
    return total, 3 * k + 4


def _pi_raw(w: int) -> tuple[int, int]:
    a, ea = _atan_inv_fixed(5, w)
    b, eb = _atan_inv_fixed(239, w)
    return 16 * a - 4 * b, 16 * ea + 4 * eb


def _e_raw(w: int) -> tuple[int, int]:
    term = 1 << w
    total = term
    k = 1
    while term:
        term //= k
        total += term
        k += 1
    return total, 2 * k + 6


def _zeta3_raw(w: int) -> tuple[int, int]:
    central = 1
    total = 0
    k = 1
    one = 1 << w
    while True:
        central = central * (2 * k) * (2 * k - 1) // (k * k)
        t = one // (k ** 3 * central)
        if not t:
            break
        total += t if k & 1 else -t
        k += 1
    return (5 * total) // 2, (5 * (k + 2)) // 2 + 2


def _sqrt2_raw(w: int) -> tuple[int, int]:
    return math.isqrt(2 << (2 * w)), 1


def _zeta2_raw(w: int) -> tuple[int, int]:
    s, e = _pi_raw(w)
    den = 6 << w
    lo = (s - e) ** 2 // den
    hi = -((-(s + e) ** 2) // den)
    return (lo + hi) // 2, (hi - lo) // 2 + 1


_SERIES: dict[str, Callable[[int], tuple[int, int]]] = {
    "sqrt2": _sqrt2_raw,
    "log2": _log2_raw,
    "zeta2": _zeta2_raw,
    "zeta3": _zeta3_raw,
    "e": _e_raw,
    "pi": _pi_raw,
}

_RATIONALS: dict[str, Fraction] = {"one": Fraction(1)}
_registry_lock = threading.Lock()
_cache_lock = threading.Lock()
_fixed_cache: dict[tuple[str, int], tuple[int, int]] = {}


def _fixed(name: str, w: int) -> tuple[int, int]:
    """Cached fixed-point value of a series constant at w fractional bits."""
    wc = -(-w // 256) * 256
    key = (name, wc)
    with _cache_lock:
        hit = _fixed_cache.get(key)
    if hit is None:
        hit = _SERIES[name](wc)
        with _cache_lock:
            _fixed_cache[key] = hit
    s, e = hit
    d = wc - w
    if d == 0:
        return s, e
    return s >> d, (e >> d) + 2


def _log2_fixed(w: int) -> tuple[int, int]:
    return _fixed("log2", w)


def _log_fixed(q: Fraction, w: int) -> tuple[int, int]:
    num, den = q.numerator, q.denominator
    e = num.bit_length() - den.bit_length()
    if e >= 0:
        mn, md = num, den << e
    else:
        mn, md = num << -e, den
    zn, zd = mn - md, mn + md
    s, err = _atanh_fixed(abs(zn), zd, w)
    s, err = 2 * s, 2 * err
    if zn < 0:
        s = -s
    if e:
        g = abs(e).bit_length() + 1
        l2, el2 = _log2_fixed(w + g)
        s += (e * l2) >> g
        err += ((abs(e) * el2) >> g) + 2
    return s, err


def _exp_unit(t: Fraction, w: int) -> tuple[Fraction, Fraction]:
    """Bounds for exp(t), |t| <= 1."""
    neg = t < 0
    num, den = abs(t.numerator), t.denominator
    term = 1 << w
    total = term
    k = 1
    while term:
        term = term * num // (den * k)
        total += term
        k += 1
    err = 2 * k + 4
    lo, hi = Fraction(total - err, 1 << w), Fraction(total + err, 1 << w)
    if neg:
        return 1 / hi, 1 / lo
    return lo, hi


def _exp_bounds(t: Fraction, w: int) -> tuple[Fraction, Fraction]:
    """Lower and upper bounds for exp(t), relative accuracy about 2^-w."""
    if t == 0:
        return Fraction(1), Fraction(1)
    k = math.floor(float(t) / _LN2)
    if k == 0:
        return _exp_unit(t, w)
    g = abs(k).bit_length() + 4
    l2, el2 = _log2_fixed(w + g)
    scale = 1 << (w + g)
    l2lo, l2hi = Fraction(l2 - el2, scale), Fraction(l2 + el2, scale)
    if k > 0:
        s_lo, s_hi = t - k * l2hi, t - k * l2lo
    else:
        s_lo, s_hi = t - k * l2lo, t - k * l2hi
    lo, _ = _exp_unit(round_down(s_lo, w), w)
    _, hi = _exp_unit(round_up(s_hi, w), w)
    factor = Fraction(2) ** k
    return lo * factor, hi * factor


def _iroot_floor(n: int, r: int) -> int:
    """floor(n^(1/r)) for n >= 0 by bisection."""
    if n < 2:
        return n
    lo, hi = 0, 1 << (n.bit_length() // r + 1)
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if mid ** r <= n:
            lo = mid
        else:
            hi = mid
    return lo


def _root_bound(q: Fraction, r: int, bits: int, upward: bool) -> Fraction:
    if q == 0:
        return Fraction(0)
    mag = q.numerator.bit_length() - q.denominator.bit_length()
    shift = bits - mag // r + 1
    if upward:
        n = _ceil_scaled(q, r * shift)
        m = _iroot_floor(n, r)
        if m ** r < n:
            m += 1
    else:
        n = _floor_scaled(q, r * shift)
        m = _iroot_floor(n, r)
    if shift >= 0:
        return Fraction(m, 1 << shift)
    return Fraction(m << -shift)


# ---------------------------------------------------------------------------
# constants


def register_rational(name: str, value: Number | str) -> None:
    """Register an exact rational constant under ``name``."""
    v = _as_fraction(value)
    with _registry_lock:
        if name in _SERIES:
            raise ValueError(f"{name!r} is a built-in irrational constant")
        existing = _RATIONALS.get(name)
        if existing is not None and existing != v:
            raise ValueError(f"{name!r} already registered as {existing}")
        _RATIONALS[name] = v


def constant_ids() -> list[str]:
    with _registry_lock:
        return sorted(set(_SERIES) | set(_RATIONALS))


def rational_constant(name: str) -> Fraction | None:
    """Exact value of a rational constant id, None for irrational ids."""
    with _registry_lock:
        if name in _RATIONALS:
            return _RATIONALS[name]
    if name in _SERIES:
        return None
    raise UnknownConstant(name)


def enclose_constant(cid: str, precision_bits: int) -> RealInterval:
    """Enclosure of a bundled constant with width at most 2^-(precision_bits - 4).

    Endpoints sit on the grid 2^-precision_bits and are padded by one grid
    step, which makes the enclosure at 2p bits nest inside the one at p bits.
    """
    if precision_bits < MIN_CONSTANT_PRECISION:
        raise ValueError(f"precision_bits must be >= {MIN_CONSTANT_PRECISION}")
    exact = rational_constant(cid)
    if exact is not None:
        return RealInterval.exact(exact, precision_bits)
    w = precision_bits + _GUARD
    s, e = _fixed(cid, w)
    d = w - precision_bits
    lo = ((s - e) >> d) - 1
    hi = -((-(s + e)) >> d) + 1
    scale = 1 << precision_bits
    return RealInterval(Fraction(lo, scale), Fraction(hi, scale), precision_bits)


# ---------------------------------------------------------------------------
# certified decisions


class Sign(IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


class Verdict(str, Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    INDETERMINATE = "INDETERMINATE"

    @classmethod
    def combine(cls, verdicts: Iterable["Verdict"]) -> "Verdict":
        out = cls.HOLDS
        for v in verdicts:
            if v is cls.FAILS:
                return cls.FAILS
            if v is cls.INDETERMINATE:
                out = cls.INDETERMINATE
        return out

    @classmethod
    def of(cls, flag: bool) -> "Verdict":
        return cls.HOLDS if flag else cls.FAILS


Evaluable = Union[RealInterval, int, Fraction, Callable[[int], RealInterval]]


def evaluator(expr: Evaluable) -> Callable[[int], RealInterval]:
    """Turn a constant or interval into a precision -> interval callable."""
    if callable(expr):
        return expr
    iv = interval(expr)
    return lambda _p: iv


def certified_sign(expr: Evaluable, precision_cap: int = DEFAULT_PRECISION_CAP,
                   *, precision: int = 64) -> Sign:
    """Sign of a re-evaluable expression, doubling precision up to the cap.

    An exact zero enclosure ([0, 0]) is reported as ZERO; an enclosure that
    still straddles 0 at the cap raises IndeterminateSign.
    """
    f = evaluator(expr)
    p = max(precision, MIN_CONSTANT_PRECISION)
    while True:
        s = f(p).sign()
        if s is not None:
            return Sign(s)
        if p >= precision_cap:
            raise IndeterminateSign(precision=p)
        p = min(2 * p, precision_cap)


_OPS = {"<=", "<", ">=", ">"}


def certified_compare(lhs: Evaluable, op: str, rhs: Evaluable, *, precision: int = 64,
                      precision_cap: int = DEFAULT_PRECISION_CAP) -> Verdict:
    """Three-valued verdict on ``lhs op rhs``."""
    if op not in _OPS:
        raise ValueError(f"unsupported comparison {op!r}")
    fl, fr = evaluator(lhs), evaluator(rhs)
    if op in ("<=", "<"):
        diff = lambda p: fr(p) - fl(p)  # noqa: E731
    else:
        diff = lambda p: fl(p) - fr(p)  # noqa: E731
    try:
        s = certified_sign(diff, precision_cap, precision=precision)
    except IndeterminateSign:
        return Verdict.INDETERMINATE
    if op in ("<=", ">="):
        return Verdict.of(s >= 0)
    return Verdict.of(s > 0)
