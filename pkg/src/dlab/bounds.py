"""Bound sequences Q_n, A_n, B_n and sigma(n).

A bound is either an explicit table ``{n: value}`` or a closed-form
expression in ``n``. Expressions use a small arithmetic language::

    2**n                       exact
    exp(0.08 * sigma(n + 1))   certified enclosure
    log(Q(n))                  references to sibling bounds

Decimal literals are read as exact rationals. Available functions are
``exp``, ``log``, ``sqrt`` and the sibling bounds ``Q``, ``A``, ``B``,
``sigma``; bundled constant ids (``pi``, ``zeta3``, ...) may be used as names.
"""

from __future__ import annotations

import ast
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .errors import InvalidSpec
from .numerics import RealInterval, constant_ids, enclose_constant

BOUND_NAMES = ("Q", "A", "B", "sigma")
_MAX_DEPTH = 16


class BoundUnavailable(LookupError):
    """The bound has no value at the requested index."""


class BoundSequence:
    def at(self, n: int, precision: int, resolve: Callable[[str, int, int], RealInterval]) -> RealInterval:
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


class TableBound(BoundSequence):
    def __init__(self, values: Mapping[int, Fraction | int | str]):
        self.values = {int(k): Fraction(v) if not isinstance(v, Fraction) else v for k, v in values.items()}
        if any(v <= 0 for v in self.values.values()):
            raise InvalidSpec("bound tables must hold positive values")

    def at(self, n, precision, resolve):
        try:
            return RealInterval.exact(self.values[n])
        except KeyError:
            raise BoundUnavailable(n) from None

    def to_json(self):
        return {str(k): str(v) for k, v in sorted(self.values.items())}

    def __repr__(self):
        return f"TableBound({len(self.values)} entries)"


class ExpressionBound(BoundSequence):
    def __init__(self, text: str):
        self.text = text
        try:
            tree = ast.parse(text.strip(), mode="eval")
        except SyntaxError as exc:
            raise InvalidSpec(f"cannot parse bound expression {text!r}: {exc.msg}") from None
        _validate(tree.body, text)
        self._tree = tree.body

    def at(self, n, precision, resolve):
        return _Evaluator(self.text, n, precision, resolve).visit(self._tree)

    def to_json(self):
        return self.text

    def __repr__(self):
        return f"ExpressionBound({self.text!r})"


def bound_from_json(value) -> BoundSequence:
    if isinstance(value, BoundSequence):
        return value
    if isinstance(value, str):
        return ExpressionBound(value)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return ExpressionBound(repr(value))
    if isinstance(value, Mapping):
        try:
            return TableBound({int(k): Fraction(str(v)) for k, v in value.items()})
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidSpec(f"malformed bound table: {exc}") from None
    raise InvalidSpec(f"bound must be an expression string or a table, got {type(value).__name__}")


_FUNCS = {"exp", "log", "sqrt"}
_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def _validate(node, text):
    if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
        _validate(node.left, text)
        _validate(node.right, text)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        _validate(node.operand, text)
    elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        pass
    elif isinstance(node, ast.Name):
        if node.id != "n" and node.id not in constant_ids():
            raise InvalidSpec(f"unknown name {node.id!r} in {text!r}")
    elif isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords \
            and len(node.args) == 1 and node.func.id in _FUNCS | set(BOUND_NAMES):
        _validate(node.args[0], text)
    else:
        raise InvalidSpec(f"unsupported construct in bound expression {text!r}")


class _Evaluator(ast.NodeVisitor):
    def __init__(self, text, n, precision, resolve):
        self.text = text
        self.n = n
        self.p = precision
        self.resolve = resolve

    def visit_Constant(self, node):
        segment = ast.get_source_segment(self.text.strip(), node)
        return RealInterval.exact(Fraction(segment if segment else str(node.value)))

    def visit_Name(self, node):
        if node.id == "n":
            return RealInterval.exact(self.n)
        return enclose_constant(node.id, max(self.p, 8))

    def visit_UnaryOp(self, node):
        v = self.visit(node.operand)
        return -v if isinstance(node.op, ast.USub) else v

    def visit_BinOp(self, node):
        a, b = self.visit(node.left), self.visit(node.right)
        op = node.op
        if isinstance(op, ast.Add):
            return a + b
        if isinstance(op, ast.Sub):
            return a - b
        if isinstance(op, ast.Mult):
            return a * b
        if isinstance(op, ast.Div):
            return a / b if not (a.is_exact and b.is_exact) else RealInterval.exact(a.lower / b.lower)
        if b.is_exact and b.lower.denominator == 1:
            return a ** int(b.lower)
        return (b * a.log(self.p)).exp(self.p)

    def visit_Call(self, node):
        name = node.func.id
        arg = self.visit(node.args[0])
        if name in BOUND_NAMES:
            if not (arg.is_exact and arg.lower.denominator == 1):
                raise InvalidSpec(f"{name}() needs an integer index in {self.text!r}")
            return self.resolve(name, int(arg.lower), self.p)
        if name == "exp":
            return arg.exp(self.p)
        if name == "log":
            return arg.log(self.p)
        return arg.root(2, self.p)


@dataclass
class SequenceBounds:
    """Declared bounds for a form sequence.

    ``sigma`` is optional; ``metadata`` carries constants that play no role
    in the checks (for instance c1, c2 of the two-sided hypothesis).
    """

    Q: BoundSequence
    A: BoundSequence
    B: BoundSequence
    sigma: BoundSequence | None = None
    metadata: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False, compare=False)

    @classmethod
    def parse(cls, Q, A, B, sigma=None, metadata=None) -> "SequenceBounds":
        return cls(bound_from_json(Q), bound_from_json(A), bound_from_json(B),
                   None if sigma is None else bound_from_json(sigma), dict(metadata or {}))

    def value(self, name: str, n: int, precision: int, _depth: int = 0) -> RealInterval:
        if _depth > _MAX_DEPTH:
            raise InvalidSpec("bound expressions reference each other too deeply")
        key = (name, n, precision)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        seq = getattr(self, name)
        if seq is None:
            raise BoundUnavailable(f"no {name} bound declared")
        out = seq.at(n, precision, lambda nm, k, p: self.value(nm, k, p, _depth + 1))
        if out.lower <= 0:
            raise InvalidSpec(f"bound {name} is not positive at n={n}")
        with self._lock:
            self._cache[key] = out
        return out

    def evaluator(self, name: str, n: int) -> Callable[[int], RealInterval]:
        return lambda p: self.value(name, n, p)

    def has(self, name: str, n: int) -> bool:
        try:
            self.value(name, n, 64)
        except BoundUnavailable:
            return False
        return True

    def to_json(self) -> dict:
        out = {"Q": self.Q.to_json(), "A": self.A.to_json(), "B": self.B.to_json()}
        if self.sigma is not None:
            out["sigma"] = self.sigma.to_json()
        if self.metadata:
            out["metadata"] = {k: str(v) for k, v in sorted(self.metadata.items())}
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "SequenceBounds":
        try:
            return cls.parse(data["Q"], data["A"], data["B"], data.get("sigma"), data.get("metadata"))
        except KeyError as exc:
            raise InvalidSpec(f"bounds missing field {exc}") from None
