"""Command-line front end.

Exit codes: 0 all checks hold, 2 some check fails, 3 undecided at the
precision cap, 64 usage error, 65 malformed input file.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
import time
from fractions import Fraction
from typing import Sequence

from . import __version__
from .bounds import ExpressionBound
from .criteria import (
    algindep_verdict,
    coralg0_bound,
    coralg1_bound,
    coralg_conclusion_check,
    depalg_threshold,
    estimate_exponents,
    gelfond_compare,
    kappa_bound,
    main_conclusion_check,
    nesterenko_dim_bound,
    rational,
    siegel_verify,
    transcendence_check,
)
from .errors import (
    DlabError,
    IndeterminateSign,
    InvalidSpec,
    NoPivot,
    NoPointFound,
    SearchBudgetExceeded,
    UnknownConstant,
    VanishingForm,
)
from .forms import SCHEMA_VERSION, EvaluationPoint, FormSequence, Status, verify_hypotheses_main
from .generators import CLASSICAL, GeneratorSpec, build_sequence, default_n_min
from .minkowski import DEFAULT_BUDGET, replay
from .numerics import DEFAULT_PRECISION_CAP, Verdict

EXIT_OK, EXIT_FAIL, EXIT_INDETERMINATE = 0, 2, 3
EXIT_USAGE, EXIT_DATA = 64, 65


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _exit_for(verdicts) -> int:
    v = Verdict.combine(verdicts)
    return {Verdict.HOLDS: EXIT_OK, Verdict.FAILS: EXIT_FAIL, Verdict.INDETERMINATE: EXIT_INDETERMINATE}[v]


def precision_cap(args) -> int:
    if getattr(args, "precision_cap", None):
        return args.precision_cap
    env = os.environ.get("DLAB_PRECISION_CAP")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise UsageError(f"DLAB_PRECISION_CAP must be an integer, got {env!r}") from None
        if cap < 8:
            raise UsageError("DLAB_PRECISION_CAP must be at least 8")
        return cap
    return DEFAULT_PRECISION_CAP


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# sequence loading


def _generator_spec(args) -> GeneratorSpec:
    raw = getattr(args, "generator_spec", None)
    try:
        if raw:
            spec = GeneratorSpec.from_json(raw if raw.lstrip().startswith("{") else _read(raw))
            if args.generator and spec.kind != args.generator.replace("-", "_"):
                raise UsageError("--generator and --generator-spec disagree")
            return spec
        return GeneratorSpec(args.generator)
    except InvalidSpec as exc:
        raise UsageError(str(exc)) from None


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def load_sequence(path: str) -> FormSequence:
    try:
        seq = FormSequence.loads(_read(path))
    except (InvalidSpec, UnknownConstant, ValueError) as exc:
        raise DataError(f"{path}: {exc}") from None
    if seq.bounds is None:
        raise DataError(f"{path}: the document has no 'bounds'")
    return seq


def _sequence_from_args(args) -> tuple[FormSequence, dict, int, int]:
    if args.input:
        if args.generator or getattr(args, "generator_spec", None):
            raise UsageError("use either --input or --generator, not both")
        seq = load_sequence(args.input)
        lo = args.n_min if args.n_min is not None else seq.first_index
        hi = args.n_max if args.n_max is not None else seq.last_index
        if not (seq.first_index <= lo <= hi <= seq.last_index):
            raise UsageError(f"index window [{lo}, {hi}] is outside the input's range "
                             f"[{seq.first_index}, {seq.last_index}]")
        return seq, {"input": os.path.basename(args.input)}, lo, hi
    if not args.generator and not getattr(args, "generator_spec", None):
        raise UsageError("one of --generator, --generator-spec or --input is required")
    spec = _generator_spec(args)
    hi = args.n_max if args.n_max is not None else 150 if spec.kind in CLASSICAL else 30
    lo = args.n_min if args.n_min is not None else default_n_min(spec, hi)
    if lo < 1 or hi < lo:
        raise UsageError("need 1 <= n-min <= n-max")
    if spec.kind in CLASSICAL and hi - lo + 1 < 7:
        raise UsageError("classical generators need a window of at least 7 indices")
    estimate_from = getattr(args, "estimate_from", None)
    seq = build_sequence(spec, lo, hi, precision_bits=args.precision_bits, estimate_from=estimate_from)
    return seq, spec.to_json(), lo, hi


# ---------------------------------------------------------------------------
# run / check


def _pipeline(seq: FormSequence, source: dict, lo: int, hi: int, args, *, estimate: bool) -> tuple[dict, int, list[str]]:
    cap = precision_cap(args)
    p = args.precision_bits
    timings = {}
    t0 = time.perf_counter()
    hyp = verify_hypotheses_main(seq, None, None, (lo, hi), p, n_min=lo, precision_cap=cap)
    timings["hypotheses"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    conclusions = []
    for n in range(lo, hi + 1):
        if not hyp.passes(n):
            continue
        b = seq.bounds
        conclusions.append(main_conclusion_check(
            n, seq.r(n), b.evaluator("A", n), b.evaluator("B", n), b.evaluator("Q", n),
            precision_bits=p, precision_cap=cap))
    timings["conclusions"] = time.perf_counter() - t0

    lines = []
    verdicts = []
    for h, n in hyp.failures():
        lines.append(f"FAIL hypothesis {h} at n={n}")
        verdicts.append(Verdict.FAILS)
    for c in conclusions:
        if c.verdict is not Verdict.HOLDS:
            lines.append(f"{c.verdict.value} main conclusion at n={c.n}")
        verdicts.append(c.verdict)
    if hyp.indeterminate:
        bad = sorted(n for n, row in hyp.verdicts.items()
                     if any(s is Status.INDETERMINATE for s in row.values()))
        lines.append(f"INDETERMINATE hypotheses at n={', '.join(map(str, bad))}")
        verdicts.append(Verdict.INDETERMINATE)

    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "dlab", "version": __version__},
        "source": source,
        "precision_bits": p,
        "precision_cap": cap,
        "window": [lo, hi],
        "hypotheses": hyp.to_json(),
        "main_conclusion": {str(c.n): c.to_json() for c in conclusions},
        "bounds": seq.bounds.to_json() if seq.bounds is not None else None,
    }
    est = None
    if estimate:
        t0 = time.perf_counter()
        try:
            if hi - lo + 1 < 8:
                raise ValueError("window shorter than 8 indices")
            est = estimate_exponents(seq, (lo, hi), p, precision_cap=cap)
            report["exponent_estimate"] = est.to_json()
            try:
                dim = nesterenko_dim_bound(est.tau1_hat, est.tau2_hat)
                report["dimension_bound"] = dim.to_json()
                lines.append(f"tau1_hat={float(est.tau1_hat):.6f} tau2_hat={float(est.tau2_hat):.6f} "
                             f"dimension bound {float(dim.value):.6f} (integer bound {dim.integer_bound})")
            except DlabError as exc:
                report["dimension_bound"] = {"error": str(exc)}
        except (VanishingForm, IndeterminateSign, ValueError) as exc:
            report["exponent_estimate"] = {"error": str(exc)}
        timings["estimate"] = time.perf_counter() - t0
    if getattr(args, "timings", False):
        report["timings_seconds"] = {k: f"{v:.3f}" for k, v in sorted(timings.items())}
    if getattr(args, "csv", None) and est is not None:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            csv.writer(fh).writerows(est.csv_rows())
    code = _exit_for(verdicts)
    report["exit_code"] = code
    report["verdict"] = {0: "HOLDS", 2: "FAILS", 3: "INDETERMINATE"}[code]
    return report, code, lines


def cmd_run(args) -> int:
    seq, source, lo, hi = _sequence_from_args(args)
    report, code, lines = _pipeline(seq, source, lo, hi, args, estimate=True)
    _emit(args, report, lines, code)
    return code


def cmd_check(args) -> int:
    seq, source, lo, hi = _sequence_from_args(args)
    report, code, lines = _pipeline(seq, source, lo, hi, args, estimate=False)
    _emit(args, report, lines, code)
    return code


def _emit(args, report, lines, code):
    if args.report:
        _write(args.report, _dump(report))
    for line in lines:
        print(line)
    print(f"verdict: {report['verdict']}")


# ---------------------------------------------------------------------------
# minkowski


def cmd_minkowski(args) -> int:
    if args.n is None:
        raise UsageError("minkowski: --n is required")
    if args.n_max is None:
        args.n_max = args.n
    if args.n_min is None and not args.input:
        spec = _generator_spec(args)
        args.n_min = min(args.n, default_n_min(spec, args.n_max))
        if spec.kind in CLASSICAL:
            args.n_min = max(1, min(args.n_min, args.n_max - 7))
    seq, source, lo, hi = _sequence_from_args(args)
    try:
        rp = replay(seq, args.n, args.precision_bits, mode=args.oracle, budget=args.budget,
                    precision_cap=precision_cap(args))
    except (NoPivot, NoPointFound, SearchBudgetExceeded, VanishingForm) as exc:
        print(f"FAIL: {exc}")
        report = {"schema_version": SCHEMA_VERSION, "source": source, "n": args.n, "error": str(exc)}
        if args.report:
            _write(args.report, _dump(report))
        return EXIT_USAGE if isinstance(exc, SearchBudgetExceeded) else EXIT_FAIL
    report = {"schema_version": SCHEMA_VERSION, "tool": {"name": "dlab", "version": __version__},
              "source": source, "precision_bits": args.precision_bits, "oracle": args.oracle,
              **rp.to_json()}
    if args.report:
        _write(args.report, _dump(report))
    print(f"point x0={rp.point.x0} pivot k={rp.pivot.k}")
    for step, v in rp.chain.steps.items():
        print(f"step ({step}) {v.value}")
    if rp.chain.zero_integer:
        print("note: the integer of step (a) is 0")
    return _exit_for(rp.chain.steps.values())


def cmd_generate(args) -> int:
    seq, source, lo, hi = _sequence_from_args(args)
    _write(args.output, seq.dumps(min(seq.first_index, lo - 1) if lo > seq.first_index else lo,
                                  seq.last_index))
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds calculators


def _q(text: str) -> Fraction:
    try:
        return rational(text)
    except InvalidSpec as exc:
        raise UsageError(str(exc)) from None


def _print_check(check) -> int:
    doc = check.to_json()
    print(json.dumps(doc, sort_keys=True))
    return _exit_for([check.verdict])


def _expr_in_d(text: str):
    expr = ExpressionBound(re.sub(r"\bd\b", "n", text))

    def f(d):
        v = expr.at(d, 64, lambda *a: (_ for _ in ()).throw(InvalidSpec("no sibling bounds here")))
        if not v.is_exact:
            raise InvalidSpec(f"{text!r} must evaluate to an exact rational")
        return v.lower
    return f


def cmd_bounds(args) -> int:
    kind = args.kind
    if kind == "nesterenko":
        dim = nesterenko_dim_bound(_q(args.tau1), _q(args.tau2), args.m)
        print(dim.value)
        print(json.dumps(dim.to_json(), sort_keys=True))
        return EXIT_OK
    if kind == "main":
        return _print_check(main_conclusion_check(args.n or 0, args.r, _q(args.A), _q(args.B), _q(args.Q)))
    if kind == "coralg":
        return _print_check(coralg_conclusion_check(args.n or 0, args.t, args.d, _q(args.alpha), _q(args.beta),
                                                    _q(args.gamma_prev), _q(args.gamma)))
    if kind == "coralg0":
        return _print_check(coralg0_bound(args.t, args.d, _q(args.tau1), _q(args.tau2)))
    if kind == "coralg1":
        return _print_check(coralg1_bound(args.t, _q(args.delta), _q(args.kappa), _q(args.lam),
                                          _q(args.alpha), _q(args.beta), _q(args.gamma)))
    if kind == "kappa":
        degrees = [int(x) for x in args.degrees.split(",")] if args.degrees else None
        return _print_check(kappa_bound(args.t, _q(args.kappa), _q(args.lam), _q(args.beta), degrees))
    if kind == "depalg":
        rec = depalg_threshold(args.t, args.d, args.delta, None if args.tau is None else _q(args.tau),
                               None if args.eta is None else _q(args.eta))
        print(json.dumps(rec.to_json(), sort_keys=True))
        return EXIT_OK if rec.verdict is None else _exit_for([rec.verdict])
    if kind == "algindep":
        rep = algindep_verdict(args.t, _expr_in_d(args.tau), _expr_in_d(args.eta), (args.d_min, args.d_max))
        print(json.dumps(rep.to_json(), sort_keys=True))
        return EXIT_OK
    if kind == "cor8":
        return _print_check(transcendence_check("cor8", d_n=args.d, alpha_n=_q(args.alpha), beta_n=_q(args.beta),
                                                gamma_prev=_q(args.gamma_prev), gamma_n=_q(args.gamma)))
    if kind == "cor9":
        return _print_check(transcendence_check("cor9", d=args.d, tau1=_q(args.tau1), tau2=_q(args.tau2)))
    if kind == "cor10":
        return _print_check(transcendence_check("cor10", delta=_q(args.delta), lam=_q(args.lam),
                                                alpha=_q(args.alpha), beta=_q(args.beta), gamma=_q(args.gamma)))
    if kind == "gelfond":
        cmp = gelfond_compare(args.d, _q(args.alpha), _q(args.beta))
        print(json.dumps(cmp.to_json(), sort_keys=True))
        return _exit_for([cmp.laurent_roy])
    if kind == "siegel":
        rows = [[int(v) for v in row.split(",")] for row in args.rows.split(";")]
        point = EvaluationPoint.parse(args.point.split(","))
        target = [int(v) for v in args.target.split(",")] if args.target else None
        rep = siegel_verify(rows, point, _q(args.epsilon), args.precision_bits, target,
                            precision_cap=precision_cap(args))
        print(json.dumps(rep.to_json(), sort_keys=True))
        return _exit_for([rep.verdict])
    raise UsageError(f"unknown bound {kind!r}")


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, *, sources=True):
    if sources:
        p.add_argument("--generator", help="bundled generator, e.g. apery-zeta3, synthetic-geometric")
        p.add_argument("--generator-spec", help="generator spec as JSON text or a path to a JSON file")
        p.add_argument("--input", help="form sequence JSON document")
        p.add_argument("--n-min", type=int)
        p.add_argument("--n-max", type=int)
        p.add_argument("--estimate-from", type=int,
                       help="lowest index of the exponent-estimate window used for classical bounds")
    p.add_argument("--precision-bits", type=int, default=256)
    p.add_argument("--precision-cap", type=int, help="defaults to $DLAB_PRECISION_CAP or 2^20")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dlab", description="Certified checks for linear-independence criteria.")
    parser.add_argument("--version", action="version", version=f"dlab {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="full pipeline: hypotheses, conclusions, exponents, dimension bound")
    _common(run)
    run.add_argument("--report")
    run.add_argument("--csv", help="write (n, log|L_n|, sigma(n)) rows")
    run.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="check the main criterion on a sequence")
    check.add_argument("what", choices=["main"])
    _common(check)
    check.add_argument("--report")
    check.add_argument("--timings", action="store_true")
    check.set_defaults(func=cmd_check)

    mk = sub.add_parser("minkowski", help="replay the convex-body argument at one index")
    _common(mk)
    mk.add_argument("--n", type=int)
    mk.add_argument("--oracle", choices=["rounding", "exhaustive"], default="rounding")
    mk.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    mk.add_argument("--report")
    mk.set_defaults(func=cmd_minkowski)

    gen = sub.add_parser("generate", help="write a bundled sequence as a JSON document")
    _common(gen)
    gen.add_argument("--output", default="-")
    gen.set_defaults(func=cmd_generate)

    bounds = sub.add_parser("bounds", help="criterion calculators")
    bsub = bounds.add_subparsers(dest="kind", parser_class=_Parser)

    def calc(name, helptext, *specs):
        p = bsub.add_parser(name, help=helptext)
        for flag, kw in specs:
            p.add_argument(flag, **kw)
        p.set_defaults(func=cmd_bounds)
        return p

    req = {"required": True}
    num = {"required": True, "type": str}
    pint = {"required": True, "type": int}
    calc("nesterenko", "dimension bound (1+tau1)/(1+tau1-tau2)", ("--tau1", num), ("--tau2", num),
         ("--m", {"type": int}))
    calc("main", "A <= 2^(r+1) (B Q)^r", ("--r", pint), ("--A", num), ("--B", num), ("--Q", num),
         ("--n", {"type": int}))
    calc("coralg", "gamma_n bound for polynomial sequences", ("--t", pint), ("--d", pint), ("--alpha", num),
         ("--beta", num), ("--gamma-prev", num), ("--gamma", num), ("--n", {"type": int}))
    calc("coralg0", "bounded degree exponents", ("--t", pint), ("--d", pint), ("--tau1", num), ("--tau2", num))
    calc("coralg1", "growing degree", ("--t", pint), ("--delta", num), ("--kappa", num), ("--lam", num),
         ("--alpha", num), ("--beta", num), ("--gamma", num))
    calc("kappa", "lambda (t! - kappa) <= beta", ("--t", pint), ("--kappa", num), ("--lam", num),
         ("--beta", num), ("--degrees", {"help": "comma-separated degree table d_0,d_1,..."}))
    calc("depalg", "no relation of degree <= delta", ("--t", pint), ("--d", pint), ("--delta", pint),
         ("--tau", {}), ("--eta", {}))
    calc("algindep", "finite-range algebraic independence", ("--t", pint),
         ("--tau", {**req, "help": "expression in d"}), ("--eta", {**req, "help": "expression in d"}),
         ("--d-min", pint), ("--d-max", pint))
    calc("cor8", "transcendence, per-n form", ("--d", pint), ("--alpha", num), ("--beta", num),
         ("--gamma-prev", num), ("--gamma", num))
    calc("cor9", "tau2 <= d + d (tau1 - tau2)", ("--d", pint), ("--tau1", num), ("--tau2", num))
    calc("cor10", "lambda (1 - 2 delta) <= delta (alpha + beta - gamma)", ("--delta", num), ("--lam", num),
         ("--alpha", num), ("--beta", num), ("--gamma", num))
    calc("gelfond", "alpha <= 3 d beta next to alpha <= d beta", ("--d", pint), ("--alpha", num),
         ("--beta", num))
    sg = calc("siegel", "Siegel's criterion on a complete system",
              ("--rows", {**req, "help": "rows separated by ';', entries by ','"}),
              ("--point", {**req, "help": "comma-separated coordinates, first one 1"}),
              ("--epsilon", num), ("--target", {"help": "comma-separated target form"}))
    _common(sg, sources=False)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required (run, check, minkowski, generate, bounds)")
        if args.command == "bounds" and args.kind is None:
            raise UsageError("bounds: choose a calculator")
        if getattr(args, "precision_bits", 256) < 8:
            raise UsageError("--precision-bits must be at least 8")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except IndeterminateSign as exc:
        print(f"INDETERMINATE: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except DlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
