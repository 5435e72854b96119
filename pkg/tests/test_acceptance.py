"""One test per acceptance criterion; each prints a single pass/fail line."""

import itertools
import json
import math
import random
import time
from fractions import Fraction

import mpmath
import pytest

from dlab.cli import main
from dlab.criteria import (
    coralg0_bound,
    coralg1_bound,
    coralg_conclusion_check,
    depalg_threshold,
    estimate_exponents,
    main_conclusion_check,
    nesterenko_dim_bound,
    transcendence_check,
)
from dlab.forms import EvaluationPoint, verify_hypotheses_main
from dlab.generators import GeneratorSpec, build_sequence, monomials
from dlab.minkowski import body_from_value, box_size, exhaustive_search, find_lattice_point, replay
from dlab.numerics import RealInterval, Verdict, constant_ids, enclose_constant


def report(k: int, ok: bool, detail: str) -> None:
    print(f"acceptance {k}: {'PASS' if ok else 'FAIL'} {detail}")


def asymptotic_apery_tau() -> float:
    # -log|L_n| ~ n (4 log(1+sqrt2) - 3), log Q_n ~ n (4 log(1+sqrt2) + 3)
    mpmath.mp.dps = 30
    c = 4 * mpmath.log(1 + mpmath.sqrt(2))
    return float((c - 3) / (c + 3))


def test_acceptance_1_zeta3_dimension_bound():
    t0 = time.perf_counter()
    seq = build_sequence("apery_zeta3", 50, 150, precision_bits=2048)
    est = estimate_exponents(seq, (50, 150), 2048, precision_cap=8192)
    dim = nesterenko_dim_bound(est.tau1_hat, est.tau2_hat)
    elapsed = time.perf_counter() - t0
    oracle = asymptotic_apery_tau()
    window = (Fraction(5, 100), Fraction(11, 100))
    checks = {
        "tau2_hat > 0": est.tau2_hat > 0,
        "dimension bound > 1": dim.value > 1,
        "integer bound >= 2": dim.integer_bound >= 2,
        "tau2_hat in window": window[0] <= est.tau2_hat <= window[1],
        "tau1_hat in window": window[0] <= est.tau1_hat <= window[1],
        "runtime < 60 s": elapsed < 60,
    }
    failed = [name for name, ok in checks.items() if not ok]
    report(1, not failed, f"tau1_hat={float(est.tau1_hat):.5f} tau2_hat={float(est.tau2_hat):.5f} "
                          f"oracle={oracle:.5f} dim={float(dim.value):.5f} time={elapsed:.1f}s"
                          + (f" failed: {', '.join(failed)}" if failed else ""))
    assert 0.05 <= oracle <= 0.11
    assert not failed, failed


BUNDLED = [
    ("apery_zeta3", {}, 20, 60, 1024),
    ("apery_zeta2", {}, 20, 60, 1024),
    ("log2_pade", {}, 20, 60, 512),
    ("synthetic_geometric", {}, 1, 30, 256),
    ("synthetic_geometric", {"ratio": "3"}, 1, 20, 256),
    ("adversarial_rational", {}, 1, 12, 128),
    ("monomial_lift", {"family": "pell_sqrt2"}, 2, 30, 512),
    ("monomial_lift", {"family": "x2_minus_2"}, 2, 12, 128),
]


def test_acceptance_2_main_conclusion_on_bundled_generators():
    checked, bad = 0, []
    for kind, params, lo, hi, p in BUNDLED:
        seq = build_sequence(GeneratorSpec(kind, params), lo, hi, precision_bits=p)
        hyp = verify_hypotheses_main(seq, None, None, (lo, hi), p, n_min=lo, precision_cap=8192)
        passing = [n for n in range(lo, hi + 1) if hyp.passes(n)]
        if kind != "monomial_lift" or params["family"] != "x2_minus_2":
            assert passing, kind
        for n in passing:
            b = seq.bounds
            c = main_conclusion_check(n, seq.r(n), b.evaluator("A", n), b.evaluator("B", n),
                                      b.evaluator("Q", n), precision_bits=p, precision_cap=8192)
            checked += 1
            if c.verdict is not Verdict.HOLDS:
                bad.append((kind, n, c.verdict.value))
    report(2, not bad, f"{checked} certified comparisons" + (f" not holding: {bad}" if bad else ""))
    assert not bad


def random_body(rng):
    r = rng.randint(1, 3)
    point = EvaluationPoint.parse([Fraction(1)] + [Fraction(rng.randint(-9, 9), rng.randint(1, 9))
                                                  for _ in range(r)])
    if r == 1:
        L = Fraction(1, rng.randint(2, 20000))
    else:
        L = Fraction(rng.randint(1, 5), rng.randint(2, 300 * r))
    return body_from_value(point, r, L)


def test_acceptance_3_minkowski_oracle_equivalence():
    rng = random.Random(20240601)
    t0 = time.perf_counter()
    agree = total = 0
    while total < 200:
        body = random_body(rng)
        if body.x0_bound() > 10**4 or box_size(body) > 10**6:
            continue
        total += 1
        a = find_lattice_point(body, "rounding")
        e = exhaustive_search(body)
        assert body.contains_exact(a.x) and body.contains_exact(e.x)
        assert any(a.x) and any(e.x)
        agree += a.x == e.x
    elapsed = time.perf_counter() - t0
    ok = agree == total and elapsed < 120
    report(3, ok, f"{agree}/{total} bodies agree, time={elapsed:.1f}s")
    assert agree == total
    assert elapsed < 120


APERY_SAMPLE = (40, 48, 57, 66, 75, 84, 93, 102, 111, 120)


def test_acceptance_4_proof_chain_replay():
    bad = []
    apery = build_sequence("apery_zeta3", 40, 120, precision_bits=2048, estimate_from=20)
    for n in APERY_SAMPLE:
        rp = replay(apery, n, 2048, precision_cap=8192)
        if rp.chain.verdict is not Verdict.HOLDS:
            bad.append(("apery_zeta3", n, rp.chain.first_failure))
    synthetic = build_sequence("synthetic_geometric", 5, 30)
    for n in range(5, 31):
        rp = replay(synthetic, n, 256, precision_cap=8192)
        if rp.chain.verdict is not Verdict.HOLDS:
            bad.append(("synthetic_geometric", n, rp.chain.first_failure))
    report(4, not bad, f"{len(APERY_SAMPLE)} Apery indices and 26 synthetic indices"
                       + (f" failing: {bad}" if bad else ""))
    assert not bad


def test_acceptance_5_specializations_agree():
    rng = random.Random(5)

    def q(lo, hi, den=97):
        return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))

    mismatches = []
    for i in range(1000):
        d = rng.randint(1, 12)
        a, b, gp, g = q(0, 5), q(0, 5), q(0, 5), q(0, 40)
        v1 = coralg_conclusion_check(i, 1, d, a, b, gp, g).verdict
        v2 = transcendence_check("cor8", d_n=d, alpha_n=a, beta_n=b, gamma_prev=gp, gamma_n=g).verdict
        t1, t2 = q(0, 3), q(0, 3)
        w1 = coralg0_bound(1, d, t1, t2).verdict
        w2 = transcendence_check("cor9", d=d, tau1=t1, tau2=t2).verdict
        delta = Fraction(rng.randint(1, 499), 1000)
        lam, beta, alpha, gamma = q(0, 4) + Fraction(1, 1000), q(0, 4) + Fraction(1, 1000), q(0, 4), q(0, 6)
        u1 = coralg1_bound(1, delta, 1, lam, alpha, beta, gamma).verdict
        u2 = transcendence_check("cor10", delta=delta, lam=lam, alpha=alpha, beta=beta, gamma=gamma).verdict
        for name, x, y in (("cor8", v1, v2), ("cor9", w1, w2), ("cor10", u1, u2)):
            if x is not y or x is Verdict.INDETERMINATE:
                mismatches.append((i, name, x.value, y.value))
    report(5, not mismatches, f"3000 verdict pairs" + (f" mismatches: {mismatches[:5]}" if mismatches else ""))
    assert not mismatches


def test_acceptance_6_threshold_brute_force():
    bad = []
    cases = 0
    for t in range(1, 5):
        for d in range(1, 9):
            exps = [e for e in itertools.product(range(d + 1), repeat=t) if sum(e) <= d]
            assert sorted(monomials(t, d)) == sorted(exps)
            for delta in range(1, d + 1):
                cases += 1
                kernel = sum(1 for e in exps if sum(e) <= d - delta)
                rec = depalg_threshold(t, d, delta)
                if (rec.total, rec.kernel_lower, rec.threshold) != (len(exps), kernel, len(exps) - kernel - 1) \
                        or rec.total != math.comb(d + t, t):
                    bad.append((t, d, delta))
    report(6, not bad, f"{cases} (t, d, delta) triples" + (f" mismatching: {bad}" if bad else ""))
    assert not bad


def test_acceptance_7_falsification_paths(tmp_path, capsys):
    rc1 = main(["run", "--generator", "adversarial-rational", "--n-max", "10"])
    out1 = capsys.readouterr().out
    gen = tmp_path / "synthetic.json"
    assert main(["generate", "--generator", "synthetic-geometric", "--n-max", "10", "--output", str(gen)]) == 0
    doc = json.loads(gen.read_text())
    doc["bounds"]["Q"] = {str(n): str(2 ** (7 if n == 5 else n)) for n in range(0, 12)}
    bad = tmp_path / "q5b5.json"
    bad.write_text(json.dumps(doc))
    capsys.readouterr()
    rc2 = main(["check", "main", "--input", str(bad)])
    out2 = capsys.readouterr().out
    ok1 = rc1 == 2 and "nonzero at n=5" in out1
    ok2 = rc2 == 2 and "monotonicity at n=6" in out2
    report(7, ok1 and ok2, f"adversarial exit {rc1}, Q5B5 > Q6B6 exit {rc2}")
    assert ok1, out1
    assert ok2, out2


MP_NAMES = {
    "pi": lambda: mpmath.pi, "e": lambda: mpmath.e, "log2": lambda: mpmath.log(2),
    "sqrt2": lambda: mpmath.sqrt(2), "zeta2": lambda: mpmath.zeta(2), "zeta3": lambda: mpmath.zeta(3),
    "one": lambda: mpmath.mpf(1),
}


def inside(iv: RealInterval, x) -> bool:
    lo = mpmath.mpf(iv.lower.numerator) / iv.lower.denominator
    hi = mpmath.mpf(iv.upper.numerator) / iv.upper.denominator
    return lo <= x <= hi


def random_expression(rng, depth):
    """Returns (exact Fraction, interval evaluated with rounding at every node)."""
    if depth == 0 or rng.random() < 0.25:
        v = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
        return v, RealInterval.exact(v)
    bits = rng.choice((16, 53, 64, 200))
    op = rng.choice("+-*/^")
    a, ia = random_expression(rng, depth - 1)
    if op == "^":
        k = rng.randint(0, 4)
        return a ** k, (ia ** k).rounded(bits)
    b, ib = random_expression(rng, depth - 1)
    if op == "+":
        return a + b, (ia + ib).rounded(bits)
    if op == "-":
        return a - b, (ia - ib).rounded(bits)
    if op == "*":
        return a * b, (ia * ib).rounded(bits)
    if b == 0 or ib.contains(0):
        return a, ia
    return a / b, (ia / ib).rounded(bits)


def test_acceptance_8_numerics_soundness():
    mpmath.mp.prec = 4096 + 256
    problems = []
    ids = constant_ids()
    assert set(ids) >= set(MP_NAMES) - {"one"}
    for cid in ids:
        if cid not in MP_NAMES:
            continue
        ref = MP_NAMES[cid]()
        chain = [enclose_constant(cid, p) for p in (64, 256, 1024, 4096)]
        for lo, hi in zip(chain, chain[1:]):
            if not lo.contains(hi):
                problems.append(f"{cid} not nested")
        if not all(inside(iv, ref) for iv in chain):
            problems.append(f"{cid} misses the reference value")
    rng = random.Random(8)
    for _ in range(10_000):
        exact, iv = random_expression(rng, 4)
        if not iv.contains(exact):
            problems.append(f"expression enclosure misses {exact}")
    report(8, not problems, f"{len(ids)} constants at 4 precisions, 10000 expressions"
                            + (f" problems: {problems[:5]}" if problems else ""))
    assert not problems
