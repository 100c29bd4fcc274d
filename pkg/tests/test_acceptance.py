"""Acceptance criteria, one test and one PASS/FAIL line each.

Run with pytest (lines are printed in the terminal summary) or directly:
``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from vlineq.lattice import DEFAULT_GRID, LatticeElement, ScalarField, geometric_mean
from vlineq.maps import (
    PositiveLinearMap,
    holder_sides,
    maligranda_sides,
    minkowski_sides,
    random_lattice_homomorphism,
    random_non_homomorphism,
    random_positive_map,
    strictness_witness_search,
)
from vlineq.powers import check_power_rules, power
from vlineq.sesquilinear import (
    cauchy_schwarz_report,
    classical_equality_witness_search,
    cs_gap,
    disjoint_instance,
    parallel_instance,
    random_psd_form,
    random_vector,
)
from vlineq.suites import bundled_example, random_exponents, random_weights

RESULTS: dict[int, str] = {}
SEED = 42
EXPONENTS = (0.5, 1.5, 2.5, math.pi, math.e)


def _line(n: int, ok: bool, text: str) -> tuple[bool, str]:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}"
    RESULTS[n] = line
    return ok, line


def _positive_pair(rng):
    d = int(rng.integers(1, 9))
    f, g = rng.uniform(0, 100, (2, d))
    if rng.random() < 0.1:
        f[rng.integers(d)] = 0.0
    return LatticeElement.real(f), LatticeElement.real(g)


def _psd_instance(rng, i):
    field = ScalarField.REAL if i % 2 == 0 else ScalarField.COMPLEX
    m, n = int(rng.integers(1, 7)), int(rng.integers(1, 9))
    T = random_psd_form(rng, m, n, field, rank=int(rng.integers(1, m + 1)))
    return T, random_vector(rng, m, field), random_vector(rng, m, field)


def criterion_1():
    rng = np.random.default_rng(SEED)
    worst = below = 0.0
    start = time.perf_counter()
    for _ in range(1000):
        f, g = _positive_pair(rng)
        p = geometric_mean(f, g, DEFAULT_GRID)
        d, c = p.definitional.re, np.sqrt(f.re * g.re)
        worst = max(worst, float(np.max(np.abs(d - c))))
        below = max(below, float(np.max(c - d)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and below <= 1e-9 and elapsed < 5.0
    return _line(1, ok, f"geometric mean 1000 pairs, max |def-closed| {worst:.2e}, max closed-def {below:.2e}, {elapsed:.2f}s")


def criterion_2():
    rng = np.random.default_rng(SEED)
    residual = violation = 0.0
    start = time.perf_counter()
    for i in range(1000):
        T, u, v = _psd_instance(rng, i)
        r = cauchy_schwarz_report(T, u, v, DEFAULT_GRID)
        residual = max(residual, r.identity_residual)
        violation = max(violation, float(np.max(r.lhs.re - r.rhs.re)))
    elapsed = time.perf_counter() - start
    ok = residual <= 1e-4 and violation <= 1e-9 and elapsed < 30.0
    return _line(2, ok, f"Cauchy-Schwarz 1000 instances, identity residual {residual:.2e}, inequality excess {violation:.2e}, {elapsed:.2f}s")


def criterion_3():
    rng = np.random.default_rng(SEED)
    eq_ok = strict_ok = 0
    eq_gap = 0.0
    strict_gap = math.inf
    for i in range(100):
        field = ScalarField.REAL if i % 2 else ScalarField.COMPLEX
        T, u, v = parallel_instance(rng, int(rng.integers(1, 7)), int(rng.integers(1, 9)), field)
        r = cauchy_schwarz_report(T, u, v)
        g = float(np.max(r.gap.re))
        eq_gap = max(eq_gap, g)
        eq_ok += r.equality and g <= 1e-6
        T, u, v = disjoint_instance(rng, int(rng.integers(2, 7)), int(rng.integers(1, 9)), field)
        r = cauchy_schwarz_report(T, u, v)
        g = float(np.min(r.gap.re))
        strict_gap = min(strict_gap, g)
        strict_ok += (not r.equality) and g >= 0.1
    ok = eq_ok == 100 and strict_ok == 100
    return _line(3, ok, f"equality {eq_ok}/100 (max gap {eq_gap:.2e}), strict {strict_ok}/100 (min gap {strict_gap:.3f})")


def criterion_4():
    inst = bundled_example()
    T, u, v = inst.forms["T"], inst.elements["u"].coords, inst.elements["v"].coords
    gap = cs_gap(T, u, v)
    closed_zero = bool(np.all(gap.closed.re == 0.0))
    equality = cauchy_schwarz_report(T, u, v).equality
    witness = classical_equality_witness_search(T, u, v, probe_count=10_000, seed=SEED)
    ok = closed_zero and equality and witness is None
    return _line(4, ok, f"bundled example closed gap {gap.closed.re.tolist()}, equality {equality}, witness {witness}")


def criterion_5():
    rng = np.random.default_rng(SEED)
    rule_err = def_err = 0.0
    below = 0.0
    for _ in range(500):
        a = LatticeElement.real(rng.uniform(0, 10, int(rng.integers(1, 9))))
        p, q = (EXPONENTS[j] for j in rng.integers(len(EXPONENTS), size=2))
        rep = check_power_rules(a, p, q, rtol=1e-9)
        rule_err = max(rule_err, rep.max_violation)
        for r in (0.5, 2.5, math.pi):
            pair = power(a, r)
            def_err = max(def_err, float(np.max(np.abs(pair.definitional.re - pair.closed.re))))
            below = max(below, float(np.max(pair.closed.re - pair.definitional.re)))
    ok = rule_err <= 1e-9 and def_err <= 1e-4
    return _line(5, ok, f"power rules 500 elements, max rel error {rule_err:.2e}; definitional power max error {def_err:.2e}")


def criterion_6():
    rng = np.random.default_rng(SEED)
    excess = disagree = 0.0
    for _ in range(1000):
        m, k = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        M = random_positive_map(rng, k, m, density=float(rng.uniform(0.3, 1.0)))
        n = int(rng.integers(2, 4))
        as_ = [LatticeElement.real(rng.standard_normal(m) * 5) for _ in range(n)]
        s = holder_sides(M, as_, random_exponents(rng, n))
        excess = max(excess, float(np.max(s["lhs"].re - s["rhs_product"].re)), float(np.max(s["lhs"].re - s["rhs_mean"].re)))
        disagree = max(disagree, float(np.max(np.abs(s["rhs_product"].re - s["rhs_mean"].re))))
    # n = 2, p = (2, 2), summation map: discrete Cauchy-Schwarz
    cs_err = 0.0
    for _ in range(200):
        d = int(rng.integers(1, 7))
        a, b = rng.standard_normal((2, d))
        s = holder_sides(PositiveLinearMap(np.ones((1, d))), [LatticeElement.real(a), LatticeElement.real(b)], (2.0, 2.0))
        cs_err = max(
            cs_err,
            abs(s["lhs"].re[0] - np.sum(np.abs(a * b))),
            abs(s["rhs_product"].re[0] - np.linalg.norm(a) * np.linalg.norm(b)),
        )
    ok = excess <= 1e-9 and disagree <= 1e-9 and cs_err <= 1e-9
    return _line(6, ok, f"Holder 1000 instances, excess {excess:.2e}, form disagreement {disagree:.2e}, Cauchy-Schwarz slice error {cs_err:.2e}")


def criterion_7():
    rng = np.random.default_rng(SEED)
    ps = (1.5, 2.0, 3.0, math.pi)
    excess = 0.0
    for _ in range(1000):
        m, k = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        M = random_positive_map(rng, k, m, density=float(rng.uniform(0.3, 1.0)))
        n = int(rng.integers(2, 5))
        as_ = [LatticeElement.real(rng.standard_normal(m) * 5) for _ in range(n)]
        lhs, rhs = minkowski_sides(M, as_, ps[rng.integers(len(ps))])
        excess = max(excess, float(np.max(lhs.re - rhs.re)))
    parallel = 0.0
    for _ in range(200):
        m, k = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        M = random_positive_map(rng, k, m)
        base = LatticeElement.real(rng.standard_normal(m))
        n = int(rng.integers(2, 5))
        as_ = [base * float(c) for c in rng.uniform(0.1, 3.0, n)]
        lhs, rhs = minkowski_sides(M, as_, ps[rng.integers(len(ps))])
        parallel = max(parallel, float(np.max(np.abs(lhs.re - rhs.re))))
    ok = excess <= 1e-9 and parallel <= 1e-9
    return _line(7, ok, f"Minkowski 1000 instances, excess {excess:.2e}; parallel summands max |lhs-rhs| {parallel:.2e}")


def criterion_8():
    rng = np.random.default_rng(SEED)
    excess = 0.0
    for _ in range(1000):
        m, k = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        M = random_positive_map(rng, k, m, density=float(rng.uniform(0.3, 1.0)))
        n = int(rng.integers(2, 5))
        field = ScalarField.REAL if rng.random() < 0.5 else ScalarField.COMPLEX
        fs = [LatticeElement(field, random_vector(rng, m, field) * 5) for _ in range(n)]
        lhs, rhs = maligranda_sides(M, fs, random_weights(rng, n))
        excess = max(excess, float(np.max(lhs.re - rhs.re)))
    hom_err = 0.0
    for _ in range(200):
        m, k = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        M = random_lattice_homomorphism(rng, k, m)
        n = int(rng.integers(2, 5))
        fs = [LatticeElement.real(rng.standard_normal(m) * 5) for _ in range(n)]
        lhs, rhs = maligranda_sides(M, fs, random_weights(rng, n))
        hom_err = max(hom_err, float(np.max(np.abs(lhs.re - rhs.re))))
    found = 0
    for i in range(50):
        M = random_non_homomorphism(rng, int(rng.integers(1, 7)), int(rng.integers(2, 7)))
        found += strictness_witness_search(M, 1000, SEED + i) is not None
    ok = excess <= 1e-9 and hom_err <= 1e-9 and found == 50
    return _line(8, ok, f"Maligranda excess {excess:.2e} over 1000 maps; homomorphism equality error {hom_err:.2e}; strict witnesses {found}/50")


def criterion_9():
    rng = np.random.default_rng(SEED)
    fine = DEFAULT_GRID.doubled()
    worse = {"geometric-mean": 0, "cs-gap": 0, "power": 0}
    for i in range(100):
        f, g = _positive_pair(rng)
        worse["geometric-mean"] += int(np.any(geometric_mean(f, g, fine).definitional.re > geometric_mean(f, g).definitional.re))
        T, u, v = _psd_instance(rng, i)
        worse["cs-gap"] += int(np.any(cs_gap(T, u, v, fine).definitional.re > cs_gap(T, u, v).definitional.re))
        a = LatticeElement.real(rng.uniform(0, 10, int(rng.integers(1, 9))))
        for r in (0.5, 2.5, math.pi):
            worse["power"] += int(np.any(power(a, r, fine).definitional.re > power(a, r).definitional.re))
    ok = not any(worse.values())
    return _line(9, ok, f"doubling theta_points 4096 -> 8192, instances made worse: {worse}")


def criterion_10():
    cmd = [sys.executable, "-m", "vlineq.cli", "verify", "--suite", "all", "--seed", "42"]
    outputs, times = [], []
    for _ in range(2):
        start = time.perf_counter()
        proc = subprocess.run(cmd, capture_output=True)
        times.append(time.perf_counter() - start)
        outputs.append((proc.returncode, proc.stdout))
    identical = outputs[0] == outputs[1]
    ok = identical and outputs[0][0] == 0 and max(times) < 60.0
    return _line(10, ok, f"verify --suite all --seed 42 twice: identical {identical}, exit {outputs[0][0]}, runtimes {times[0]:.1f}s/{times[1]:.1f}s")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_acceptance(criterion):
    ok, line = criterion()
    print(line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for c in CRITERIA:
        ok, line = c()
        print(line, flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
