"""Seeded property suites and instance-file execution.

Every trial draws from its own generator seeded by (seed, suite index,
trial index), so a suite's report depends only on its arguments and never
on which other suites ran before it.
"""
from __future__ import annotations

import math
from dataclasses import replace
from importlib import resources
from typing import Callable

import numpy as np

from .errors import DomainError
from .instances import InstanceFile, load_instance, parse_instance
from .lattice import (
    DEFAULT_GRID,
    GridConfig,
    LatticeElement,
    ScalarField,
    abs_closed,
    geometric_mean,
    join,
    meet,
    modulus,
    scaled_tol,
    square_mean,
)
from .maps import (
    ExponentVector,
    PositiveLinearMap,
    holder_check,
    homomorphism_equality_check,
    maligranda_check,
    minkowski_check,
    random_lattice_homomorphism,
    random_non_homomorphism,
    random_positive_map,
    strictness_witness_search,
)
from .powers import WeightVector, check_power_rules, power, weighted_geometric_mean
from .report import VerificationReport, grid_diagnostics
from .sesquilinear import (
    cauchy_schwarz_report,
    corollary_fsquare_report,
    cs_equality_check,
    disjoint_instance,
    parallel_instance,
    random_psd_form,
    random_vector,
)

SUITES = (
    "lattice-axioms",
    "modulus",
    "square-mean",
    "geometric-mean",
    "weighted-gm",
    "powers",
    "power-rules",
    "cauchy-schwarz",
    "cs-corollary",
    "cs-equality",
    "maligranda",
    "hom-equality",
    "holder",
    "minkowski",
)

# sized so that the whole of `all` stays well under a minute
DEFAULT_TRIALS = {
    "lattice-axioms": 500,
    "modulus": 200,
    "square-mean": 300,
    "geometric-mean": 500,
    "weighted-gm": 40,
    "powers": 300,
    "power-rules": 500,
    "cauchy-schwarz": 500,
    "cs-corollary": 200,
    "cs-equality": 60,
    "maligranda": 500,
    "hom-equality": 200,
    "holder": 500,
    "minkowski": 500,
}

EXPONENTS = (0.5, 1.5, 2.5, math.pi, math.e)
MINKOWSKI_P = (1.5, 2.0, 3.0, math.pi)
WITNESS_TRIALS = 1000
EXAMPLE_RESOURCE = "example_noclaeqco.json"

TrialResult = tuple[bool, float, object, float]  # ok, violation, witness, grid residual


def trial_rng(seed: int, suite: str, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) % 2**64, SUITES.index(suite), trial])


def _dim(rng: np.random.Generator, hi: int = 8, lo: int = 1) -> int:
    return int(rng.integers(lo, hi + 1))


def _field(rng: np.random.Generator) -> ScalarField:
    return ScalarField.REAL if rng.random() < 0.5 else ScalarField.COMPLEX


def _positive(rng: np.random.Generator, d: int, hi: float = 100.0, zeros: bool = True) -> LatticeElement:
    x = rng.uniform(0.0, hi, d)
    if zeros and rng.random() < 0.2:
        x[rng.integers(d)] = 0.0
    return LatticeElement.real(x)


def _signed(rng: np.random.Generator, d: int, field: ScalarField = ScalarField.REAL) -> LatticeElement:
    return LatticeElement(field, random_vector(rng, d, field) * 5.0)


def random_weights(rng: np.random.Generator, n: int, floor: float = 0.05) -> WeightVector:
    while True:
        w = rng.dirichlet(np.ones(n))
        if np.all(w > floor):
            w[-1] = 1.0 - math.fsum(w[:-1])
            return WeightVector(tuple(float(x) for x in w))


def random_exponents(rng: np.random.Generator, n: int) -> ExponentVector:
    """Conjugate exponents from random reciprocals bounded away from 0 and 1."""
    w = random_weights(rng, n, floor=0.05).weights
    return ExponentVector(tuple(1.0 / x for x in w))


def _infimum_check(pair, cfg: GridConfig, sup: bool = False) -> TrialResult:
    """Definitional vs closed: agreement within grid_tol and the order a grid search guarantees."""
    d, c = pair.definitional.re, pair.closed.re
    residual = float(np.max(np.abs(d - c)))
    order = float(np.max(c - d)) if not sup else float(np.max(d - c))
    ok = residual <= scaled_tol(cfg.grid_tol, c) and order <= scaled_tol(cfg.abs_tol, c)
    return ok, residual, None, residual


# trials


def _t_lattice_axioms(rng, cfg) -> TrialResult:
    d = _dim(rng)
    f, g, h = (_signed(rng, d) for _ in range(3))
    c = rng.uniform(0.0, 3.0)
    z = _signed(rng, d, ScalarField.COMPLEX)
    w = _signed(rng, d, ScalarField.COMPLEX)
    lam = complex(rng.standard_normal(), rng.standard_normal())
    identities = [
        (join(f, g), join(g, f)),
        (meet(f, join(g, h)), join(meet(f, g), meet(f, h))),
        (join(f, meet(f, g)), f),
        (join(f, g) + meet(f, g), f + g),
        (join(f, g) + h, join(f + h, g + h)),
        (join(f * c, g * c), join(f, g) * c),
        (abs_closed(f), join(f, -f)),
        (modulus(f, cfg).definitional, abs_closed(f)),
        (abs_closed(z * lam), abs_closed(z) * abs(lam)),
    ]
    worst = max(float(np.max(np.abs(a.coords - b.coords))) for a, b in identities)
    # triangle inequality and the order facts f^- = (-f) v 0, |f| = f^+ + f^-
    tri = float(np.max(abs_closed(z + w).re - (abs_closed(z) + abs_closed(w)).re))
    zero = LatticeElement.zeros(d)
    pos_neg = float(np.max(np.abs((join(f, zero) + join(-f, zero)).re - abs_closed(f).re)))
    tol = scaled_tol(cfg.abs_tol, f, g, h, z, w) * (1.0 + abs(lam) + c)
    violation = max(worst, tri, pos_neg, 0.0)
    return violation <= tol, violation, {"f": f, "g": g, "h": h, "z": z, "w": w}, 0.0


def _t_modulus(rng, cfg) -> TrialResult:
    f = _signed(rng, _dim(rng), _field(rng))
    ok, v, _, res = _infimum_check(modulus(f, cfg), cfg, sup=True)
    return ok, v, {"f": f}, res


def _t_square_mean(rng, cfg) -> TrialResult:
    d = _dim(rng)
    f, g = _signed(rng, d), _signed(rng, d)
    ok, v, _, res = _infimum_check(square_mean(f, g, cfg), cfg, sup=True)
    return ok, v, {"f": f, "g": g}, res


def _t_geometric_mean(rng, cfg) -> TrialResult:
    d = _dim(rng)
    f, g = _positive(rng, d), _positive(rng, d)
    ok, v, _, res = _infimum_check(geometric_mean(f, g, cfg), cfg)
    return ok, v, {"f": f, "g": g}, res


def _t_weighted_gm(rng, cfg) -> TrialResult:
    d, n = _dim(rng, 4), _dim(rng, 4, lo=2)
    fs = [_positive(rng, d, hi=10.0, zeros=False) for _ in range(n)]
    w = random_weights(rng, n)
    ok, v, _, res = _infimum_check(weighted_geometric_mean(fs, w, cfg), cfg)
    return ok, v, {"elements": fs, "weights": w.weights}, res


def _t_powers(rng, cfg) -> TrialResult:
    a = _positive(rng, _dim(rng), hi=10.0)
    r = float(EXPONENTS[rng.integers(len(EXPONENTS))]) if rng.random() < 0.5 else float(rng.uniform(0.1, 4.0))
    ok, v, _, res = _infimum_check(power(a, r, cfg), cfg)
    return ok, v, {"a": a, "r": r}, res


def _t_power_rules(rng, cfg) -> TrialResult:
    a = _positive(rng, _dim(rng), hi=10.0)
    p, q = (float(EXPONENTS[i]) for i in rng.integers(len(EXPONENTS), size=2))
    rep = check_power_rules(a, p, q)
    return rep.passed, rep.max_violation, rep.worst_witness, 0.0


def _cs_data(rng):
    field = _field(rng)
    m, n = _dim(rng, 6), _dim(rng)
    T = random_psd_form(rng, m, n, field, rank=int(rng.integers(1, m + 1)))
    return T, random_vector(rng, m, field), random_vector(rng, m, field)


def _t_cauchy_schwarz(rng, cfg) -> TrialResult:
    T, u, v = _cs_data(rng)
    r = cauchy_schwarz_report(T, u, v, cfg)
    tol = scaled_tol(cfg.grid_tol, r.rhs)
    ok = r.identity_residual <= tol and r.inequality_holds
    return ok, max(r.identity_residual, r.inequality_violation), {"form": T.matrices, "u": u, "v": v}, r.identity_residual


def _t_cs_corollary(rng, cfg) -> TrialResult:
    T, u, v = _cs_data(rng)
    rep = corollary_fsquare_report(T, u, v, cfg)
    return rep.passed, rep.max_violation, rep.worst_witness, rep.details["identity_residual"]


def _t_cs_equality(rng, cfg) -> TrialResult:
    field = _field(rng)
    equal = rng.random() < 0.5
    make = parallel_instance if equal else disjoint_instance
    T, u, v = make(rng, _dim(rng, 6, lo=2), _dim(rng), field)
    rep = cs_equality_check(T, u, v, cfg, expect_equality=equal, probe_count=256, seed=int(rng.integers(2**31)))
    return rep.passed, rep.max_violation, {"form": T.matrices, "u": u, "v": v, "expect_equality": equal}, 0.0


def _map_data(rng, hom: bool | None = None):
    m, n = _dim(rng, 6), _dim(rng, 6)
    if hom:
        M = random_lattice_homomorphism(rng, n, m)
    else:
        M = random_positive_map(rng, n, m, density=float(rng.uniform(0.3, 1.0)))
    return M, m


def _t_maligranda(rng, cfg) -> TrialResult:
    M, m = _map_data(rng)
    k = _dim(rng, 4, lo=2)
    field = _field(rng)
    fs = [_signed(rng, m, field) for _ in range(k)]
    rep = maligranda_check(M, fs, random_weights(rng, k), cfg)
    return rep.passed, rep.max_violation, rep.worst_witness, 0.0


def _t_hom_equality(rng, cfg) -> TrialResult:
    M, m = _map_data(rng, hom=True)
    k = _dim(rng, 4, lo=2)
    fs = [_signed(rng, m) for _ in range(k)]
    rep = homomorphism_equality_check(M, fs, random_weights(rng, k), cfg)
    return rep.passed, rep.max_violation, rep.worst_witness, 0.0


def _t_holder(rng, cfg) -> TrialResult:
    M, m = _map_data(rng)
    k = _dim(rng, 3, lo=2)
    fs = [_signed(rng, m) for _ in range(k)]
    rep = holder_check(M, fs, random_exponents(rng, k), cfg)
    return rep.passed, rep.max_violation, rep.worst_witness, 0.0


def _t_minkowski(rng, cfg) -> TrialResult:
    M, m = _map_data(rng)
    k = _dim(rng, 4, lo=2)
    fs = [_signed(rng, m) for _ in range(k)]
    p = float(MINKOWSKI_P[rng.integers(len(MINKOWSKI_P))])
    rep = minkowski_check(M, fs, p, cfg)
    return rep.passed, rep.max_violation, rep.worst_witness, 0.0


TRIALS: dict[str, Callable[[np.random.Generator, GridConfig], TrialResult]] = {
    "lattice-axioms": _t_lattice_axioms,
    "modulus": _t_modulus,
    "square-mean": _t_square_mean,
    "geometric-mean": _t_geometric_mean,
    "weighted-gm": _t_weighted_gm,
    "powers": _t_powers,
    "power-rules": _t_power_rules,
    "cauchy-schwarz": _t_cauchy_schwarz,
    "cs-corollary": _t_cs_corollary,
    "cs-equality": _t_cs_equality,
    "maligranda": _t_maligranda,
    "hom-equality": _t_hom_equality,
    "holder": _t_holder,
    "minkowski": _t_minkowski,
}


def _extras(suite: str, rep: VerificationReport, cfg: GridConfig, seed: int) -> None:
    """Suite-specific fixed checks that complement the random trials."""
    if suite == "cs-equality":
        inst = bundled_example()
        sub = run_instance(inst, cfg)
        rep.details["bundled_example"] = sub.to_dict()
        rep.record(sub.passed, sub.max_violation, {"instance": EXAMPLE_RESOURCE})
    elif suite == "hom-equality":
        # converse direction: strict witnesses for non-homomorphisms (witness-based evidence)
        rng = trial_rng(seed, suite, 10**6)
        found = 0
        count = 5
        for i in range(count):
            M = random_non_homomorphism(rng, _dim(rng, 4), _dim(rng, 4, lo=2))
            w = strictness_witness_search(M, WITNESS_TRIALS, int(rng.integers(2**31)), cfg)
            found += w is not None
            rep.record(w is not None, 0.0, None if w is not None else {"map": M.entries})
        rep.details["non_homomorphism_witnesses"] = {"found": found, "searched": count, "evidence": "witness-based"}


def run_suite(suite: str, cfg: GridConfig = DEFAULT_GRID, trials: int | None = None, seed: int = 0) -> VerificationReport:
    """Run ``trials`` seeded random trials of ``suite`` (``all`` runs every suite)."""
    if suite == "all":
        rep = VerificationReport("all", grid_diagnostics=grid_diagnostics(cfg), seed=seed)
        for name in SUITES:
            sub = run_suite(name, cfg, trials, seed)
            rep.subreports.append(sub)
        _aggregate(rep)
        return rep
    if suite not in TRIALS:
        raise DomainError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES + ('all',))}")
    n = DEFAULT_TRIALS[suite] if trials is None else int(trials)
    if n < 0:
        raise DomainError("trials must be >= 0")
    rep = VerificationReport(suite, grid_diagnostics=grid_diagnostics(cfg), seed=seed)
    fn = TRIALS[suite]
    for i in range(n):
        ok, violation, witness, residual = fn(trial_rng(seed, suite, i), cfg)
        rep.record(ok, violation, witness)
        rep.add_residual(residual)
    if n > 0:
        _extras(suite, rep, cfg, seed)
    return rep


def _aggregate(rep: VerificationReport) -> None:
    rep.instances = sum(s.instances for s in rep.subreports)
    rep.passes = sum(s.passes for s in rep.subreports)
    rep.max_violation = max((s.max_violation for s in rep.subreports), default=0.0)
    failing = [s for s in rep.subreports if not s.passed]
    if failing:
        rep.worst_witness = {"suite": failing[0].suite, "witness": failing[0].worst_witness}


# instance files


def bundled_example() -> InstanceFile:
    text = resources.files("vlineq").joinpath("data").joinpath(EXAMPLE_RESOURCE).read_text()
    return parse_instance(text)


def run_check(inst: InstanceFile, index: int, cfg: GridConfig = DEFAULT_GRID) -> VerificationReport:
    """Run one check of an instance file and return its report."""
    c = inst.checks[index]
    ops, params = c.operands, c.params
    el = inst.elements
    elems = [el[n] for n in ops.get("elements", [])]
    suite = c.suite
    if suite in ("cauchy-schwarz", "cs-corollary", "cs-equality"):
        T = inst.forms[ops["form"]]
        u, v = el[ops["u"]].coords, el[ops["v"]].coords
        if suite == "cs-corollary":
            return corollary_fsquare_report(T, u, v, cfg)
        if suite == "cs-equality":
            return cs_equality_check(
                T,
                u,
                v,
                cfg,
                expect_equality=params.get("expect_equality"),
                expect_witness=params.get("expect_witness"),
                probe_count=int(params.get("probe_count", 10_000)),
                seed=int(params.get("seed", 0)),
                equality_tol=float(params.get("equality_tol", 1e-6)),
            )
        r = cauchy_schwarz_report(T, u, v, cfg)
        rep = VerificationReport(suite, grid_diagnostics=grid_diagnostics(cfg, [r.identity_residual]))
        rep.details = {"lhs": r.lhs, "rhs": r.rhs, "gap": r.gap, "gap_closed": r.gap_closed, "equality": r.equality}
        ok = r.identity_residual <= scaled_tol(cfg.grid_tol, r.rhs) and r.inequality_holds
        rep.record(ok, max(r.identity_residual, r.inequality_violation), {"u": u, "v": v})
        return rep
    if suite in ("maligranda", "hom-equality", "holder", "minkowski"):
        M: PositiveLinearMap = inst.maps[ops["map"]]
        if suite == "maligranda":
            return maligranda_check(M, elems, params["weights"], cfg)
        if suite == "hom-equality":
            return homomorphism_equality_check(M, elems, params["weights"], cfg)
        if suite == "holder":
            return holder_check(M, elems, params["exponents"], cfg)
        return minkowski_check(M, elems, params["p"], cfg)
    if suite == "power-rules":
        return check_power_rules(el[ops["a"]], float(params["p"]), float(params["q"]))

    rep = VerificationReport(suite, grid_diagnostics=grid_diagnostics(cfg))
    if suite == "lattice-axioms":
        f, g, h = el[ops["f"]], el[ops["g"]], el[ops["h"]]
        pairs = [
            (join(f, g), join(g, f)),
            (meet(f, join(g, h)), join(meet(f, g), meet(f, h))),
            (join(f, g) + meet(f, g), f + g),
            (abs_closed(f), join(f, -f)),
        ]
        worst = max(float(np.max(np.abs(a.coords - b.coords))) for a, b in pairs)
        rep.record(worst <= scaled_tol(cfg.abs_tol, f, g, h), worst, {"f": f, "g": g, "h": h})
        return rep
    if suite == "modulus":
        pair, sup, wit = modulus(el[ops["f"]], cfg), True, {"f": el[ops["f"]]}
    elif suite == "square-mean":
        pair, sup, wit = square_mean(el[ops["f"]], el[ops["g"]], cfg), True, dict(f=el[ops["f"]], g=el[ops["g"]])
    elif suite == "geometric-mean":
        pair, sup, wit = geometric_mean(el[ops["f"]], el[ops["g"]], cfg), False, dict(f=el[ops["f"]], g=el[ops["g"]])
    elif suite == "weighted-gm":
        pair, sup, wit = weighted_geometric_mean(elems, params["weights"], cfg), False, {"elements": elems}
    else:  # powers
        pair, sup, wit = power(el[ops["a"]], float(params["r"]), cfg), False, {"a": el[ops["a"]]}
    ok, violation, _, residual = _infimum_check(pair, cfg, sup=sup)
    rep.details = {"definitional": pair.definitional, "closed": pair.closed}
    rep.record(ok, violation, wit)
    rep.add_residual(residual)
    return rep


def run_instance(inst: InstanceFile, cfg: GridConfig = DEFAULT_GRID, suite: str | None = None) -> VerificationReport:
    """Run every check of ``inst`` (optionally only those of ``suite``), one subreport each."""
    if suite is not None and suite != "all" and suite not in TRIALS:
        raise DomainError(f"unknown suite {suite!r}")
    rep = VerificationReport("instance", grid_diagnostics=grid_diagnostics(cfg))
    for i, c in enumerate(inst.checks):
        if suite in (None, "all") or c.suite == suite:
            sub = run_check(inst, i, cfg)
            sub.details = {"check": i, **sub.details}
            rep.subreports.append(sub)
    _aggregate(rep)
    return rep


def run_instance_file(path, cfg: GridConfig = DEFAULT_GRID, suite: str | None = None) -> VerificationReport:
    return run_instance(load_instance(path), cfg, suite)


def config_with(cfg: GridConfig = DEFAULT_GRID, **changes) -> GridConfig:
    return replace(cfg, **{k: v for k, v in changes.items() if v is not None})
