"""Positive linear maps between coordinatewise lattices.

A linear map R^m -> R^n is positive iff its matrix is entrywise nonnegative,
and a vector lattice homomorphism iff, in addition, every row has at most
one strictly positive entry. Maps act on complex elements entrywise on the
real and imaginary parts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, DomainError
from .lattice import DEFAULT_GRID, GridConfig, LatticeElement, ScalarField, abs_closed, scaled_tol
from .powers import (
    WeightVector,
    multiply,
    multiply_all,
    power_closed,
    weighted_geometric_mean_closed,
)
from .report import VerificationReport, grid_diagnostics
from .sesquilinear import EQUALITY_TOL

EXPONENT_SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PositiveLinearMap:
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.ndim == 1:
            m = m[np.newaxis, :]
        if m.ndim != 2 or 0 in m.shape:
            raise DimensionMismatchError("map entries must form a nonempty 2-D matrix")
        if not np.all(np.isfinite(m)):
            raise DomainError("map entries must be finite")
        if np.any(m < 0):
            raise DomainError("a positive map needs nonnegative entries")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def in_dim(self) -> int:
        return int(self.entries.shape[1])

    @property
    def out_dim(self) -> int:
        return int(self.entries.shape[0])

    def is_lattice_homomorphism(self) -> bool:
        return bool(np.all(np.count_nonzero(self.entries > 0, axis=1) <= 1))

    def __call__(self, a: LatticeElement) -> LatticeElement:
        return apply(self, a)


@dataclass(frozen=True)
class ExponentVector:
    """Conjugate exponents p_1..p_n in (1, inf) with sum of reciprocals 1."""

    exponents: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(x) for x in self.exponents)
        object.__setattr__(self, "exponents", p)
        if len(p) < 2:
            raise DomainError("need at least two exponents")
        if any(not (x > 1.0) or not math.isfinite(x) for x in p):
            raise DomainError("exponents must lie in (1, inf)")
        total = math.fsum(1.0 / x for x in p)
        if abs(total - 1.0) > EXPONENT_SUM_TOL:
            raise DomainError(f"reciprocal exponents sum to {total!r}, not 1")

    def __len__(self) -> int:
        return len(self.exponents)

    def weights(self) -> WeightVector:
        return WeightVector(tuple(1.0 / x for x in self.exponents))


def apply(M: PositiveLinearMap, a: LatticeElement) -> LatticeElement:
    if a.dim != M.in_dim:
        raise DimensionMismatchError(f"map expects dim {M.in_dim}, got {a.dim}")
    out = M.entries @ a.re + 1j * (M.entries @ a.im)
    return LatticeElement(a.field, out)


def _as_map(M) -> PositiveLinearMap:
    return M if isinstance(M, PositiveLinearMap) else PositiveLinearMap(np.asarray(M))


def _as_weights(w) -> WeightVector:
    return w if isinstance(w, WeightVector) else WeightVector(tuple(w))


def _as_exponents(p) -> ExponentVector:
    return p if isinstance(p, ExponentVector) else ExponentVector(tuple(p))


def _mods(fs: Sequence[LatticeElement]) -> list[LatticeElement]:
    return [abs_closed(f) for f in fs]


def _witness(M: PositiveLinearMap, fs, **extra) -> dict:
    return {"map": M.entries, "elements": list(fs), **extra}


def maligranda_sides(M, fs: Sequence[LatticeElement], w) -> tuple[LatticeElement, LatticeElement]:
    """T(triangle(f_k, r_k)) and triangle(T|f_k|, r_k), closed forms."""
    M = _as_map(M)
    w = _as_weights(w)
    lhs = apply(M, weighted_geometric_mean_closed(fs, w))
    rhs = weighted_geometric_mean_closed([apply(M, f) for f in _mods(fs)], w)
    return lhs, rhs


def maligranda_check(M, fs: Sequence[LatticeElement], w, cfg: GridConfig = DEFAULT_GRID) -> VerificationReport:
    """T applied to the weighted geometric mean is below the mean of T|f_k|."""
    M = _as_map(M)
    lhs, rhs = maligranda_sides(M, fs, w)
    tol = scaled_tol(cfg.abs_tol, lhs, rhs)
    excess = float(np.max(lhs.re - rhs.re))
    rep = VerificationReport("maligranda", grid_diagnostics=grid_diagnostics(cfg))
    rep.details = {"lhs": lhs, "rhs": rhs, "tol": tol, "equality": bool(np.all(np.abs(lhs.re - rhs.re) <= tol))}
    rep.record(excess <= tol, max(excess, 0.0), _witness(M, fs, weights=_as_weights(w).weights))
    return rep


def homomorphism_equality_check(M, fs: Sequence[LatticeElement], w, cfg: GridConfig = DEFAULT_GRID) -> VerificationReport:
    """Equality T(triangle(f_k)) = triangle(T f_k) for lattice homomorphisms.

    For maps that are not homomorphisms only the inequality is asserted for
    this instance; strictness needs a witness from
    :func:`strictness_witness_search`.
    """
    M = _as_map(M)
    w = _as_weights(w)
    lhs = apply(M, weighted_geometric_mean_closed(fs, w))
    rhs = weighted_geometric_mean_closed([apply(M, f) for f in fs], w)
    tol = scaled_tol(cfg.abs_tol, lhs, rhs)
    hom = M.is_lattice_homomorphism()
    diff = lhs.re - rhs.re
    if hom:
        violation = float(np.max(np.abs(diff)))
    else:
        # the mean takes moduli, so compare against T|f_k| as in the inequality
        _, rhs = maligranda_sides(M, fs, w)
        diff = lhs.re - rhs.re
        violation = float(np.max(diff))
    rep = VerificationReport("hom-equality", grid_diagnostics=grid_diagnostics(cfg))
    rep.details = {
        "homomorphism": hom,
        "asserted": "equality" if hom else "inequality",
        "lhs": lhs,
        "rhs": rhs,
        "tol": tol,
        "strict": bool(np.any(rhs.re - lhs.re > EQUALITY_TOL)),
    }
    rep.record(violation <= tol, max(violation, 0.0), _witness(M, fs, weights=w.weights))
    return rep


@dataclass(frozen=True)
class StrictnessWitness:
    elements: tuple[LatticeElement, ...]
    weights: WeightVector
    margin: float  # max coordinate of rhs - lhs
    trial: int


def strictness_witness_search(
    M, trials: int, seed: int, cfg: GridConfig = DEFAULT_GRID, equality_tol: float = EQUALITY_TOL
) -> StrictnessWitness | None:
    """Random search for fs, w with a strict Maligranda inequality.

    Each trial draws two or three nonnegative elements whose coordinates
    are zeroed at random, so disjointly supported pairs come up often, and
    a random weight vector. The result is witness-based evidence only: a
    finite search cannot certify that no witness exists.
    """
    M = _as_map(M)
    if M.is_lattice_homomorphism():
        raise DomainError("strictness witnesses do not exist for lattice homomorphisms")
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        n = int(rng.integers(2, 4))
        fs = []
        for _ in range(n):
            x = rng.uniform(0.0, 10.0, M.in_dim) * (rng.random(M.in_dim) < 0.5)
            fs.append(LatticeElement.real(x))
        w = WeightVector(tuple(_random_weights(rng, n)))
        lhs, rhs = maligranda_sides(M, fs, w)
        margin = float(np.max(rhs.re - lhs.re))
        if margin > equality_tol:
            return StrictnessWitness(tuple(fs), w, margin, trial)
    return None


def _random_weights(rng: np.random.Generator, n: int, floor: float = 0.05) -> np.ndarray:
    """Weights in (floor, 1) summing to 1, with the last one absorbing rounding."""
    while True:
        w = rng.dirichlet(np.ones(n))
        if np.all(w > floor):
            w[-1] = 1.0 - math.fsum(w[:-1])
            return w


def holder_sides(M, as_: Sequence[LatticeElement], p) -> dict[str, LatticeElement]:
    M = _as_map(M)
    p = _as_exponents(p)
    if len(as_) != len(p):
        raise DimensionMismatchError(f"{len(as_)} elements but {len(p)} exponents")
    mods = _mods(as_)
    lhs = apply(M, multiply_all(mods))
    images = [apply(M, power_closed(a, pk)) for a, pk in zip(mods, p.exponents)]
    rhs_product = multiply_all([power_closed(t, 1.0 / pk) for t, pk in zip(images, p.exponents)])
    rhs_mean = weighted_geometric_mean_closed(images, p.weights())
    return {"lhs": lhs, "rhs_product": rhs_product, "rhs_mean": rhs_mean}


def holder_check(M, as_: Sequence[LatticeElement], p, cfg: GridConfig = DEFAULT_GRID) -> VerificationReport:
    """T(prod |a_k|) <= prod T(|a_k|^p_k)^(1/p_k), in product and mean forms."""
    M = _as_map(M)
    sides = holder_sides(M, as_, p)
    lhs, r1, r2 = sides["lhs"], sides["rhs_product"], sides["rhs_mean"]
    tol = scaled_tol(cfg.abs_tol, lhs, r1, r2)
    excess1 = float(np.max(lhs.re - r1.re))
    excess2 = float(np.max(lhs.re - r2.re))
    disagreement = float(np.max(np.abs(r1.re - r2.re)))
    ok = excess1 <= tol and excess2 <= tol and disagreement <= tol
    rep = VerificationReport("holder", grid_diagnostics=grid_diagnostics(cfg))
    rep.details = {
        **sides,
        "tol": tol,
        "product_form_excess": excess1,
        "mean_form_excess": excess2,
        "form_disagreement": disagreement,
    }
    violation = max(excess1, excess2, disagreement, 0.0)
    rep.record(ok, violation, _witness(M, as_, exponents=_as_exponents(p).exponents))
    return rep


def minkowski_sides(M, as_: Sequence[LatticeElement], p: float) -> tuple[LatticeElement, LatticeElement]:
    M = _as_map(M)
    p = float(p)
    if not (p > 1.0) or not math.isfinite(p):
        raise DomainError("Minkowski exponent must lie in (1, inf)")
    if not as_:
        raise DomainError("need at least one summand")
    total = as_[0]
    for a in as_[1:]:
        total = total + a
    lhs = power_closed(apply(M, power_closed(abs_closed(total), p)), 1.0 / p)
    terms = [power_closed(apply(M, power_closed(abs_closed(a), p)), 1.0 / p) for a in as_]
    rhs = terms[0]
    for t in terms[1:]:
        rhs = rhs + t
    return lhs, rhs


def minkowski_check(M, as_: Sequence[LatticeElement], p: float, cfg: GridConfig = DEFAULT_GRID) -> VerificationReport:
    """(T|sum a_k|^p)^(1/p) <= sum (T|a_k|^p)^(1/p), coordinatewise."""
    M = _as_map(M)
    lhs, rhs = minkowski_sides(M, as_, p)
    tol = scaled_tol(cfg.abs_tol, lhs, rhs)
    excess = float(np.max(lhs.re - rhs.re))
    rep = VerificationReport("minkowski", grid_diagnostics=grid_diagnostics(cfg))
    rep.details = {"lhs": lhs, "rhs": rhs, "tol": tol, "equality": bool(np.all(np.abs(lhs.re - rhs.re) <= tol))}
    rep.record(excess <= tol, max(excess, 0.0), _witness(M, as_, p=float(p)))
    return rep


def random_positive_map(rng: np.random.Generator, out_dim: int, in_dim: int, density: float = 1.0) -> PositiveLinearMap:
    m = rng.uniform(0.0, 1.0, (out_dim, in_dim))
    if density < 1.0:
        m = m * (rng.random((out_dim, in_dim)) < density)
    return PositiveLinearMap(m)


def random_lattice_homomorphism(rng: np.random.Generator, out_dim: int, in_dim: int) -> PositiveLinearMap:
    """One positive entry (or none) per row, at a random column."""
    m = np.zeros((out_dim, in_dim))
    for i in range(out_dim):
        if rng.random() < 0.9:
            m[i, rng.integers(in_dim)] = rng.uniform(0.1, 3.0)
    return PositiveLinearMap(m)


def random_non_homomorphism(rng: np.random.Generator, out_dim: int, in_dim: int) -> PositiveLinearMap:
    """A positive map with at least one row holding two positive entries."""
    if in_dim < 2:
        raise DomainError("non-homomorphisms need in_dim >= 2")
    while True:
        M = random_positive_map(rng, out_dim, in_dim, density=0.6)
        if not M.is_lattice_homomorphism():
            return M


def as_real(elem: LatticeElement) -> LatticeElement:
    return LatticeElement(ScalarField.REAL, elem.re)


__all__ = [
    "ExponentVector",
    "PositiveLinearMap",
    "StrictnessWitness",
    "apply",
    "holder_check",
    "holder_sides",
    "homomorphism_equality_check",
    "maligranda_check",
    "maligranda_sides",
    "minkowski_check",
    "minkowski_sides",
    "multiply",
    "random_lattice_homomorphism",
    "random_non_homomorphism",
    "random_positive_map",
    "strictness_witness_search",
]
