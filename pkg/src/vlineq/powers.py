"""Phi-algebra structure on coordinatewise lattices.

Multiplication is coordinatewise with unit e = (1, ..., 1). Real powers of
positive elements are computed two ways: from the infimum of the family
``r~ t a + (1 - r~) t^(-r~/(1-r~)) e`` times the integer part ``a^floor(r)``,
and in closed form coordinatewise. The weighted geometric mean is handled
the same way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._search import LOG_THETA_BOUND, grid_minimize
from .errors import DimensionMismatchError, DomainError
from .lattice import (
    DEFAULT_GRID,
    GridConfig,
    LatticeElement,
    Pair,
    _check_compatible,
    _require_positive,
)
from .report import VerificationReport, grid_diagnostics

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class WeightVector:
    """Weights r_1..r_n in (0, 1) summing to 1.

    A single weight equal to 1 is accepted as the degenerate n = 1 case, in
    which the weighted geometric mean reduces to the modulus.
    """

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if not w:
            raise DomainError("weight vector must be nonempty")
        if len(w) == 1:
            if abs(w[0] - 1.0) > WEIGHT_SUM_TOL:
                raise DomainError("a single weight must equal 1")
            return
        if any(not (0.0 < x < 1.0) for x in w):
            raise DomainError("weights must lie in (0, 1)")
        if abs(math.fsum(w) - 1.0) > WEIGHT_SUM_TOL:
            raise DomainError(f"weights sum to {math.fsum(w)!r}, not 1")

    def __len__(self) -> int:
        return len(self.weights)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)


@dataclass(frozen=True)
class ExponentDecomposition:
    r: float
    floor_part: int
    frac_part: float

    @classmethod
    def of(cls, r: float) -> "ExponentDecomposition":
        r = float(r)
        if not (r > 0.0) or not math.isfinite(r):
            raise DomainError(f"exponent must be a positive real, got {r!r}")
        n = math.floor(r)
        return cls(r, n, r - n)


def unit(dim: int, like: LatticeElement | None = None) -> LatticeElement:
    field = like.field if like is not None else "real"
    return LatticeElement.ones(dim, field)


def multiply(a: LatticeElement, b: LatticeElement) -> LatticeElement:
    _check_compatible(a, b)
    return a.with_coords(a.coords * b.coords)


def multiply_all(elems: Sequence[LatticeElement]) -> LatticeElement:
    if not elems:
        raise DomainError("empty product")
    out = elems[0]
    for e in elems[1:]:
        out = multiply(out, e)
    return out


def integer_power(a: LatticeElement, n: int) -> LatticeElement:
    """a^n by repeated multiplication, with a^0 = e."""
    if n < 0:
        raise DomainError("negative integer powers are not supported")
    out = unit(a.dim, a)
    for _ in range(n):
        out = multiply(out, a)
    return out


def nth_root(a: LatticeElement, n: int) -> LatticeElement:
    """The unique positive r with r^n = a, coordinatewise."""
    if int(n) != n or n < 1:
        raise DomainError("root order must be a positive integer")
    _require_positive(a, op="nth_root")
    return a.with_coords(_real_root(a.re, int(n)).astype(complex))


def _real_root(x: np.ndarray, n: int) -> np.ndarray:
    if n == 1:
        return x.copy()
    if n == 2:
        return np.sqrt(x)
    if n == 3:
        return np.cbrt(x)
    return np.power(x, 1.0 / n)


def _closed_power(x: np.ndarray, r: float) -> np.ndarray:
    # 0^r = 0 for r > 0, which numpy already gives.
    return np.power(x, r)


def power_closed(a: LatticeElement, r: float) -> LatticeElement:
    _require_positive(a, op="power")
    ExponentDecomposition.of(r)
    return a.with_coords(_closed_power(a.re, float(r)).astype(complex))


def _frac_power_inf(x: np.ndarray, frac: float, cfg: GridConfig) -> np.ndarray:
    """inf over t > 0 of frac * t * x + (1 - frac) * t^(-frac/(1-frac)), per coordinate."""
    slope = frac / (1.0 - frac)
    with np.errstate(divide="ignore"):
        log_x = np.log(x)[:, None]

    def family(s):
        return frac * np.exp(s + log_x) + (1.0 - frac) * np.exp(-slope * s)

    # For x = 0 the infimum 0 is approached like t^-slope, which is slow for
    # small fractional parts; follow it until the tail is below e^-600.
    extend = np.where(x == 0, LOG_THETA_BOUND / min(slope, 1.0), LOG_THETA_BOUND)
    vals, _ = grid_minimize(family, cfg.theta_grid(), cfg.refine_iters, extend=extend)
    return vals


def power(a: LatticeElement, r: float, cfg: GridConfig = DEFAULT_GRID) -> Pair:
    """a^r for a in the positive cone and r > 0.

    The definitional value is ``a^floor(r)`` times the infimum over the
    constraint curve ``t1^f t2^(1-f) = 1`` (f the fractional part), which is
    parametrized by ``t1 = t``. For integer r the infimum factor is e.
    """
    _require_positive(a, op="power")
    dec = ExponentDecomposition.of(r)
    head = integer_power(a, dec.floor_part)
    if dec.frac_part == 0.0:
        definitional = head
    else:
        factor = _frac_power_inf(a.re, dec.frac_part, cfg)
        definitional = multiply(head, a.with_coords(factor.astype(complex)))
    return Pair(definitional, power_closed(a, r))


def _as_weights(w) -> WeightVector:
    return w if isinstance(w, WeightVector) else WeightVector(tuple(w))


def _check_family(fs: Sequence[LatticeElement], w: WeightVector) -> None:
    if len(fs) == 0:
        raise DomainError("need at least one element")
    if len(fs) != len(w):
        raise DimensionMismatchError(f"{len(fs)} elements but {len(w)} weights")
    for f in fs[1:]:
        _check_compatible(fs[0], f)


def weighted_geometric_mean_closed(fs: Sequence[LatticeElement], w) -> LatticeElement:
    """prod_k |f_k|^{r_k}, coordinatewise, in the positive cone of fs' field."""
    w = _as_weights(w)
    _check_family(fs, w)
    mods = np.stack([np.abs(f.coords) for f in fs])
    closed = np.prod(mods ** w.as_array()[:, None], axis=0)
    return fs[0].with_coords(closed.astype(complex))


MAX_SWEEPS = 100
LINE_HALF_WIDTH = 50.0


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(fun, lo: np.ndarray, hi: np.ndarray, iters: int) -> np.ndarray:
    """Vectorized golden-section search of convex slices; returns the bracket midpoints."""
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1 = fun(x1[:, None])[:, 0]
    f2 = fun(x2[:, None])[:, 0]
    for _ in range(iters):
        left = f1 < f2
        # left: minimum in [lo, x2]; otherwise in [x1, hi]
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        new_x = np.where(left, hi - _INV_PHI * (hi - lo), lo + _INV_PHI * (hi - lo))
        new_f = fun(new_x[:, None])[:, 0]
        x1, x2, f1, f2 = (
            np.where(left, new_x, x2),
            np.where(left, x1, new_x),
            np.where(left, new_f, f2),
            np.where(left, f1, new_f),
        )
    return 0.5 * (lo + hi)


def _wgm_inf(mods: np.ndarray, r: np.ndarray, cfg: GridConfig) -> np.ndarray:
    """inf of sum_k r_k theta_k x_k subject to prod_k theta_k^{r_k} = 1.

    Works in s_k = log(theta_k) for k < n with s_n solved from the constraint,
    so every sample is feasible. One sweep draws each free s_k from the theta
    grid; refinement is cyclic coordinate descent along the pair directions
    ``s_k += d / r_k, s_l -= d / r_l`` (which keep the constraint), each a
    convex one-dimensional slice searched by ternary search.
    """
    n, dim = mods.shape
    if n == 1:
        return mods[0].copy()
    r_free, r_last = r[:-1], r[-1]
    grid = cfg.theta_grid()
    bound = LOG_THETA_BOUND

    def objective(s_free):
        # s_free: (n - 1, dim, k); s_n is solved from the constraint
        s_last = -np.einsum("i,ijk->jk", r_free, s_free) / r_last
        out = np.full(s_last.shape, np.inf)
        ok = np.abs(s_last) <= bound
        terms = np.einsum("i,ijk->jk", r_free, np.exp(s_free) * mods[:-1, :, None])
        out[ok] = terms[ok] + r_last * np.exp(s_last[ok]) * np.broadcast_to(mods[-1][:, None], s_last.shape)[ok]
        return out

    s = np.zeros((n - 1, dim))
    cands = np.append(grid, 0.0)
    for k in range(n - 1):
        trial = np.repeat(s[:, :, None], cands.size, axis=2)
        trial[k] = cands[None, :]
        s[k] = cands[np.argmin(objective(trial), axis=1)]

    s_all = np.vstack([s, -(r_free[:, None] * s).sum(axis=0) / r_last])
    pairs = [(k, l) for k in range(n) for l in range(k + 1, n)]
    value = (r[:, None] * np.exp(s_all) * mods).sum(axis=0)
    for _ in range(MAX_SWEEPS):
        before = value
        for k, l in pairs:
            terms = r[:, None] * np.exp(s_all) * mods
            base = (terms.sum(axis=0) - terms[k] - terms[l])[:, None]
            ck, cl = (r[k] * mods[k])[:, None], (r[l] * mods[l])[:, None]
            sk, sl = s_all[k][:, None], s_all[l][:, None]

            def along(t, ck=ck, cl=cl, sk=sk, sl=sl, base=base, k=k, l=l):
                return base + ck * np.exp(sk + t / r[k]) + cl * np.exp(sl - t / r[l])

            # keep both moved parameters inside [-bound, bound]
            lo = np.maximum.reduce([
                np.full(dim, -LINE_HALF_WIDTH),
                (-bound - s_all[k]) * r[k],
                (s_all[l] - bound) * r[l],
            ])
            hi = np.minimum.reduce([
                np.full(dim, LINE_HALF_WIDTH),
                (bound - s_all[k]) * r[k],
                (s_all[l] + bound) * r[l],
            ])
            stuck = lo > hi
            lo = np.where(stuck, 0.0, lo)
            hi = np.where(stuck, 0.0, hi)
            t = _golden_min(along, lo, hi, cfg.refine_iters)
            moved = s_all.copy()
            moved[k] += t / r[k]
            moved[l] -= t / r[l]
            cand = (r[:, None] * np.exp(moved) * mods).sum(axis=0)
            better = cand < value
            s_all = np.where(better[None, :], moved, s_all)
            value = np.where(better, cand, value)
        if np.all(before - value <= 1e-14 * (1.0 + np.abs(value))):
            break
    # Report the value at an exactly feasible point: s_n re-solved.
    s_free = s_all[:-1]
    s_last = -(r_free[:, None] * s_free).sum(axis=0) / r_last
    return (r_free[:, None] * np.exp(s_free) * mods[:-1]).sum(axis=0) + r_last * np.exp(s_last) * mods[-1]


def weighted_geometric_mean(fs: Sequence[LatticeElement], w, cfg: GridConfig = DEFAULT_GRID) -> Pair:
    """Weighted geometric mean of the moduli |f_k| with weights w."""
    w = _as_weights(w)
    _check_family(fs, w)
    mods = np.stack([np.abs(f.coords) for f in fs])
    definitional = _wgm_inf(mods, w.as_array(), cfg)
    return Pair(fs[0].with_coords(definitional.astype(complex)), weighted_geometric_mean_closed(fs, w))


def _rel_gap(x: np.ndarray, y: np.ndarray) -> float:
    scale = np.maximum(np.abs(x), np.abs(y))
    diff = np.abs(x - y)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, diff / np.where(scale > 0, scale, 1.0), 0.0)
    return float(np.max(rel))


def check_power_rules(a: LatticeElement, p: float, q: float, rtol: float = 1e-9) -> VerificationReport:
    """(a^p)^q = a^{pq} and a^p a^q = a^{p+q}, using closed forms, to relative ``rtol``."""
    _require_positive(a, op="power rules")
    ap = power_closed(a, p)
    nested = power_closed(ap, q).re
    direct = power_closed(a, p * q).re
    prod = multiply(ap, power_closed(a, q)).re
    summed = power_closed(a, p + q).re
    composition = _rel_gap(nested, direct)
    product = _rel_gap(prod, summed)
    rep = VerificationReport("power-rules", grid_diagnostics=grid_diagnostics(DEFAULT_GRID))
    rep.details = {
        "rtol": rtol,
        "composition_rel_error": composition,
        "product_rel_error": product,
        "composition": {"nested": nested, "direct": direct},
        "product": {"multiplied": prod, "summed": summed},
    }
    worst = max(composition, product)
    rep.record(worst <= rtol, worst, {"a": a, "p": p, "q": q})
    return rep
