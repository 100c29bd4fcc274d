"""Coordinatewise Archimedean vector lattices over R and C.

Elements of R^n carry the coordinatewise order; C^n is treated as the
complexification R^n + iR^n. Every lattice infimum or supremum of a
parametrized family is the coordinatewise infimum/supremum, so the
definitional evaluators below search each coordinate independently and
return alongside the closed form.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ._search import LOG_THETA_BOUND, angle_grid, grid_maximize, grid_minimize, log_theta_grid
from .errors import DimensionMismatchError, DomainError, FieldMismatchError


class ScalarField(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"

    @classmethod
    def parse(cls, value: "ScalarField | str") -> "ScalarField":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown scalar field {value!r}") from None


@dataclass(frozen=True, eq=False)
class LatticeElement:
    """Immutable vector of complex coordinates over a declared field."""

    field: ScalarField
    coords: np.ndarray

    def __post_init__(self):
        field = ScalarField.parse(self.field)
        coords = np.array(self.coords, dtype=np.complex128).reshape(-1)
        if coords.size < 1:
            raise DimensionMismatchError("lattice elements need dim >= 1")
        if not np.all(np.isfinite(coords)):
            raise DomainError("coordinates must be finite")
        if field is ScalarField.REAL and np.any(coords.imag != 0):
            raise FieldMismatchError("real-field element with nonzero imaginary part")
        coords.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", coords)

    # constructors

    @classmethod
    def real(cls, values: Iterable[float]) -> "LatticeElement":
        return cls(ScalarField.REAL, np.asarray(list(values), dtype=float))

    @classmethod
    def complex(cls, values: Iterable[complex]) -> "LatticeElement":
        return cls(ScalarField.COMPLEX, np.asarray(list(values), dtype=np.complex128))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]], field: ScalarField | str) -> "LatticeElement":
        arr = np.asarray(pairs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DomainError("coordinates must be a list of [re, im] pairs")
        return cls(ScalarField.parse(field), arr[:, 0] + 1j * arr[:, 1])

    @classmethod
    def zeros(cls, dim: int, field: ScalarField | str = ScalarField.REAL) -> "LatticeElement":
        return cls(ScalarField.parse(field), np.zeros(dim))

    @classmethod
    def ones(cls, dim: int, field: ScalarField | str = ScalarField.REAL) -> "LatticeElement":
        return cls(ScalarField.parse(field), np.ones(dim))

    def to_pairs(self) -> list[list[float]]:
        return [[float(z.real), float(z.imag)] for z in self.coords]

    # views

    @property
    def dim(self) -> int:
        return int(self.coords.size)

    @property
    def re(self) -> np.ndarray:
        return self.coords.real

    @property
    def im(self) -> np.ndarray:
        return self.coords.imag

    def is_positive(self) -> bool:
        """Membership in the positive cone: all coordinates real and >= 0."""
        return bool(np.all(self.coords.imag == 0) and np.all(self.coords.real >= 0))

    def with_coords(self, coords: np.ndarray) -> "LatticeElement":
        return replace(self, coords=coords)

    def conj(self) -> "LatticeElement":
        return self.with_coords(np.conj(self.coords))

    def equals(self, other: "LatticeElement") -> bool:
        return self.field is other.field and np.array_equal(self.coords, other.coords)

    def allclose(self, other: "LatticeElement", atol: float) -> bool:
        _check_compatible(self, other, same_field=False)
        return bool(np.all(np.abs(self.coords - other.coords) <= atol))

    # vector space operations

    def __add__(self, other: "LatticeElement") -> "LatticeElement":
        _check_compatible(self, other)
        return self.with_coords(self.coords + other.coords)

    def __sub__(self, other: "LatticeElement") -> "LatticeElement":
        _check_compatible(self, other)
        return self.with_coords(self.coords - other.coords)

    def __neg__(self) -> "LatticeElement":
        return self.with_coords(-self.coords)

    def __mul__(self, scalar: complex) -> "LatticeElement":
        if self.field is ScalarField.REAL and complex(scalar).imag != 0:
            raise FieldMismatchError("complex scalar on a real-field element")
        return self.with_coords(self.coords * scalar)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        if self.field is ScalarField.REAL:
            body = ", ".join(f"{x:g}" for x in self.coords.real)
        else:
            body = ", ".join(f"{z:g}" for z in self.coords)
        return f"LatticeElement({self.field.value}: [{body}])"


class Pair(NamedTuple):
    """Definitional (optimization) and closed-form evaluations of one quantity."""

    definitional: LatticeElement
    closed: LatticeElement


@dataclass(frozen=True)
class GridConfig:
    """Resolution of the parameter grids used by definitional evaluators.

    ``theta_points`` is the number of log-intervals over [1e-6, 1e6] (the grid
    has ``theta_points + 1`` nodes); the same count is used for the angle
    grid of the square mean. ``lambda_points`` defaults to 1024 for the
    complex field and to the two signs {+1, -1} for the real field.
    """

    theta_points: int = 4096
    lambda_points: int | None = None
    refine_iters: int = 60
    abs_tol: float = 1e-9
    grid_tol: float = 1e-4

    def __post_init__(self):
        if self.theta_points < 1 or self.refine_iters < 0:
            raise DomainError("theta_points must be >= 1 and refine_iters >= 0")
        if self.lambda_points is not None and self.lambda_points < 1:
            raise DomainError("lambda_points must be >= 1")

    def lambda_count(self, field: ScalarField) -> int:
        if field is ScalarField.REAL:
            return 2
        return self.lambda_points if self.lambda_points is not None else 1024

    def theta_grid(self) -> np.ndarray:
        return log_theta_grid(self.theta_points)

    def doubled(self) -> "GridConfig":
        return replace(self, theta_points=2 * self.theta_points)

    def scaled_abs_tol(self, *arrays) -> float:
        return scaled_tol(self.abs_tol, *arrays)


DEFAULT_GRID = GridConfig()


def scaled_tol(tol: float, *arrays) -> float:
    """``tol * (1 + largest magnitude among the inputs)``."""
    mags = [float(np.max(np.abs(_coords(a)))) for a in arrays if np.size(_coords(a))]
    return tol * (1.0 + max(mags, default=0.0))


def _coords(x) -> np.ndarray:
    return x.coords if isinstance(x, LatticeElement) else np.asarray(x)


def _check_compatible(f: LatticeElement, g: LatticeElement, *, same_field: bool = True) -> None:
    if same_field and f.field is not g.field:
        raise FieldMismatchError(f"field mismatch: {f.field.value} vs {g.field.value}")
    if f.dim != g.dim:
        raise DimensionMismatchError(f"dimension mismatch: {f.dim} vs {g.dim}")


def _require_real(*elems: LatticeElement, op: str) -> None:
    for e in elems:
        if e.field is not ScalarField.REAL:
            raise DomainError(f"{op} is defined on real-field elements only")


def _require_positive(*elems: LatticeElement, op: str) -> None:
    for e in elems:
        if not e.is_positive():
            raise DomainError(f"{op} requires arguments in the positive cone")


def join(f: LatticeElement, g: LatticeElement) -> LatticeElement:
    _check_compatible(f, g)
    _require_real(f, g, op="join")
    return f.with_coords(np.maximum(f.re, g.re))


def meet(f: LatticeElement, g: LatticeElement) -> LatticeElement:
    _check_compatible(f, g)
    _require_real(f, g, op="meet")
    return f.with_coords(np.minimum(f.re, g.re))


def abs_closed(f: LatticeElement) -> LatticeElement:
    """Closed-form modulus, as an element of the positive cone of ``f.field``."""
    return f.with_coords(np.abs(f.coords))


def modulus(f: LatticeElement, cfg: GridConfig = DEFAULT_GRID) -> Pair:
    """|f| as sup{Re(lambda f) : |lambda| = 1} and as sqrt(re^2 + im^2)."""
    closed = abs_closed(f)
    z = f.coords
    if f.field is ScalarField.REAL:
        signs = np.array([1.0, -1.0])
        definitional = np.max(z.real[:, None] * signs[None, :], axis=1)
    else:
        grid = angle_grid(cfg.lambda_count(f.field))

        def family(phi):
            return np.real(np.exp(1j * phi) * z[:, None])

        definitional, _ = grid_maximize(family, grid, cfg.refine_iters, periodic=True)
    return Pair(f.with_coords(definitional), closed)


def square_mean(f: LatticeElement, g: LatticeElement, cfg: GridConfig = DEFAULT_GRID) -> Pair:
    """f boxplus g = sup over theta of cos(theta) f + sin(theta) g."""
    _check_compatible(f, g)
    _require_real(f, g, op="square mean")
    x, y = f.re, g.re
    closed = np.hypot(x, y)
    grid = angle_grid(cfg.theta_points)

    def family(theta):
        return np.cos(theta) * x[:, None] + np.sin(theta) * y[:, None]

    definitional, _ = grid_maximize(family, grid, cfg.refine_iters, periodic=True)
    return Pair(f.with_coords(definitional), f.with_coords(closed))


def _half_inf_theta(x: np.ndarray, y: np.ndarray, cfg: GridConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate inf over theta > 0 of (theta x + y / theta) / 2.

    Searched in s = log(theta), where the family stays convex. Returns the
    values and the minimizing theta.
    """

    def family(s):
        t = np.exp(s)
        return 0.5 * (t * x[:, None] + y[:, None] / t)

    vals, s_best = grid_minimize(family, cfg.theta_grid(), cfg.refine_iters, extend=LOG_THETA_BOUND)
    return vals, np.exp(s_best)


def geometric_mean(f: LatticeElement, g: LatticeElement, cfg: GridConfig = DEFAULT_GRID) -> Pair:
    """f boxtimes g = inf over theta > 0 of (theta f + g / theta) / 2, on the positive cone.

    The closed form is sqrt(f g) coordinatewise. Where a coordinate of f or
    g is zero the infimum is an unattained limit; refinement then follows the
    family past the grid's end, up to |log theta| = 600.
    """
    closed = geometric_mean_closed(f, g)
    definitional, _ = _half_inf_theta(f.re, g.re, cfg)
    return Pair(f.with_coords(definitional.astype(complex)), closed)


def geometric_mean_closed(f: LatticeElement, g: LatticeElement) -> LatticeElement:
    """sqrt(f g) coordinatewise, for f, g in the positive cone."""
    _check_compatible(f, g)
    _require_positive(f, g, op="geometric mean")
    return f.with_coords(np.sqrt(f.re * g.re).astype(complex))
