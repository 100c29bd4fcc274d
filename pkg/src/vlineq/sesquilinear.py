"""Sesquilinear maps V x V -> K^n as families of Hermitian matrices.

Coordinate j of T(u, v) is ``sum_{p,q} A_j[p, q] u_p conj(v_q)``. The
Cauchy-Schwarz gap ``inf_{z != 0} |z|^-1 T(zu - v, zu - v)`` is computed per
coordinate over z = theta * lambda. By sesquilinearity the family equals
``theta T(u,u) + T(v,v) / theta - 2 Re(lambda T(u,v))``, which separates into
an infimum over theta and a supremum over lambda; both are searched on their
grids with refinement.
"""
from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from ._search import angle_grid, grid_maximize
from .errors import DimensionMismatchError, FieldMismatchError, FormError
from .lattice import (
    DEFAULT_GRID,
    GridConfig,
    LatticeElement,
    Pair,
    ScalarField,
    _half_inf_theta,
    abs_closed,
    geometric_mean_closed,
    scaled_tol,
)
from .powers import multiply, nth_root
from .report import VerificationReport, grid_diagnostics

EQUALITY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SesquilinearForm:
    field: ScalarField
    matrices: np.ndarray

    def __post_init__(self):
        field = ScalarField.parse(self.field)
        mats = np.array(self.matrices, dtype=np.complex128)
        if mats.ndim == 2:
            mats = mats[np.newaxis]
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2] or mats.shape[0] < 1 or mats.shape[1] < 1:
            raise DimensionMismatchError("matrices must have shape (n, m, m) with n, m >= 1")
        if not np.all(np.isfinite(mats)):
            raise FormError("matrix entries must be finite")
        if field is ScalarField.REAL and np.any(mats.imag != 0):
            raise FieldMismatchError("real-field form with complex matrix entries")
        mats.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "matrices", mats)

    @property
    def domain_dim(self) -> int:
        return int(self.matrices.shape[1])

    @property
    def codomain_dim(self) -> int:
        return int(self.matrices.shape[0])

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.matrices - np.conj(np.swapaxes(self.matrices, 1, 2)))))

    def is_hermitian(self, tol: float = 1e-9) -> bool:
        return self.hermitian_defect() <= scaled_tol(tol, self.matrices)

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.matrices + np.conj(np.swapaxes(self.matrices, 1, 2)))
        return float(np.min(np.linalg.eigvalsh(herm)))

    def is_psd(self, tol: float = 1e-9, probes: int = 32, seed: int = 0) -> bool:
        """Eigenvalue test plus a probe-vector test, both at ``-tol`` scaled by the entries."""
        scale = scaled_tol(tol, self.matrices)
        if self.min_eigenvalue() < -scale:
            return False
        rng = np.random.default_rng(seed)
        m = self.domain_dim
        vecs = rng.standard_normal((probes, m))
        if self.field is ScalarField.COMPLEX:
            vecs = vecs + 1j * rng.standard_normal((probes, m))
        quad = np.einsum("kp,jpq,kq->kj", vecs, self.matrices, np.conj(vecs)).real
        norms = np.sum(np.abs(vecs) ** 2, axis=1)[:, None]
        return bool(np.all(quad >= -scale * norms))

    def validate(self, tol: float = 1e-9) -> None:
        if not self.is_hermitian(tol):
            raise FormError(f"form is not conjugate symmetric (defect {self.hermitian_defect():.3e})")
        if not self.is_psd(tol):
            raise FormError(f"form is not positive semidefinite (min eigenvalue {self.min_eigenvalue():.3e})")

    @classmethod
    def hermitian(cls, field, matrices) -> "SesquilinearForm":
        """Build a form from matrices symmetrized to be exactly Hermitian."""
        mats = np.array(matrices, dtype=np.complex128)
        if mats.ndim == 2:
            mats = mats[np.newaxis]
        mats = 0.5 * (mats + np.conj(np.swapaxes(mats, 1, 2)))
        return cls(field, mats)


def coordinate_form(field: ScalarField | str = ScalarField.COMPLEX) -> SesquilinearForm:
    """T((z1, z2), (w1, w2)) = (z1 conj(w1), z2 conj(w2)) on K^2."""
    return SesquilinearForm(field, np.array([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]))


def _as_vector(x, T: SesquilinearForm, name: str) -> np.ndarray:
    if isinstance(x, LatticeElement):
        if T.field is ScalarField.REAL and x.field is not ScalarField.REAL:
            raise FieldMismatchError(f"{name} is complex but the form is real")
        vec = x.coords
    else:
        vec = np.asarray(x, dtype=np.complex128).reshape(-1)
        if T.field is ScalarField.REAL and np.any(vec.imag != 0):
            raise FieldMismatchError(f"{name} is complex but the form is real")
    if vec.size != T.domain_dim:
        raise DimensionMismatchError(f"{name} has length {vec.size}, form expects {T.domain_dim}")
    return vec


def _evaluate_coords(mats: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    # Done in explicit real arithmetic: numpy's complex multiply may use fused
    # multiply-add, which breaks conj(a b) == conj(a) conj(b) at the last bit.
    # Terms (p, q) and (q, p) are then added pairwise in a fixed order, so
    # T(u, v) == conj(T(v, u)) and T(u, u) is real, bit for bit, for exactly
    # Hermitian matrices.
    ur, ui = u.real, u.imag
    vr, vi = v.real, v.imag
    xr = ur[:, None] * vr[None, :] + ui[:, None] * vi[None, :]
    xi = ui[:, None] * vr[None, :] - ur[:, None] * vi[None, :]
    ar, ai = mats.real, mats.imag
    tr = ar * xr[None] - ai * xi[None]
    ti = ar * xi[None] + ai * xr[None]
    m = u.size
    diag_r = np.sum(np.diagonal(tr, axis1=1, axis2=2), axis=1)
    diag_i = np.sum(np.diagonal(ti, axis1=1, axis2=2), axis=1)
    iu, ju = np.triu_indices(m, k=1)
    off_r = np.sum(tr[:, iu, ju] + tr[:, ju, iu], axis=1)
    off_i = np.sum(ti[:, iu, ju] + ti[:, ju, iu], axis=1)
    return (diag_r + off_r) + 1j * (diag_i + off_i)


def evaluate(T: SesquilinearForm, u, v) -> LatticeElement:
    uu = _as_vector(u, T, "u")
    vv = _as_vector(v, T, "v")
    out = _evaluate_coords(T.matrices, uu, vv)
    if T.field is ScalarField.REAL:
        out = out.real.astype(complex)
    return LatticeElement(T.field, out)


@dataclass(frozen=True)
class _Terms:
    uu: np.ndarray  # T(u,u), real, clipped at 0
    vv: np.ndarray
    uv: np.ndarray  # T(u,v), complex


def _terms(T: SesquilinearForm, u, v, tol: float) -> _Terms:
    uu = _as_vector(u, T, "u")
    vv = _as_vector(v, T, "v")
    a = _evaluate_coords(T.matrices, uu, uu).real
    c = _evaluate_coords(T.matrices, vv, vv).real
    b = _evaluate_coords(T.matrices, uu, vv)
    if T.field is ScalarField.REAL:
        b = b.real.astype(complex)
    floor = -scaled_tol(tol, a, c)
    if np.any(a < floor) or np.any(c < floor):
        raise FormError("T(u,u) or T(v,v) is negative: form is not positive semidefinite")
    return _Terms(np.maximum(a, 0.0), np.maximum(c, 0.0), b)


def _lambda_sup(b: np.ndarray, field: ScalarField, cfg: GridConfig) -> tuple[np.ndarray, np.ndarray]:
    """sup over |lambda| = 1 of Re(lambda b), per coordinate, with the maximizer."""
    if field is ScalarField.REAL:
        signs = np.where(b.real >= 0, 1.0, -1.0)
        return np.abs(b.real), signs.astype(complex)
    grid = angle_grid(cfg.lambda_count(field))

    def family(phi):
        return np.real(np.exp(1j * phi) * b[:, None])

    vals, phi = grid_maximize(family, grid, cfg.refine_iters, periodic=True)
    # Phase alignment seed: lambda = conj(b)/|b| makes lambda b real and maximal.
    aligned = -np.angle(b)
    seed_vals = np.real(np.exp(1j * aligned) * b)
    use_seed = seed_vals > vals
    return np.where(use_seed, seed_vals, vals), np.exp(1j * np.where(use_seed, aligned, phi))


@dataclass(frozen=True)
class GapResult:
    definitional: LatticeElement
    closed: LatticeElement
    minimizer: np.ndarray  # z per coordinate attaining the definitional value
    literal: np.ndarray  # |z|^-1 T(zu - v, zu - v) at the minimizer; nan beyond the grid

    def as_pair(self) -> Pair:
        return Pair(self.definitional, self.closed)


def cs_gap_detail(T: SesquilinearForm, u, v, cfg: GridConfig = DEFAULT_GRID) -> GapResult:
    T.validate(cfg.abs_tol)
    t = _terms(T, u, v, cfg.abs_tol)
    half_theta, theta = _half_inf_theta(t.uu, t.vv, cfg)
    lam_sup, lam = _lambda_sup(t.uv, T.field, cfg)
    definitional = 2.0 * half_theta - 2.0 * lam_sup
    closed = 2.0 * (np.sqrt(t.uu * t.vv) - np.abs(t.uv))

    z = theta * lam
    # Direct evaluation of the family at the minimizer, as a cross-check of
    # the separated search; minimizers beyond the grid (unattained limits)
    # would overflow and are left out.
    theta_lo, theta_hi = np.exp(cfg.theta_grid()[[0, -1]])
    inside = (theta >= theta_lo) & (theta <= theta_hi)
    uu = _as_vector(u, T, "u")
    vv = _as_vector(v, T, "v")
    literal = np.full(T.codomain_dim, np.nan)
    for j in np.flatnonzero(inside):
        w = z[j] * uu - vv
        literal[j] = _evaluate_coords(T.matrices[j : j + 1], w, w)[0].real / abs(z[j])

    elem = LatticeElement.real
    return GapResult(elem(definitional), elem(closed), z, literal)


def cs_gap(T: SesquilinearForm, u, v, cfg: GridConfig = DEFAULT_GRID) -> Pair:
    """Cauchy-Schwarz gap, definitional (grid over z) and closed form.

    The closed form is ``2 (sqrt(T(u,u) T(v,v)) - |T(u,v)|)`` coordinatewise.
    """
    return cs_gap_detail(T, u, v, cfg).as_pair()


@dataclass(frozen=True)
class CauchySchwarzReport:
    lhs: LatticeElement  # |T(u,v)|
    rhs: LatticeElement  # T(u,u) boxtimes T(v,v)
    gap: LatticeElement  # definitional gap
    gap_closed: LatticeElement
    identity_residual: float
    inequality_violation: float
    literal_residual: float
    equality: bool
    equality_tol: float

    @property
    def inequality_holds(self) -> bool:
        return self.inequality_violation == 0.0


def cauchy_schwarz_report(
    T: SesquilinearForm,
    u,
    v,
    cfg: GridConfig = DEFAULT_GRID,
    equality_tol: float = EQUALITY_TOL,
) -> CauchySchwarzReport:
    """|T(u,v)| against T(u,u) boxtimes T(v,v) and the gap identity.

    ``inequality_violation`` is the amount by which ``lhs`` exceeds ``rhs``
    beyond ``abs_tol``; ``equality`` is decided on the definitional gap with
    the separate ``equality_tol`` since that gap carries grid error.
    """
    detail = cs_gap_detail(T, u, v, cfg)
    t = _terms(T, u, v, cfg.abs_tol)
    field = ScalarField.REAL
    lhs = abs_closed(LatticeElement(field, np.abs(t.uv)))
    rhs = geometric_mean_closed(LatticeElement(field, t.uu), LatticeElement(field, t.vv))
    gap = detail.definitional
    identity = np.abs(lhs.re - (rhs.re - 0.5 * gap.re))
    excess = lhs.re - rhs.re
    violation = float(np.max(np.maximum(excess - cfg.abs_tol, 0.0)))
    diff = np.abs(detail.literal - gap.re)
    literal_residual = float(np.max(diff[np.isfinite(diff)], initial=0.0))
    return CauchySchwarzReport(
        lhs=lhs,
        rhs=rhs,
        gap=gap,
        gap_closed=detail.closed,
        identity_residual=float(np.max(identity)),
        inequality_violation=violation,
        literal_residual=literal_residual,
        equality=bool(np.all(gap.re <= equality_tol)),
        equality_tol=equality_tol,
    )


def corollary_fsquare_report(
    T: SesquilinearForm, u, v, cfg: GridConfig = DEFAULT_GRID
) -> VerificationReport:
    """|T(u,v)|^2 against ((T(u,u)T(v,v))^(1/2) - gap/2)^2 and T(u,u)T(v,v)."""
    t = _terms(T, u, v, cfg.abs_tol)
    gap = cs_gap_detail(T, u, v, cfg).definitional
    real = ScalarField.REAL
    mod = LatticeElement(real, np.abs(t.uv))
    a = LatticeElement(real, t.uu)
    c = LatticeElement(real, t.vv)
    lhs = multiply(mod, mod)
    product = multiply(a, c)
    root = nth_root(product, 2)
    inner = root - 0.5 * gap
    identity_rhs = multiply(inner, inner)

    identity_residual = float(np.max(np.abs(lhs.re - identity_rhs.re)))
    identity_tol = scaled_tol(cfg.grid_tol, root)
    ineq_excess = float(np.max(lhs.re - product.re))
    ineq_tol = scaled_tol(cfg.abs_tol, lhs, product)
    ok = identity_residual <= identity_tol and ineq_excess <= ineq_tol

    rep = VerificationReport("cs-corollary", grid_diagnostics=grid_diagnostics(cfg, [identity_residual]))
    rep.details = {
        "lhs": lhs,
        "identity_rhs": identity_rhs,
        "product": product,
        "identity_residual": identity_residual,
        "identity_tol": identity_tol,
        "inequality_excess": ineq_excess,
        "inequality_tol": ineq_tol,
    }
    violation = max(identity_residual - identity_tol, ineq_excess - ineq_tol, 0.0)
    rep.record(ok, violation, {"u": _as_vector(u, T, "u"), "v": _as_vector(v, T, "v")})
    return rep


def _null_defect(T: SesquilinearForm, u: np.ndarray, v: np.ndarray, alpha, beta) -> float:
    """max_j T(beta u + alpha v, same)_j for the normalized pair (alpha, beta)."""
    norm = np.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    w = (beta * u + alpha * v) / norm
    return float(np.max(_evaluate_coords(T.matrices, w, w).real))


def classical_equality_witness_search(
    T: SesquilinearForm,
    u,
    v,
    probe_count: int = 10_000,
    seed: int = 0,
    tol: float = 1e-9,
) -> tuple[complex, complex] | None:
    """Look for (alpha, beta) != 0 with T(beta u + alpha v, beta u + alpha v) = 0.

    Candidates are the analytic per-coordinate minimizers (beta = 1 or
    alpha = 1) followed by a grid of ``probe_count`` normalized pairs over
    magnitude split and relative phase. Pairs are judged after normalizing
    to |alpha|^2 + |beta|^2 = 1, against ``tol`` scaled by the form's scale.
    """
    uu = _as_vector(u, T, "u")
    vv = _as_vector(v, T, "v")
    a = _evaluate_coords(T.matrices, uu, uu).real
    c = _evaluate_coords(T.matrices, vv, vv).real
    b = _evaluate_coords(T.matrices, uu, vv)
    threshold = scaled_tol(tol, a, c, np.abs(T.matrices))

    candidates: list[tuple[complex, complex]] = [(1.0, 0.0), (0.0, 1.0)]
    for j in range(T.codomain_dim):
        if a[j] > 0:
            candidates.append((1.0, -np.conj(b[j]) / a[j]))
        if c[j] > 0:
            candidates.append((-b[j] / c[j], 1.0))
    real = T.field is ScalarField.REAL
    for alpha, beta in candidates:
        if real:
            alpha, beta = complex(alpha).real, complex(beta).real
        if _null_defect(T, uu, vv, alpha, beta) <= threshold:
            return _tidy(alpha, real), _tidy(beta, real)

    if probe_count <= 0:
        return None
    rng = np.random.default_rng(seed)
    if real:
        # pairs (cos t, sin t) for t in [0, pi) cover every real direction
        ts = (np.arange(probe_count) + rng.random()) * np.pi / probe_count
        pairs = [(np.cos(t), np.sin(t)) for t in ts]
    else:
        side = max(int(np.sqrt(probe_count)), 1)
        mags = (np.arange(side) + rng.random()) * (0.5 * np.pi) / side
        phases = (np.arange(max(probe_count // side, 1)) + rng.random()) * 2.0 * np.pi / max(probe_count // side, 1)
        pairs = [(np.cos(t), np.sin(t) * np.exp(1j * ph)) for t in mags for ph in phases]
    for alpha, beta in pairs:
        if _null_defect(T, uu, vv, alpha, beta) <= threshold:
            return _tidy(alpha, real), _tidy(beta, real)
    return None


def _tidy(x, real: bool):
    x = complex(x)
    return x.real if real else x


def cs_equality_check(
    T: SesquilinearForm,
    u,
    v,
    cfg: GridConfig = DEFAULT_GRID,
    expect_equality: bool | None = None,
    expect_witness: bool | None = None,
    probe_count: int = 10_000,
    seed: int = 0,
    equality_tol: float = EQUALITY_TOL,
) -> VerificationReport:
    """Classify equality by the gap and, optionally, compare with expectations."""
    rep_cs = cauchy_schwarz_report(T, u, v, cfg, equality_tol)
    witness = classical_equality_witness_search(T, u, v, probe_count, seed, cfg.abs_tol)
    ok = True
    if expect_equality is not None:
        ok &= rep_cs.equality == expect_equality
    if expect_witness is not None:
        ok &= (witness is not None) == expect_witness
    rep = VerificationReport("cs-equality", grid_diagnostics=grid_diagnostics(cfg, [rep_cs.identity_residual]))
    rep.details = {
        "equality": rep_cs.equality,
        "gap": rep_cs.gap,
        "gap_closed": rep_cs.gap_closed,
        "equality_tol": equality_tol,
        "witness": None if witness is None else list(witness),
        "expect_equality": expect_equality,
        "expect_witness": expect_witness,
    }
    rep.record(ok, 0.0 if ok else float(np.max(rep_cs.gap.re)), {"u": _as_vector(u, T, "u"), "v": _as_vector(v, T, "v")})
    return rep


def random_psd_form(
    rng: np.random.Generator, m: int, n: int, field: ScalarField | str = ScalarField.COMPLEX, rank: int | None = None
) -> SesquilinearForm:
    """A_j = B_j^* B_j for Gaussian B_j (rank ``rank``, default m), symmetrized to exact Hermitian."""
    field = ScalarField.parse(field)
    k = m if rank is None else rank
    B = rng.standard_normal((n, k, m))
    if field is ScalarField.COMPLEX:
        B = B + 1j * rng.standard_normal((n, k, m))
    A = np.conj(np.swapaxes(B, 1, 2)) @ B
    return SesquilinearForm.hermitian(field, A)


def random_vector(rng: np.random.Generator, m: int, field: ScalarField | str) -> np.ndarray:
    field = ScalarField.parse(field)
    x = rng.standard_normal(m)
    if field is ScalarField.COMPLEX:
        x = x + 1j * rng.standard_normal(m)
    return x.astype(complex)


def sesquilinear_defect(T: SesquilinearForm, u1, u2, v, alpha: complex, beta: complex) -> float:
    """|T(alpha u1 + beta u2, v) - alpha T(u1, v) - beta T(u2, v)|, maximized over coordinates."""
    a1 = _as_vector(u1, T, "u1")
    a2 = _as_vector(u2, T, "u2")
    vv = _as_vector(v, T, "v")
    left = _evaluate_coords(T.matrices, alpha * a1 + beta * a2, vv)
    right = alpha * _evaluate_coords(T.matrices, a1, vv) + beta * _evaluate_coords(T.matrices, a2, vv)
    return float(np.max(np.abs(left - right)))



def parallel_instance(
    rng: np.random.Generator, m: int, n: int, field: ScalarField | str = ScalarField.COMPLEX
) -> tuple[SesquilinearForm, np.ndarray, np.ndarray]:
    """Data with zero gap in every coordinate.

    Either every A_j is rank one, A_j = x_j x_j^*, so that T(u,v)_j factors
    as (x_j . u) conj(x_j . v); or v is a scalar multiple of u.
    """
    field = ScalarField.parse(field)
    u = random_vector(rng, m, field)
    if rng.random() < 0.5:
        x = rng.standard_normal((n, m))
        if field is ScalarField.COMPLEX:
            x = x + 1j * rng.standard_normal((n, m))
        A = x[:, :, None] * np.conj(x[:, None, :])
        v = random_vector(rng, m, field)
        return SesquilinearForm.hermitian(field, A), u, v
    zeta = complex(rng.standard_normal())
    if field is ScalarField.COMPLEX:
        zeta += 1j * rng.standard_normal()
    return random_psd_form(rng, m, n, field), u, zeta * u


def disjoint_instance(
    rng: np.random.Generator, m: int, n: int, field: ScalarField | str = ScalarField.COMPLEX
) -> tuple[SesquilinearForm, np.ndarray, np.ndarray]:
    """Strict data: u and v with disjoint supports under positive diagonal forms.

    T(u,v) vanishes while T(u,u) and T(v,v) stay bounded below, so every
    coordinate of the gap is at least 0.25.
    """
    if m < 2:
        raise DimensionMismatchError("disjoint supports need m >= 2")
    field = ScalarField.parse(field)
    k = int(rng.integers(1, m))

    def entries(size):
        mag = rng.uniform(0.5, 2.0, size)
        if field is ScalarField.COMPLEX:
            return mag * np.exp(1j * rng.uniform(0, 2 * np.pi, size))
        return mag * rng.choice([-1.0, 1.0], size)

    u = np.zeros(m, dtype=complex)
    v = np.zeros(m, dtype=complex)
    u[:k] = entries(k)
    v[k:] = entries(m - k)
    diag = rng.uniform(0.5, 2.0, (n, m))
    A = np.zeros((n, m, m))
    A[:, np.arange(m), np.arange(m)] = diag
    return SesquilinearForm(field, A.astype(complex)), u, v
