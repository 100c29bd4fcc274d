import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vlineq.errors import DimensionMismatchError, FieldMismatchError, FormError
from vlineq.lattice import DEFAULT_GRID, GridConfig, LatticeElement, ScalarField, scaled_tol
from vlineq.sesquilinear import (
    SesquilinearForm,
    cauchy_schwarz_report,
    classical_equality_witness_search,
    coordinate_form,
    corollary_fsquare_report,
    cs_equality_check,
    cs_gap,
    cs_gap_detail,
    disjoint_instance,
    evaluate,
    parallel_instance,
    random_psd_form,
    random_vector,
    sesquilinear_defect,
)


def brute_force_gap(T, u, v, radii=2001, phases=721):
    """Oracle: inf over a dense polar z-grid of |z|^-1 T(zu - v, zu - v), evaluated literally."""
    r = np.logspace(-4, 4, radii)
    if T.field is ScalarField.REAL:
        z = np.concatenate([r, -r])
    else:
        ph = np.linspace(0, 2 * np.pi, phases, endpoint=False)
        z = (r[:, None] * np.exp(1j * ph)[None, :]).ravel()
    w = z[:, None] * u[None, :] - v[None, :]  # (k, m)
    vals = np.einsum("kp,jpq,kq->jk", w, T.matrices, np.conj(w)).real / np.abs(z)[None, :]
    return vals.min(axis=1)


# forms and evaluation


def test_form_validation():
    with pytest.raises(DimensionMismatchError):
        SesquilinearForm("real", np.zeros((1, 2, 3)))
    with pytest.raises(FieldMismatchError):
        SesquilinearForm("real", np.array([[[1j]]]))
    T = SesquilinearForm("real", np.array([[[0.0, 1.0], [0.0, 0.0]]]))
    assert not T.is_hermitian()
    with pytest.raises(FormError):
        T.validate()
    N = SesquilinearForm("real", -np.eye(2))
    assert N.is_hermitian() and not N.is_psd()
    with pytest.raises(FormError):
        cs_gap(N, [1.0, 0.0], [0.0, 1.0])


def test_evaluate_examples():
    T = coordinate_form()
    assert np.array_equal(evaluate(T, [1, 0], [0, 1]).coords, [0, 0])
    R = random_psd_form(np.random.default_rng(3), 3, 2)
    assert np.array_equal(evaluate(R, np.zeros(3), random_vector(np.random.default_rng(4), 3, "complex")).coords, [0, 0])
    one = SesquilinearForm("complex", np.array([[[1.0]]]))
    np.testing.assert_array_equal(evaluate(one, [2], [3j]).coords, [-6j])


def test_evaluate_rejects_bad_vectors():
    T = coordinate_form("real")
    with pytest.raises(FieldMismatchError):
        evaluate(T, [1j, 0], [0, 1])
    with pytest.raises(DimensionMismatchError):
        evaluate(T, [1, 0, 0], [0, 1])


@given(st.integers(0, 10_000), st.sampled_from(["real", "complex"]))
def test_conjugate_symmetry_is_exact(seed, field):
    rng = np.random.default_rng(seed)
    T = random_psd_form(rng, 4, 3, field)
    u, v = random_vector(rng, 4, field), random_vector(rng, 4, field)
    assert np.array_equal(evaluate(T, u, v).coords, np.conj(evaluate(T, v, u).coords))
    assert np.all(evaluate(T, u, u).im == 0)
    assert np.all(evaluate(T, u, u).re >= -1e-12)


def test_sesquilinearity(rng):
    T = random_psd_form(rng, 4, 3)
    u1, u2, v = (random_vector(rng, 4, "complex") for _ in range(3))
    alpha, beta = 1.5 - 2j, -0.3 + 0.7j
    assert sesquilinear_defect(T, u1, u2, v, alpha, beta) < 1e-12
    # conjugate-linear in the second slot
    lhs = evaluate(T, u1, alpha * v).coords
    np.testing.assert_allclose(lhs, np.conj(alpha) * evaluate(T, u1, v).coords, atol=1e-12)


def test_generated_forms_are_psd_hermitian(rng):
    for field in ("real", "complex"):
        T = random_psd_form(rng, 5, 4, field, rank=2)
        assert T.hermitian_defect() == 0.0
        assert T.is_psd()


# gap


def test_gap_examples():
    p = cs_gap(coordinate_form(), [1, 0], [0, 1])
    np.testing.assert_array_equal(p.closed.re, [0, 0])
    assert np.all(p.definitional.re <= 1e-200)
    one = SesquilinearForm("real", np.array([[[1.0]]]))
    p = cs_gap(one, [1.0], [2.0])
    np.testing.assert_array_equal(p.closed.re, [0.0])
    assert abs(p.definitional.re[0]) <= 1e-9
    ident = SesquilinearForm("real", np.eye(2)[None])
    p = cs_gap(ident, [1.0, 0.0], [0.0, 1.0])
    np.testing.assert_allclose(p.closed.re, [2.0])
    np.testing.assert_allclose(p.definitional.re, [2.0], atol=1e-9)
    np.testing.assert_allclose(brute_force_gap(ident, np.array([1.0, 0]), np.array([0, 1.0])), [2.0], atol=1e-4)


@pytest.mark.parametrize("field", ["real", "complex"])
def test_gap_against_brute_force_z_grid(field):
    rng = np.random.default_rng(11)
    for _ in range(5):
        T = random_psd_form(rng, 3, 2, field)
        u, v = random_vector(rng, 3, field), random_vector(rng, 3, field)
        d = cs_gap(T, u, v).definitional.re
        oracle = brute_force_gap(T, u, v)
        # the grid oracle is coarser, so it can only be above the refined value
        assert np.all(d <= oracle + 1e-9)
        assert np.all(oracle - d <= 1e-3 * (1 + np.abs(oracle)))


def test_literal_evaluation_matches_separated_search(rng):
    T = random_psd_form(rng, 4, 3)
    u, v = random_vector(rng, 4, "complex"), random_vector(rng, 4, "complex")
    det = cs_gap_detail(T, u, v)
    np.testing.assert_allclose(det.literal, det.definitional.re, rtol=1e-9, atol=1e-9)
    assert det.minimizer.shape == (3,)


def test_gap_doubling_monotone(rng):
    for field in ("real", "complex"):
        T = random_psd_form(rng, 4, 5, field)
        u, v = random_vector(rng, 4, field), random_vector(rng, 4, field)
        base = cs_gap(T, u, v).definitional.re
        fine = cs_gap(T, u, v, DEFAULT_GRID.doubled()).definitional.re
        assert np.all(fine <= base)


# Cauchy-Schwarz report


def test_report_counterexample():
    r = cauchy_schwarz_report(coordinate_form(), [1, 0], [0, 1])
    assert r.equality and r.inequality_holds
    np.testing.assert_array_equal(r.lhs.re, [0, 0])
    np.testing.assert_array_equal(r.rhs.re, [0, 0])


def test_report_u_equals_v(rng):
    T = random_psd_form(rng, 3, 4)
    u = random_vector(rng, 3, "complex")
    r = cauchy_schwarz_report(T, u, u)
    assert r.equality
    np.testing.assert_allclose(r.lhs.re, evaluate(T, u, u).re, rtol=1e-12)
    np.testing.assert_allclose(r.rhs.re, evaluate(T, u, u).re, rtol=1e-12)


@given(st.integers(0, 10_000), st.sampled_from(["real", "complex"]))
def test_identity_and_inequality_random(seed, field):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 6))
    T = random_psd_form(rng, m, int(rng.integers(1, 6)), field, rank=int(rng.integers(1, m + 1)))
    u, v = random_vector(rng, m, field), random_vector(rng, m, field)
    r = cauchy_schwarz_report(T, u, v, GridConfig(theta_points=1024, lambda_points=256))
    assert r.identity_residual <= scaled_tol(1e-4, r.rhs)
    assert r.inequality_holds


def test_equality_and_strict_constructions(rng):
    for field in ("real", "complex"):
        T, u, v = parallel_instance(rng, 4, 3, field)
        assert cauchy_schwarz_report(T, u, v).equality
        T, u, v = disjoint_instance(rng, 4, 3, field)
        r = cauchy_schwarz_report(T, u, v)
        assert not r.equality
        assert np.all(r.gap.re >= 0.1)


def test_corollary_report(rng):
    rep = corollary_fsquare_report(coordinate_form(), [1, 0], [0, 1])
    assert rep.passed
    np.testing.assert_array_equal(rep.details["lhs"].re, [0, 0])
    T = random_psd_form(rng, 3, 2)
    u = random_vector(rng, 3, "complex")
    rep = corollary_fsquare_report(T, u, u)
    assert rep.passed
    np.testing.assert_allclose(rep.details["lhs"].re, evaluate(T, u, u).re ** 2, rtol=1e-12)
    v = random_vector(rng, 3, "complex")
    assert corollary_fsquare_report(T, u, v).passed


# classical witness


def test_witness_examples(rng):
    assert classical_equality_witness_search(coordinate_form(), [1, 0], [0, 1], 10_000) is None
    assert classical_equality_witness_search(coordinate_form("real"), [1, 0], [0, 1], 10_000) is None
    one = SesquilinearForm("real", np.array([[[1.0]]]))
    assert classical_equality_witness_search(one, [1.0], [3.0]) == (1.0, -3.0)
    T = random_psd_form(rng, 3, 2)
    u = random_vector(rng, 3, "complex")
    alpha, beta = classical_equality_witness_search(T, u, 2 * u)
    assert (alpha, beta) == (1.0, -2.0)


def test_witness_grid_probe_finds_nonanalytic_direction():
    # one coordinate; v = e^{i pi/3} u, found already by the analytic candidates
    T = SesquilinearForm("complex", np.eye(2)[None])
    u = np.array([1.0, 1j])
    w = classical_equality_witness_search(T, u, np.exp(1j * math.pi / 3) * u)
    assert w is not None
    alpha, beta = w
    x = beta * u + alpha * np.exp(1j * math.pi / 3) * u
    assert np.linalg.norm(x) < 1e-9


def test_cs_equality_check_expectations():
    rep = cs_equality_check(coordinate_form(), [1, 0], [0, 1], expect_equality=True, expect_witness=False)
    assert rep.passed and rep.details["witness"] is None
    rep = cs_equality_check(coordinate_form(), [1, 0], [0, 1], expect_equality=False)
    assert not rep.passed
