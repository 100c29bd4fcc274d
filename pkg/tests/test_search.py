import numpy as np
import pytest

from vlineq._search import (
    LOG_THETA_BOUND,
    angle_grid,
    grid_maximize,
    grid_minimize,
    log_theta_grid,
)


def test_log_grid_endpoints_and_count():
    g = log_theta_grid(4096)
    assert g.size == 4097
    assert g[0] == pytest.approx(np.log(1e-6))
    assert g[-1] == pytest.approx(np.log(1e6))
    assert np.all(np.diff(g) > 0)


def test_log_grid_nests_under_doubling():
    coarse, fine = log_theta_grid(512), log_theta_grid(1024)
    assert np.array_equal(coarse, fine[::2])


def test_angle_grid_is_periodic_half_open():
    g = angle_grid(8)
    assert g.size == 8
    assert g[0] == 0.0
    assert g[-1] < 2 * np.pi


def test_minimize_finds_interior_quadratic_minimum():
    centers = np.array([-3.0, 0.25, 7.0])
    vals, params = grid_minimize(lambda s: (s - centers[:, None]) ** 2 + 1.0, log_theta_grid(64), 60)
    np.testing.assert_allclose(params, centers, atol=1e-6)
    np.testing.assert_allclose(vals, 1.0, atol=1e-12)


def test_minimize_never_exceeds_best_grid_value():
    grid = log_theta_grid(128)
    def fun(s):
        return np.abs(np.sin(3 * s) + 0.5)

    vals, _ = grid_minimize(fun, grid, 60)
    assert vals[0] <= np.min(fun(grid[None, :])) + 1e-15


def test_extension_follows_unattained_limit():
    # exp decreases forever toward -inf; the extended search should go far past the grid start
    vals, params = grid_minimize(np.exp, log_theta_grid(64), 200, extend=LOG_THETA_BOUND)
    assert params[0] < -100
    assert vals[0] < 1e-40


def test_periodic_maximize_wraps_around_zero():
    phase = np.array([-0.01, np.pi])
    vals, params = grid_maximize(lambda t: np.cos(t - phase[:, None]), angle_grid(16), 60, periodic=True)
    np.testing.assert_allclose(vals, 1.0, atol=1e-12)
    np.testing.assert_allclose(np.cos(params - phase), 1.0, atol=1e-12)
