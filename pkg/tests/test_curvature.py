import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import points
from hessgas.covderiv import cov_diff_z
from hessgas.curvature import (
    beta_m_blocks,
    constant_hessian_form,
    curvature_report,
    gas_hessian_curvature,
    hessian_sectional,
    kulkarni_nomizu_half,
    metric,
    metric_beta_omega_closed_form,
    riemann_christoffel,
    riemann_from_hessian,
    sample_planes,
    sectional,
)
from hessgas.model import GasParameters, GeneralizedTemperature, chart_jacobian, from_flat, to_flat
from hessgas.partition import inertia


def test_metric_at_rest(gp):
    g = metric(GeneralizedTemperature(1.0, [0, 0, 0]), gp, "beta-omega").components
    np.testing.assert_allclose(g, np.diag([1.5, 0.4, 0.4, 0.4]), rtol=1e-13, atol=1e-15)


@given(points())
def test_beta_omega_closed_form(p):
    gp = GasParameters()
    g = metric(p, gp, "beta-omega").components
    closed = metric_beta_omega_closed_form(p, gp)
    assert np.max(np.abs(g - closed)) <= 1e-9 * np.max(np.abs(closed))


@given(points())
def test_metric_transport_preserves_lengths(p):
    gp = GasParameters()
    g_flat = metric(p, gp, "flat").components
    rng = np.random.default_rng(0)
    v, w = rng.standard_normal(4), rng.standard_normal(4)
    for chart in ("beta-omega", "u-omega", "beta-M"):
        J = chart_jacobian(p, gp, chart, metric=g_flat).matrix
        g = metric(p, gp, chart).components
        assert v @ g @ w == pytest.approx((J @ v) @ g_flat @ (J @ w), rel=1e-10, abs=1e-12)
        assert np.min(np.linalg.eigvalsh(g)) > 0


@given(points())
def test_beta_m_cross_block_vanishes(p):
    g = metric(p, GasParameters(), "beta-M").components
    assert np.max(np.abs(g[0, 1:])) <= 1e-9 * math.sqrt(g[0, 0] * np.linalg.norm(g[1:, 1:]))


@given(points())
def test_beta_m_diagonal_blocks(p):
    gp = GasParameters()
    g = metric(p, gp, "beta-M").components
    blocks = beta_m_blocks(p, gp)
    assert g[0, 0] == pytest.approx(blocks["beta_beta"], rel=1e-9)
    np.testing.assert_allclose(g[1:, 1:], blocks["MM"], rtol=1e-9, atol=1e-12 * np.linalg.norm(g[1:, 1:]))
    # Along omega the single coefficient beta / (I + 2 theta I') is exact.
    n = p.omega / np.linalg.norm(p.omega)
    assert n @ g[1:, 1:] @ n == pytest.approx(n @ blocks["isotropic_MM"] @ n, rel=1e-9)


def test_isotropic_mm_form_misses_transverse_directions(gp):
    # Across omega the block is beta / I, not beta / (I + 2 theta I').
    p = GeneralizedTemperature(1.0, [0, 0, 3.0])
    g = metric(p, gp, "beta-M").components
    assert g[1, 1] == pytest.approx(p.beta / inertia(p.theta, gp), rel=1e-12)
    assert abs(g[1, 1] - beta_m_blocks(p, gp)["isotropic_MM"][1, 1]) > 0.1 * g[1, 1]


def _riemann(p):
    return gas_hessian_curvature(p, GasParameters())[2]


@given(points())
def test_riemann_symmetries(p):
    R = _riemann(p)
    scale = np.max(np.abs(R))
    tol = 1e-9 * scale
    assert np.max(np.abs(R + np.transpose(R, (1, 0, 2, 3)))) <= tol
    assert np.max(np.abs(R + np.transpose(R, (0, 1, 3, 2)))) <= tol
    assert np.max(np.abs(R - np.transpose(R, (2, 3, 0, 1)))) <= tol
    bianchi = R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2))
    assert np.max(np.abs(bianchi)) <= tol


@pytest.mark.parametrize("omega", [[0.0, 0.0, 0.5], [0.4, -0.9, 1.3]])
def test_riemann_matches_christoffel_route(omega, gp):
    p = GeneralizedTemperature(1.1, omega)
    x = to_flat(p)
    R_hess = _riemann(p)
    metric_fn = lambda y: cov_diff_z(2, from_flat(y), gp).components
    R_chr = riemann_christoffel(metric_fn, x, np.array([0.02 * x[0], 0.02, 0.02, 0.02]), richardson=2)
    assert np.max(np.abs(R_hess - R_chr)) <= 1e-8 * np.max(np.abs(R_hess))


def test_christoffel_route_on_round_sphere():
    metric_fn = lambda y: np.diag([1.0, math.sin(y[0]) ** 2])
    y = np.array([0.9, 0.3])
    R = riemann_christoffel(metric_fn, y, np.array([1e-2, 1e-2]), richardson=2)
    assert sectional(R, metric_fn(y), [1, 0], [0, 1]) == pytest.approx(1.0, rel=1e-9)


def test_sectional_is_symmetric_and_rejects_degenerate_planes(gp, rng):
    p = GeneralizedTemperature(1.0, [0.3, 0.2, 1.0])
    g, _, R, _ = gas_hessian_curvature(p, gp)
    u, v = rng.standard_normal(4), rng.standard_normal(4)
    assert sectional(R, g, u, v) == pytest.approx(sectional(R, g, v, u), rel=1e-13)
    assert sectional(R, g, u, v) == pytest.approx(sectional(R, g, 2 * u + v, -3 * v), rel=1e-10)
    with pytest.raises(ValueError):
        sectional(R, g, u, 2.0 * u)


@given(st.floats(-5.0, 5.0).filter(lambda c: abs(c) > 1e-3), st.integers(0, 2**31))
def test_constant_hessian_curvature_gives_minus_quarter(c, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((4, 4))
    g = a @ a.T + np.eye(4)
    K = constant_hessian_form(g, c)
    h = rng.standard_normal((4, 4))
    h = h + h.T
    assert hessian_sectional(K, g, h) == pytest.approx(c, rel=1e-10)
    assert hessian_sectional(K, g, 2.5 * h) == pytest.approx(hessian_sectional(K, g, h), rel=1e-13)
    R = riemann_from_hessian(K)
    u, v = rng.standard_normal(4), rng.standard_normal(4)
    assert sectional(R, g, u, v) == pytest.approx(-c / 4, rel=1e-9)
    np.testing.assert_allclose(R, -c / 4 * kulkarni_nomizu_half(g), atol=1e-10 * abs(c) * np.max(g) ** 2)


def test_sample_planes_are_reproducible():
    a = sample_planes(np.random.default_rng(7), 5)
    b = sample_planes(np.random.default_rng(7), 5)
    assert len(a) == 11
    for (u1, v1), (u2, v2) in zip(a, b):
        np.testing.assert_array_equal(u1, u2)
        np.testing.assert_array_equal(v1, v2)


def test_curvature_report_charts(gp):
    p = GeneralizedTemperature(1.0, [0.2, 0.5, -0.4])
    flat = curvature_report(p, gp, "flat", n_planes=10)
    bo = curvature_report(p, gp, "beta-omega", n_planes=10)
    assert flat.sectional_samples.shape == (16,)
    np.testing.assert_array_equal(flat.sectional_samples, bo.sectional_samples)
    assert bo.metric.chart == "beta-omega"
    np.testing.assert_allclose(bo.metric.components, metric_beta_omega_closed_form(p, gp), rtol=1e-9)
    assert flat.sectional_min <= flat.sectional_max < 0
