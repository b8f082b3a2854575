import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import points
from hessgas.curvature import hessian_sectional, riemann_from_hessian, riemann_christoffel, sectional
from hessgas.finite_diff import fd_partials
from hessgas.model import DomainError, GeneralizedTemperature, chart_jacobian, transport
from hessgas.rigidbody import (
    DegenerateBodyError,
    RigidBodyParams,
    halfspace_pullback,
    kks_sphere_area,
    rb_dual_curvature,
    rb_entropy,
    rb_generic_curvature,
    rb_hessian_curvature,
    rb_leaf_area,
    rb_metric,
    rb_momenta,
    rb_poisson_leaf_factor,
    rb_potential,
    rb_potentials,
)
from hessgas.tensor import CovTensor, UnsupportedOrderError

BODY = np.array([[1.0, 0.2, 0.0], [0.2, 2.0, 0.3], [0.0, 0.3, 0.7]])

heat_capacities = st.floats(0.2, 5.0)


def test_metric_example():
    params = RigidBodyParams(1.5, 1.0)
    g = rb_metric(params, GeneralizedTemperature(1.0, [0, 0, 0])).components
    np.testing.assert_array_equal(g, np.diag([1.5, 1.0, 1.0, 1.0]))


@given(points(), heat_capacities)
def test_halfspace_pullback(p, C):
    for inertia in (1.3, BODY):
        params = RigidBodyParams(C, inertia)
        g = rb_metric(params, p).components
        np.testing.assert_allclose(halfspace_pullback(params, p), g, rtol=1e-12, atol=1e-12 * np.max(g))


def test_non_spherical_omega_block():
    params = RigidBodyParams(2.0, BODY)
    p = GeneralizedTemperature(0.7, [0.3, -0.1, 0.5])
    g = rb_metric(params, p).components
    np.testing.assert_allclose(np.linalg.eigvalsh(g[1:, 1:]), 0.7 * np.linalg.eigvalsh(BODY), rtol=1e-13)


@pytest.mark.parametrize("chart", ["flat", "u-omega", "beta-M"])
def test_metric_charts_agree(chart, rng):
    params = RigidBodyParams(1.5, BODY)
    p = GeneralizedTemperature(1.2, rng.standard_normal(3))
    g = rb_metric(params, p, chart).components
    g_bo = rb_metric(params, p, "beta-omega").components
    assert np.min(np.linalg.eigvalsh(g)) > 0
    if chart == "u-omega":
        # beta = 4 / u^2 and the charts share omega
        dbeta_du = -8.0 / p.u**3
        assert g[0, 0] == pytest.approx(g_bo[0, 0] * dbeta_du**2, rel=1e-12)
        assert g[0, 0] == pytest.approx(4 * params.C / p.u**2, rel=1e-12)
        np.testing.assert_allclose(g[1:, 1:], g_bo[1:, 1:], rtol=1e-12)
    if chart == "beta-M":
        np.testing.assert_allclose(g[0, 1:], 0.0, atol=1e-12)
        np.testing.assert_allclose(g[1:, 1:], p.beta * np.linalg.inv(BODY), rtol=1e-12)


def test_dual_hessian_is_inverse_metric(rng):
    params = RigidBodyParams(1.7, BODY)
    for _ in range(5):
        p = GeneralizedTemperature(rng.uniform(0.3, 3.0), rng.standard_normal(3))
        E, M = rb_momenta(params, p)
        y = np.concatenate([[E], M])
        hess = fd_partials(lambda q: -rb_entropy(params, q[0], q[1:]), y, 2, 1e-3 * np.ones(4), richardson=2)
        g_flat = rb_metric(params, p, "flat").components
        np.testing.assert_allclose(hess @ g_flat, np.eye(4), atol=1e-7)


def test_entropy_differential(rng):
    # dS = beta dE - beta <omega, dM>
    params = RigidBodyParams(1.2, BODY)
    p = GeneralizedTemperature(0.9, rng.standard_normal(3))
    E, M = rb_momenta(params, p)
    y = np.concatenate([[E], M])
    dS = fd_partials(lambda q: rb_entropy(params, q[0], q[1:]), y, 1, 1e-4 * np.ones(4), richardson=2)
    np.testing.assert_allclose(dS, np.concatenate([[p.beta], -p.beta * p.omega]), rtol=1e-9, atol=1e-10)


@given(points(), heat_capacities)
def test_potential_relations(p, C):
    params = RigidBodyParams(C, BODY)
    S, phi = rb_potentials(params, p)
    assert phi - (S - C + 0.5 * p.beta * p.omega @ BODY @ p.omega) == pytest.approx(0.0, abs=1e-12 * (1 + abs(phi)))
    # The normalized potential drops the additive constant C ln C - C.
    shift = phi - rb_potential(params, [p.beta, *(-p.beta * p.omega)])
    assert shift == pytest.approx(C * math.log(C) - C, abs=1e-10 * (1 + abs(phi)))


# The flat-chart jet holds terms of size theta^2 that cancel on transport, so
# the comparison stays where that cancellation costs fewer than four digits.
@given(points(log_theta=st.floats(-3.0, 2.0)), heat_capacities)
def test_closed_form_curvature_matches_generic(p, C):
    params = RigidBodyParams(C, 1.3)
    closed = rb_hessian_curvature(params, p).components
    generic = transport(CovTensor(rb_generic_curvature(params, p)), chart_jacobian(p, None, "u-omega")).components
    assert np.max(np.abs(closed - generic)) <= 1e-9 * np.max(np.abs(generic))


def test_tenfold_du4_coefficient_is_inconsistent(rng):
    params = RigidBodyParams(1.5, 1.0)
    p = GeneralizedTemperature(1.0, rng.standard_normal(3))
    generic = transport(CovTensor(rb_generic_curvature(params, p)), chart_jacobian(p, None, "u-omega")).components
    closed = rb_hessian_curvature(params, p).components.copy()
    literal = closed.copy()
    literal[0, 0, 0, 0] *= 10.0
    assert abs(closed[0, 0, 0, 0] - generic[0, 0, 0, 0]) <= 1e-12 * abs(generic[0, 0, 0, 0])
    assert abs(literal[0, 0, 0, 0] - generic[0, 0, 0, 0]) > abs(generic[0, 0, 0, 0])


@pytest.mark.parametrize("C", [0.5, 1.5, 3.0])
@pytest.mark.parametrize("inertia", [1.3, BODY])
def test_riemannian_sectional_curvature(C, inertia, rng):
    params = RigidBodyParams(C, inertia)
    for _ in range(5):
        p = GeneralizedTemperature(rng.uniform(0.3, 3.0), rng.standard_normal(3))
        g = rb_metric(params, p, "flat").components
        R = riemann_from_hessian(rb_generic_curvature(params, p))
        for _ in range(4):
            u, v = rng.standard_normal(4), rng.standard_normal(4)
            assert sectional(R, g, u, v) == pytest.approx(-1.0 / (4.0 * C), rel=1e-10)


def test_sectional_from_christoffel_symbols():
    params = RigidBodyParams(1.5, 1.0)
    metric_fn = lambda y: rb_metric(params, GeneralizedTemperature(y[0], y[1:])).components
    y = np.array([1.0, 0.2, -0.3, 0.5])
    R = riemann_christoffel(metric_fn, y, 0.02 * np.ones(4), richardson=2)
    g = metric_fn(y)
    assert sectional(R, g, [1, 0, 0, 0], [0, 0, 1, 0]) == pytest.approx(-1.0 / 6.0, rel=1e-7)


@given(points(), heat_capacities)
def test_dual_hessian_curvature_is_inverse_heat_capacity(p, C):
    params = RigidBodyParams(C, BODY)
    E, M = rb_momenta(params, p)
    g, K = rb_dual_curvature(params, E, M)
    h = np.random.default_rng(0).standard_normal((4, 4))
    assert hessian_sectional(K, g, h + h.T) == pytest.approx(1.0 / C, rel=1e-8)


def test_leaf_factor_and_area():
    params = RigidBodyParams(1.0, 2.0)
    assert rb_poisson_leaf_factor(params) == 0.5
    assert kks_sphere_area(3.0) == pytest.approx(4 * math.pi * 3.0, rel=1e-13)
    assert rb_leaf_area(params, 0.7) == pytest.approx(4 * math.pi * 2.0 * 0.7, rel=1e-13)


def test_degenerate_and_unsupported_bodies():
    with pytest.raises(DegenerateBodyError):
        RigidBodyParams(1.0, np.diag([1.0, 1.0, 0.0]))
    with pytest.raises(DegenerateBodyError):
        RigidBodyParams(1.0, -1.0)
    with pytest.raises(DomainError):
        RigidBodyParams(0.0, 1.0)
    with pytest.raises(UnsupportedOrderError):
        rb_hessian_curvature(RigidBodyParams(1.0, BODY), GeneralizedTemperature(1.0, [0, 0, 1.0]))
    with pytest.raises(DomainError):
        rb_entropy(RigidBodyParams(1.0, 1.0), 0.1, [1.0, 0.0, 0.0])
