import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import points
from hessgas.covderiv import (
    compositions,
    cov_diff_z,
    cov_diff_zrot,
    cov_diff_zrot_explicit,
    d_zeta_int,
    domega,
    du,
    faa_di_bruno,
    fd_oracle,
    jet,
    partition_sum,
    relative_frobenius,
    theta_derivative,
    theta_partials_exact,
)
from hessgas.cumulants import cumulant_table
from hessgas.finite_diff import StepAdjustmentWarning, default_steps, fd_partials
from hessgas.model import GasParameters, GeneralizedTemperature, from_flat, momenta, to_flat
from hessgas.tensor import UnsupportedOrderError, sym_power


def _stirling2(n, k):
    return sum((-1) ** i * math.comb(k, i) * (k - i) ** n for i in range(k + 1)) // math.factorial(k)


def test_compositions():
    assert sorted(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert list(compositions(0, 3)) == [(0, 0, 0)]
    for total in range(5):
        for parts in range(1, 4):
            assert len(list(compositions(total, parts))) == math.comb(total + parts - 1, parts - 1)


@pytest.mark.parametrize("n", range(1, 6))
def test_partition_weights_count_surjections(n):
    # sum over compositions of n! / prod (k_i + 1)! equals j! S(n, j), the number
    # of ways to split n ordered slots into j labelled non-empty blocks
    for j in range(1, n + 1):
        ps = partition_sum(n, j)
        assert all(isinstance(w, int) and w > 0 for _, w in ps.terms)
        assert ps.total_weight == math.factorial(j) * _stirling2(n, j)


def test_order_four_two_block_weights():
    weights = dict(partition_sum(4, 2).terms)
    # D^3 theta (x) D theta appears with 4 and D^2 theta (x) D^2 theta with 6
    assert weights == {(2, 0): 4, (1, 1): 6, (0, 2): 4}


def test_theta_hessian_at_rest():
    p = GeneralizedTemperature(1.0, [0, 0, 0])
    np.testing.assert_allclose(theta_derivative(2, p).components, 2 * np.diag([0.0, 1, 1, 1]), atol=1e-15)


@given(points())
def test_theta_derivatives_match_exact_partials(p):
    for l in range(1, 6):
        a = theta_derivative(l, p).components
        b = theta_partials_exact(l, p)
        assert np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(b)))


def test_theta_derivatives_against_finite_differences(rng):
    p = GeneralizedTemperature(1.2, rng.standard_normal(3))
    x = to_flat(p)
    theta = lambda y: (y[1:] @ y[1:]) / y[0]
    for l, tol in ((2, 1e-8), (5, 1e-4)):
        fd = fd_partials(theta, x, l, default_steps(x, l), richardson=2)
        assert relative_frobenius(theta_derivative(l, p), fd) <= tol


def test_gradient_at_rest(gp):
    p = GeneralizedTemperature(1.0, [0, 0, 0])
    np.testing.assert_allclose(cov_diff_z(1, p, gp).components, [-1.5, 0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(cov_diff_z(2, p, gp).components, np.diag([1.5, 0.4, 0.4, 0.4]), rtol=1e-13, atol=1e-15)


@given(points())
def test_gradient_is_minus_momenta(p):
    gp = GasParameters()
    E, M = momenta(p, gp)
    np.testing.assert_allclose(cov_diff_z(1, p, gp).components, -np.concatenate([[E], M]), rtol=1e-13, atol=1e-15)


def test_fixed_point_against_two_oracles(gp):
    p = GeneralizedTemperature(1.0, [0, 0, 1.0])
    table = cumulant_table(p.theta, gp, 4)
    for n in (3, 4):
        d = cov_diff_zrot(n, p, gp, table)
        assert relative_frobenius(d, cov_diff_zrot_explicit(n, p, gp, table)) <= 1e-10
        assert relative_frobenius(cov_diff_z(n, p, gp), fd_oracle(n, p, gp)) <= 1e-5


@settings(max_examples=10)
@given(points(log_theta=st.floats(-2.0, 2.0)))
def test_faa_di_bruno_against_finite_differences(p):
    gp = GasParameters()
    for n, tol in ((2, 1e-5), (3, 1e-5), (4, 1e-3)):
        assert relative_frobenius(cov_diff_z(n, p, gp), fd_oracle(n, p, gp)) <= tol


@given(points())
def test_total_symmetry(p):
    j = jet(p, GasParameters(), 5)
    for n, t in j.items():
        assert t.symmetry_defect() <= 1e-12 * max(1.0, t.norm())


@given(points())
def test_metric_positive_definite(p):
    assert np.min(np.linalg.eigvalsh(cov_diff_z(2, p, GasParameters()).components)) > 0


@given(points(log_theta=st.floats(-3.0, 5.0)))
def test_explicit_forms_match_generic(p):
    gp = GasParameters()
    table = cumulant_table(p.theta, gp, 4)
    for n in range(1, 5):
        assert relative_frobenius(cov_diff_zrot(n, p, gp, table), cov_diff_zrot_explicit(n, p, gp, table)) <= 1e-10


def test_internal_part_closed_form():
    # D^3 zeta_int = 3 beta^(3/2) du^(x)3 in the flat chart
    p = GeneralizedTemperature(0.6, [0.2, 0.0, 0.0])
    expected = 3 * p.beta**1.5 * sym_power(du(p), 3) / math.factorial(3)
    np.testing.assert_allclose(d_zeta_int(3, p.beta), expected, rtol=1e-14)
    gp = GasParameters()
    x = to_flat(p)
    zint = lambda y: 1.5 * math.log(2 * math.pi * gp.m / y[0])
    fd = fd_partials(zint, x, 3, default_steps(x, 3), richardson=1)
    assert relative_frobenius(d_zeta_int(3, p.beta), fd) <= 1e-6


def test_faa_di_bruno_scalar_composition():
    # exp(theta(x)) with theta = |r|^2 / beta: every outer derivative is e^theta
    p = GeneralizedTemperature(0.9, [0.3, -0.2, 0.4])
    inner = {l: theta_derivative(l, p).components for l in range(1, 5)}
    outer = [math.exp(p.theta)] * 4
    x = to_flat(p)
    f = lambda y: math.exp((y[1:] @ y[1:]) / y[0])
    for n in (2, 3, 4):
        fd = fd_partials(f, x, n, default_steps(x, n), richardson=2)
        assert relative_frobenius(faa_di_bruno(outer, inner, n), fd) <= 1e-6


def test_domega_components():
    p = GeneralizedTemperature(2.0, [1.0, 0.0, -1.0])
    dw = domega(p).components
    # omega = -r / beta: d omega_i = -(dr_i + omega_i dbeta) / beta
    np.testing.assert_allclose(dw[0], -p.omega / 2.0)
    np.testing.assert_allclose(dw[1:], -np.eye(3) / 2.0)


def test_order_limits(gp):
    p = GeneralizedTemperature(1.0, [0, 0, 1.0])
    with pytest.raises(UnsupportedOrderError):
        cov_diff_z(6, p, gp)
    with pytest.raises(ValueError):
        cov_diff_z(0, p, gp)
    with pytest.raises(UnsupportedOrderError):
        cov_diff_zrot_explicit(5, p, gp)


def test_step_adjustment_near_boundary():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fd_partials(lambda y: y[0] ** 2, np.array([0.01, 0, 0, 0]), 2, np.array([0.1, 0.1, 0.1, 0.1]))
    assert any(issubclass(w.category, StepAdjustmentWarning) for w in caught)
