"""Partition function of the confined gas and moments of its rotational part.

Write ``lam = theta * m * R**2 / 2`` with ``theta = beta * |omega|**2``.  With
``x = rho**2`` the squared distance to the rotation axis, the rotational
factor is

    Z_rot = 2 pi int_0^{R^2} sqrt(R^2 - x) exp(theta m x / 2) dx.

Setting ``t = 1 - x / R^2`` and then ``t = s**2`` gives

    Z_rot = 2 pi R^3 e^lam int_0^1 2 s^2 exp(-lam s^2) ds,

which is smooth on [0, 1] and keeps the exponential growth outside the
integral.  The observable ``iota = m rho^2 / 2 = (m R^2 / 2)(1 - t)`` has
central moments ``(-m R^2 / 2)^k E[(t - E t)^k]``, so every moment is taken in
the variable ``t``, which stays accurate when ``theta`` is large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import (
    adaptive_gauss_legendre,
    gaussian_breakpoints,
    log_lower_incomplete_gamma,
)

ZROT_METHODS = ("marginal", "direct", "gamma")


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not np.isfinite(theta) or theta < 0:
        raise ValueError(f"theta must be finite and non-negative, got {theta}")
    return theta


def lam_of(theta: float, gp) -> float:
    return theta * gp.m * gp.R**2 / 2.0


def zeta_int(beta: float, gp) -> float:
    """Translational part of the Massieu function, (3/2) ln(2 pi m / beta)."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    return 1.5 * math.log(2.0 * math.pi * gp.m / beta)


def _log_zrot_marginal(lam: float, R: float, rtol: float) -> float:
    f = lambda s: 2.0 * s * s * np.exp(-lam * s * s)
    val, _ = adaptive_gauss_legendre(f, 0.0, 1.0, rtol=rtol, breakpoints=gaussian_breakpoints(lam))
    return math.log(2.0 * math.pi * R**3) + lam + math.log(val)


def _log_zrot_direct(lam: float, R: float, rtol: float) -> float:
    # Z_rot = (2 pi R^3 / lam) (int_0^1 exp(lam (1 - y^2)) dy - 1)
    #       = 2 pi R^3 e^lam int_0^1 exp(-lam y^2) (1 - exp(-lam (1 - y^2))) / lam dy
    if lam == 0.0:
        return math.log(2.0 * math.pi * R**3 * 2.0 / 3.0)

    def f(y):
        return np.exp(-lam * y * y) * (-np.expm1(-lam * (1.0 - y * y))) / lam

    val, _ = adaptive_gauss_legendre(f, 0.0, 1.0, rtol=rtol, breakpoints=gaussian_breakpoints(lam))
    return math.log(2.0 * math.pi * R**3) + lam + math.log(val)


def _log_zrot_gamma(lam: float, R: float) -> float:
    # Z_rot = (2 pi R^3 / lam) (e^lam gamma(1/2, lam) / (2 sqrt(lam)) - 1)
    if lam == 0.0:
        return math.log(2.0 * math.pi * R**3 * 2.0 / 3.0)
    if lam < 1e-4:
        # The bracket cancels to O(lam); use its series lam (2/3 + lam/5 + lam^2/21 + ...).
        bracket_over_lam = 0.0
        term = 1.0
        for k in range(12):
            # coefficient of lam^k in int_0^1 (1 - y^2)^{k+1} / (k+1)! dy
            coef = math.factorial(k + 1) * 2 ** (2 * k + 2) * math.factorial(k + 1) / (
                math.factorial(2 * k + 3) * math.factorial(k + 1)
            )
            bracket_over_lam += coef * term
            term *= lam
        return math.log(2.0 * math.pi * R**3) + math.log(bracket_over_lam)
    log_g = log_lower_incomplete_gamma(0.5, lam)
    inner = math.exp(log_g - 0.5 * math.log(lam) - math.log(2.0)) - math.exp(-lam)
    return math.log(2.0 * math.pi * R**3 / lam) + lam + math.log(inner)


def zeta_rot(theta: float, gp, method: str = "marginal", rtol: float = 1e-14) -> float:
    """Rotational part of the Massieu function, ln Z_rot(theta).

    ``method`` selects one of three independent evaluations: ``"marginal"``
    integrates the radial marginal, ``"direct"`` integrates along the
    rotation axis coordinate, ``"gamma"`` uses the incomplete gamma closed form.
    """
    theta = _check_theta(theta)
    lam = lam_of(theta, gp)
    if method == "marginal":
        return _log_zrot_marginal(lam, gp.R, rtol)
    if method == "direct":
        return _log_zrot_direct(lam, gp.R, rtol)
    if method == "gamma":
        return _log_zrot_gamma(lam, gp.R)
    raise ValueError(f"unknown method {method!r}; expected one of {ZROT_METHODS}")


def massieu(beta: float, theta: float, gp) -> float:
    """Total Massieu function z = zeta_int(beta) + zeta_rot(theta)."""
    return zeta_int(beta, gp) + zeta_rot(theta, gp)


@dataclass(frozen=True)
class TMoments:
    """Moments of t = 1 - x / R^2 under the Gibbs radial marginal."""

    lam: float
    mean: float
    central: np.ndarray  # E[(t - mean)^k], k = 0..kmax
    errors: np.ndarray


def t_moments(lam: float, kmax: int, rtol: float = 1e-14) -> TMoments:
    """Mean and central moments of t up to order ``kmax``."""
    if lam < 0:
        raise ValueError("lam must be non-negative")
    bps = gaussian_breakpoints(lam)

    def first(s):
        w = 2.0 * s * s * np.exp(-lam * s * s)
        return np.stack([w, w * s * s], axis=-1)

    (n0, n1), _ = adaptive_gauss_legendre(first, 0.0, 1.0, rtol=rtol, breakpoints=bps)
    mean = n1 / n0
    powers = np.arange(kmax + 1)

    def central(s):
        w = 2.0 * s * s * np.exp(-lam * s * s)
        d = s * s - mean
        return w[:, None] * d[:, None] ** powers[None, :]

    vals, errs = adaptive_gauss_legendre(central, 0.0, 1.0, rtol=rtol, breakpoints=bps)
    cm = vals / vals[0]
    cm[0] = 1.0
    cm[1] = 0.0
    return TMoments(lam=lam, mean=mean, central=cm, errors=errs / vals[0])


def iota_central_moments(theta: float, gp, kmax: int, rtol: float = 1e-14) -> np.ndarray:
    """Central moments E[(iota - E iota)^k] for k = 0..kmax."""
    theta = _check_theta(theta)
    tm = t_moments(lam_of(theta, gp), kmax, rtol)
    scale = -0.5 * gp.m * gp.R**2
    return tm.central * scale ** np.arange(kmax + 1)


def iota_mean(theta: float, gp, rtol: float = 1e-14) -> float:
    """E[iota] = (m R^2 / 2) E[1 - t]."""
    theta = _check_theta(theta)
    lam = lam_of(theta, gp)
    bps = gaussian_breakpoints(lam)

    def f(s):
        w = 2.0 * s * s * np.exp(-lam * s * s)
        return np.stack([w, w * (1.0 - s * s)], axis=-1)

    (n0, n1), _ = adaptive_gauss_legendre(f, 0.0, 1.0, rtol=rtol, breakpoints=bps)
    return 0.5 * gp.m * gp.R**2 * n1 / n0


def iota_raw_moments(theta: float, gp, kmax: int, rtol: float = 1e-14) -> np.ndarray:
    """Raw moments E[iota^k] for k = 0..kmax (loses accuracy at large theta)."""
    theta = _check_theta(theta)
    lam = lam_of(theta, gp)
    powers = np.arange(kmax + 1)

    def f(s):
        w = 2.0 * s * s * np.exp(-lam * s * s)
        return w[:, None] * (1.0 - s * s)[:, None] ** powers[None, :]

    vals, _ = adaptive_gauss_legendre(f, 0.0, 1.0, rtol=rtol, breakpoints=gaussian_breakpoints(lam))
    return vals / vals[0] * (0.5 * gp.m * gp.R**2) ** powers


def inertia(theta: float, gp) -> float:
    """Inertia factor I = 2 E[iota], so that M = I omega."""
    return 2.0 * iota_mean(theta, gp)


def inertia_derivative(theta: float, gp) -> float:
    """dI/dtheta = 2 Var(iota)."""
    return 2.0 * iota_central_moments(theta, gp, 2)[2]


def radial_density(x: np.ndarray, theta: float, gp) -> np.ndarray:
    """Normalised density of x = rho^2 on [0, R^2] under the Gibbs state."""
    theta = _check_theta(theta)
    x = np.asarray(x, dtype=float)
    R2 = gp.R**2
    lam = lam_of(theta, gp)
    log_norm = zeta_rot(theta, gp) - math.log(2.0 * math.pi)
    inside = (x >= 0) & (x <= R2)
    out = np.zeros_like(x)
    xi = x[inside]
    # exp(theta m x / 2) = exp(lam x / R^2)
    out[inside] = np.sqrt(R2 - xi) * np.exp(lam * xi / R2 - log_norm)
    return out
