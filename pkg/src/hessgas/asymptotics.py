"""High-velocity limits: Watson's lemma, weak limit of the Gibbs states, convergence sweeps.

As theta = beta |omega|^2 grows, the position law concentrates on the
equatorial circle of radius R orthogonal to omega, the cumulants behave like
(-1)^n (3/2)(n-1)! / theta^n, and the rescaled derivatives of z approach those
of a rigid body with heat capacity 3 and inertia I_inf = m R^2.  The sweeps
below evaluate each of these statements on a grid of theta values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import partition
from .covderiv import du as du_form
from .covderiv import domega, jet
from .cumulants import cumulant_limit, cumulant_table, moment_limit_constant
from .curvature import (
    hessian_curvature_arrays,
    metric_beta_omega_closed_form,
    kn_deviation,
    riemann_from_hessian,
    sample_planes,
    sectional,
)
from .model import GasParameters, GeneralizedTemperature, chart_jacobian, transport
from .quadrature import AccuracyError, adaptive_gauss_legendre, gaussian_breakpoints
from .rigidbody import RigidBodyParams, rb_hessian_curvature
from .tensor import CovTensor, sym_power, sym_product_array

NOISE_FLOOR = 1e-12
DEFAULT_GRID = tuple(10.0**k for k in range(6))
DEFAULT_AXIS = np.array([1.0, 2.0, 2.0]) / 3.0


@dataclass
class SweepResult:
    """One quantity evaluated along a theta grid."""

    name: str
    thetas: np.ndarray
    values: np.ndarray
    limit: float
    rel_errors: np.ndarray
    failures: dict = field(default_factory=dict)

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.rel_errors = np.asarray(self.rel_errors, dtype=float)
        if np.any(np.diff(self.thetas) <= 0):
            raise ValueError("theta grid must be strictly increasing")

    @property
    def monotone(self) -> bool:
        """Relative error non-increasing over the last three grid points, up to the noise floor."""
        return monotone_tail(self.rel_errors)

    @property
    def decay_exponent(self) -> float:
        """Slope of log(error) against log(theta) over the points above the noise floor."""
        ok = np.isfinite(self.rel_errors) & (self.rel_errors > NOISE_FLOOR)
        if ok.sum() < 2:
            return float("nan")
        return float(np.polyfit(np.log(self.thetas[ok]), np.log(self.rel_errors[ok]), 1)[0])

    @property
    def final_error(self) -> float:
        return float(self.rel_errors[-1])


def monotone_tail(errors: Sequence[float], n: int = 3, floor: float = NOISE_FLOOR) -> bool:
    e = np.asarray(errors, dtype=float)[-n:]
    if not np.all(np.isfinite(e)):
        return False
    return bool(np.all(np.diff(e) <= floor))


def relative_error(value: float, limit: float) -> float:
    return abs(value - limit) / abs(limit) if limit != 0 else abs(value - limit)


# --- Watson's lemma ------------------------------------------------------------


def watson_integral(F: Callable, alpha: float, A: float, lam: float) -> float:
    """lam^(alpha+1) e^(-lam A) int_0^A F(x) (A - x)^alpha e^(lam x) dx.

    With s = A - x the integrand is F(A - s) s^alpha e^(-lam s); the change of
    variables s = v^2 (alpha > -1/2) or w = s^(alpha+1) (otherwise) removes
    the endpoint singularity.
    """
    if alpha <= -1:
        raise ValueError("alpha must exceed -1")
    if A <= 0:
        raise ValueError("A must be positive")
    if alpha > -0.5:
        def f(v):
            s = v * v
            return 2.0 * np.asarray(F(A - s), dtype=float) * v ** (2 * alpha + 1) * np.exp(-lam * s)

        upper = math.sqrt(A)
        val, _ = adaptive_gauss_legendre(f, 0.0, upper, rtol=1e-13, breakpoints=gaussian_breakpoints(lam * A, upper) if lam * A > 1 else ())
    else:
        k = 1.0 / (alpha + 1.0)

        def f(w):
            s = w**k
            return np.asarray(F(A - s), dtype=float) * np.exp(-lam * s) / (alpha + 1.0)

        val, _ = adaptive_gauss_legendre(f, 0.0, A ** (alpha + 1.0), rtol=1e-13)
    return lam ** (alpha + 1.0) * val


def watson_first_order(F: Callable, alpha: float, A: float, lambda_grid: Sequence[float]) -> SweepResult:
    target = float(F(np.array([A]))[0]) * math.gamma(alpha + 1.0)
    lams = np.asarray(lambda_grid, dtype=float)
    vals, errs, failures = [], [], {}
    for lam in lams:
        try:
            v = watson_integral(F, alpha, A, lam)
        except AccuracyError as exc:
            failures[float(lam)] = str(exc)
            v = float("nan")
        vals.append(v)
        errs.append(relative_error(v, target))
    return SweepResult(f"watson(alpha={alpha})", lams, vals, target, errs, failures)


# --- weak limit --------------------------------------------------------------


def orthonormal_frame(omega) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(e1, e2, axis) with axis = omega / |omega| and e1, e2 spanning its orthogonal plane."""
    omega = np.asarray(omega, dtype=float)
    n = np.linalg.norm(omega)
    if n == 0:
        raise ValueError("omega must be non-zero")
    axis = omega / n
    helper = np.eye(3)[np.argmin(np.abs(axis))]
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    return e1, e2, axis


def cartesian_test_function(fq: Callable, omega) -> Callable:
    """Turn f(q) with q of shape (..., 3) into a function of cylinder coordinates (rho, y, phi)."""
    e1, e2, axis = orthonormal_frame(omega)

    def f(rho, y, phi):
        q = (
            (rho * np.cos(phi))[..., None] * e1
            + (rho * np.sin(phi))[..., None] * e2
            + np.asarray(y)[..., None] * axis
        )
        return fq(q)

    return f


def weak_limit_integral(f: Callable, beta: float, omega, gp: GasParameters, n_axis: int = 32, n_angle: int = 32) -> float:
    """Integral of f(rho, y, phi) against the position law of the Gibbs state.

    Cylinder coordinates are aligned with omega: rho is the distance to the
    axis, y the coordinate along it and phi the azimuth.  With
    t = 1 - rho^2/R^2 = s^2 and y = R s v, v in [-1, 1], the law is
    proportional to 2 s^2 exp(-lam s^2) ds dv dphi.
    """
    p = GeneralizedTemperature(beta, omega)
    lam = partition.lam_of(p.theta, gp)
    R = gp.R
    xv, wv = np.polynomial.legendre.leggauss(n_axis)
    phi = 2.0 * math.pi * np.arange(n_angle) / n_angle
    wphi = 2.0 * math.pi / n_angle

    def inner(s):
        s = np.asarray(s)
        S, V, P = np.meshgrid(s, xv, phi, indexing="ij")
        RHO = R * np.sqrt(np.clip(1.0 - S * S, 0.0, None))
        vals = np.asarray(f(RHO, R * S * V, P), dtype=float)
        avg = np.einsum("ijk,j->i", vals, wv) * wphi
        w = 2.0 * s * s * np.exp(-lam * s * s)
        return np.stack([w * avg, w * 2.0 * 2.0 * math.pi], axis=-1)

    (num, den), _ = adaptive_gauss_legendre(inner, 0.0, 1.0, rtol=1e-12, breakpoints=gaussian_breakpoints(lam))
    return float(num / den)


def circle_average(f: Callable, gp: GasParameters, n_angle: int = 256) -> float:
    """Average of f over the circle rho = R, y = 0."""
    phi = 2.0 * math.pi * np.arange(n_angle) / n_angle
    return float(np.mean(np.asarray(f(np.full_like(phi, gp.R), np.zeros_like(phi), phi), dtype=float)))


# --- limit forms ---------------------------------------------------------------


def rigid_limit_form(n: int, I_inf: float) -> np.ndarray:
    """3 (n-1)! du^(x)n + I_inf du^(.(n-2)) . <dw | dw> in the (u, omega) chart."""
    e = np.eye(4)
    du, dw = e[0], e[1:]
    out = 3.0 * math.factorial(n - 1) * sym_power(du, n) / math.factorial(n)
    W = np.einsum("ia,ib->ab", dw, dw)
    if n == 2:
        return out + I_inf * W
    return out + I_inf * sym_product_array(sym_power(du, n - 2), W)


def limit_hessian_curvature(p: GeneralizedTemperature, gp: GasParameters, heat_capacity: float = 3.0, inertia: Optional[float] = None) -> CovTensor:
    """Rigid-body Hessian curvature with heat capacity 3 and inertia I_inf, in (u, omega)."""
    I = gp.inertia_high_velocity if inertia is None else inertia
    return rb_hessian_curvature(RigidBodyParams(heat_capacity, I), p)


# --- sweeps ----------------------------------------------------------------------


def point_at(theta: float, beta: float = 1.0, axis=DEFAULT_AXIS) -> GeneralizedTemperature:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return GeneralizedTemperature(beta, math.sqrt(theta / beta) * axis)


def limit_quantities(theta: float, gp: GasParameters, beta: float = 1.0, n_planes: int = 50, seed: int = 0) -> dict:
    """All sweep quantities at one theta, as {name: value}."""
    p = point_at(theta, beta)
    I_inf = gp.inertia_high_velocity
    out = {}
    cm = partition.iota_central_moments(theta, gp, 4)
    for k in range(1, 5):
        out[f"moment_{k}"] = theta**k * cm[k]
    table = cumulant_table(theta, gp, 4)
    for n in range(2, 5):
        out[f"cumulant_{n}"] = theta**n * table[n]
    out["inertia"] = 2.0 * table[1]
    j = {n: t for n, t in jet(p, gp, 4).items()}
    g = j[2].components
    gi = np.linalg.inv(g)
    d_u = du_form(p)
    out["norm_du"] = beta * float(d_u @ gi @ d_u)
    dw = domega(p).components
    out["norm_domega"] = beta * float(np.einsum("ai,ab,bi->", dw, gi, dw))
    jac = chart_jacobian(p, gp, "u-omega", metric=g)
    # g_uu from the (beta, omega) closed form: dbeta = -beta^(3/2) du involves no
    # mixing with omega, which avoids an O(theta * eps) cancellation in the flat chart.
    out["heat_capacity"] = metric_beta_omega_closed_form(p, gp)[0, 0] * beta**2
    for n in (2, 3, 4):
        dn = transport(j[n], jac).components * beta ** (-n / 2)
        L = rigid_limit_form(n, I_inf)
        out[f"dnz_{n}"] = float(np.linalg.norm((dn - L).ravel()) / np.linalg.norm(L.ravel()))
    K = hessian_curvature_arrays(g, j[3].components, j[4].components)
    riem = riemann_from_hessian(K)
    rng = np.random.default_rng(seed)
    secs = np.array([sectional(riem, g, u, v) for u, v in sample_planes(rng, n_planes)])
    out["sectional"] = float(secs[np.argmax(np.abs(secs + 1.0 / 12.0))])
    out["sectional_samples"] = secs
    out["kn_deviation"] = kn_deviation(riem, g)
    K_u = transport(CovTensor(K), jac).components / beta**2
    K_lim = limit_hessian_curvature(p, gp).components / beta**2
    out["hessian_curvature"] = float(np.linalg.norm((K_u - K_lim).ravel()) / np.linalg.norm(K_lim.ravel()))
    return out


def sweep_limits(gp: GasParameters) -> dict:
    """Target value of each sweep quantity."""
    I_inf = gp.inertia_high_velocity
    lim = {f"moment_{k}": float(moment_limit_constant(k)) for k in range(1, 5)}
    lim.update({f"cumulant_{n}": cumulant_limit(n) for n in range(2, 5)})
    lim.update(
        {
            "inertia": I_inf,
            "norm_du": 1.0 / 3.0,
            "norm_domega": 6.0 / I_inf,
            "heat_capacity": 3.0,
            "dnz_2": 0.0,
            "dnz_3": 0.0,
            "dnz_4": 0.0,
            "sectional": -1.0 / 12.0,
            "kn_deviation": 0.0,
            "hessian_curvature": 0.0,
        }
    )
    return lim


SWEEP_QUANTITIES = tuple(sweep_limits(GasParameters()).keys())


def limit_suite(gp: GasParameters, theta_grid: Sequence[float] = DEFAULT_GRID, beta: float = 1.0, seed: int = 0) -> dict:
    """{name: SweepResult} for every limit statement; per-theta failures are recorded, not raised."""
    thetas = np.asarray(theta_grid, dtype=float)
    if thetas.size == 0:
        raise ValueError("empty theta grid")
    if np.any(thetas <= 0) or np.any(np.diff(thetas) <= 0):
        raise ValueError("theta grid must be positive and strictly increasing")
    if thetas[-1] > 1e6:
        raise ValueError("theta grid is limited to theta <= 1e6")
    limits = sweep_limits(gp)
    values = {name: [] for name in limits}
    failures = {name: {} for name in limits}
    for th in thetas:
        try:
            q = limit_quantities(float(th), gp, beta, seed=seed)
        except (AccuracyError, np.linalg.LinAlgError, ValueError) as exc:
            q = {}
            for name in limits:
                failures[name][float(th)] = str(exc)
        for name in limits:
            values[name].append(q.get(name, float("nan")))
    out = {}
    for name, lim in limits.items():
        vals = np.array(values[name], dtype=float)
        errs = np.array([relative_error(v, lim) for v in vals])
        out[name] = SweepResult(name, thetas, vals, lim, errs, failures[name])
    return out
