"""Generalized temperatures of the confined rotating gas and their charts.

A point of the Gibbs set is a pair (beta, omega) with beta > 0 and omega in
so(3) = R^3.  The affine (flat) coordinates are x = (beta, r) with
r = -beta * omega; the Massieu function z is convex in these coordinates and
its Hessian is the metric.  Other charts used here:

* ``beta-omega``: (beta, omega)
* ``u-omega``:    (u, omega) with u = 2 / sqrt(beta)
* ``beta-M``:     (beta, M) with M = I(theta) omega the angular momentum

A ``ChartJacobian`` stores d(flat)/d(chart), which pulls covariant tensors
from the flat chart back to the target chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import partition
from .tensor import CHARTS, CovTensor, TensorError


class DomainError(ValueError):
    """Point outside the Gibbs set or invalid physical parameters."""


@dataclass(frozen=True)
class GasParameters:
    """Particle mass and container radius."""

    m: float = 1.0
    R: float = 1.0

    def __post_init__(self):
        for name in ("m", "R"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a positive finite number, got {v!r}")

    @property
    def inertia_high_velocity(self) -> float:
        """Limit of the inertia factor as theta grows: m R^2."""
        return self.m * self.R**2

    @property
    def inertia_rest(self) -> float:
        """Inertia factor at theta = 0: (2/5) m R^2."""
        return 0.4 * self.m * self.R**2


@dataclass(frozen=True, eq=False)
class GeneralizedTemperature:
    """A point (beta, omega) of the Gibbs set."""

    beta: float
    omega: np.ndarray

    def __post_init__(self):
        om = np.array(self.omega, dtype=float).reshape(-1)
        if om.shape != (3,):
            raise DomainError("omega must have three components")
        b = float(self.beta)
        if not (math.isfinite(b) and b > 0):
            raise DomainError(f"beta must be positive and finite, got {self.beta!r}")
        if not np.all(np.isfinite(om)):
            raise DomainError("omega must be finite")
        om.setflags(write=False)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "omega", om)

    @property
    def r(self) -> np.ndarray:
        return -self.beta * self.omega

    @property
    def omega2(self) -> float:
        return float(self.omega @ self.omega)

    @property
    def theta(self) -> float:
        """theta = beta |omega|^2 = |r|^2 / beta."""
        return self.beta * self.omega2

    @property
    def u(self) -> float:
        return 2.0 / math.sqrt(self.beta)

    def flat(self) -> np.ndarray:
        return to_flat(self)

    def __repr__(self):
        return f"GeneralizedTemperature(beta={self.beta!r}, omega={self.omega.tolist()!r})"


def to_flat(p: GeneralizedTemperature) -> np.ndarray:
    """Flat coordinates (beta, r1, r2, r3)."""
    return np.concatenate([[p.beta], p.r])


def from_flat(x) -> GeneralizedTemperature:
    x = np.asarray(x, dtype=float)
    if x.shape != (4,):
        raise DomainError("flat coordinates must have four components")
    if not x[0] > 0:
        raise DomainError(f"beta must be positive, got {x[0]}")
    return GeneralizedTemperature(x[0], -x[1:] / x[0])


def massieu(p: GeneralizedTemperature, gp: GasParameters) -> float:
    return partition.massieu(p.beta, p.theta, gp)


def momenta(p: GeneralizedTemperature, gp: GasParameters) -> tuple[float, np.ndarray]:
    """Energy E = -dz/dbeta and angular momentum M = -dz/dr."""
    I = partition.inertia(p.theta, gp)
    E = 1.5 / p.beta + 0.5 * I * p.omega2
    return E, I * p.omega


def entropy_and_massieu(p: GeneralizedTemperature, gp: GasParameters) -> tuple[float, float]:
    """Entropy s = z + beta E + <r, M> and the Massieu function z."""
    z = massieu(p, gp)
    E, M = momenta(p, gp)
    return z + p.beta * E + float(p.r @ M), z


def dual_coordinates(p: GeneralizedTemperature, gp: GasParameters) -> np.ndarray:
    """(E, M1, M2, M3), the coordinates dual to the flat ones."""
    E, M = momenta(p, gp)
    return np.concatenate([[E], M])


@dataclass(frozen=True, eq=False)
class ChartJacobian:
    """Derivative of the flat coordinates with respect to chart coordinates.

    ``matrix[a, b] = d x_flat^a / d y^b``.  ``second[a, b, c]`` holds the
    second derivatives when they are available in closed form.
    """

    chart: str
    matrix: np.ndarray
    second: Optional[np.ndarray] = None

    @property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)


def chart_coordinates(p: GeneralizedTemperature, gp: GasParameters, chart: str) -> np.ndarray:
    if chart == "flat":
        return to_flat(p)
    if chart == "beta-omega":
        return np.concatenate([[p.beta], p.omega])
    if chart == "u-omega":
        return np.concatenate([[p.u], p.omega])
    if chart == "beta-M":
        return np.concatenate([[p.beta], momenta(p, gp)[1]])
    raise TensorError(f"unknown chart {chart!r}; expected one of {CHARTS}")


def from_chart(y, chart: str) -> GeneralizedTemperature:
    """Inverse of ``chart_coordinates`` for the charts with an explicit inverse."""
    y = np.asarray(y, dtype=float)
    if chart == "flat":
        return from_flat(y)
    if chart == "beta-omega":
        return GeneralizedTemperature(y[0], y[1:])
    if chart == "u-omega":
        if not y[0] > 0:
            raise DomainError("u must be positive")
        return GeneralizedTemperature(4.0 / y[0] ** 2, y[1:])
    raise TensorError(f"chart {chart!r} has no explicit inverse here")


def chart_jacobian(p: GeneralizedTemperature, gp: GasParameters, chart: str, metric=None) -> ChartJacobian:
    """d(flat)/d(chart) at ``p``.

    For ``beta-M`` the map depends on the gas through M = -dz/dr, so its
    derivative is the inverse of [[1, 0], [-g_rb, -g_rr]]; pass the flat
    metric as ``metric`` to avoid recomputing it.
    """
    b, om = p.beta, p.omega
    J = np.zeros((4, 4))
    second = np.zeros((4, 4, 4))
    if chart == "flat":
        J = np.eye(4)
    elif chart == "beta-omega":
        # beta = beta, r = -beta omega
        J[0, 0] = 1.0
        J[1:, 0] = -om
        J[1:, 1:] = -b * np.eye(3)
        for i in range(3):
            second[1 + i, 0, 1 + i] = second[1 + i, 1 + i, 0] = -1.0
    elif chart == "u-omega":
        # beta = 4 / u^2, r = -4 omega / u^2
        u = p.u
        J[0, 0] = -8.0 / u**3
        J[1:, 0] = 8.0 * om / u**3
        J[1:, 1:] = -b * np.eye(3)
        second[0, 0, 0] = 24.0 / u**4
        second[1:, 0, 0] = -24.0 * om / u**4
        for i in range(3):
            second[1 + i, 0, 1 + i] = second[1 + i, 1 + i, 0] = 8.0 / u**3
    elif chart == "beta-M":
        if metric is None:
            from .covderiv import cov_diff_z

            metric = cov_diff_z(2, p, gp).components
        g = np.asarray(metric.components if isinstance(metric, CovTensor) else metric)
        fwd = np.zeros((4, 4))
        fwd[0, 0] = 1.0
        fwd[1:, :] = -g[1:, :]
        return ChartJacobian(chart, np.linalg.inv(fwd), None)
    else:
        raise TensorError(f"unknown chart {chart!r}; expected one of {CHARTS}")
    return ChartJacobian(chart, J, second)


def transport(t: CovTensor, jac: ChartJacobian) -> CovTensor:
    """Pull a covariant tensor from the flat chart into ``jac.chart``."""
    if t.chart != "flat":
        raise TensorError("transport expects a tensor in the flat chart")
    out = t.components
    for _ in range(t.order):
        # Contract the leading slot and append the new one at the end.
        out = np.tensordot(out, jac.matrix, axes=(0, 0))
    return CovTensor(out, jac.chart)


def transport_back(t: CovTensor, jac: ChartJacobian) -> CovTensor:
    """Push a covariant tensor from ``jac.chart`` back to the flat chart."""
    if t.chart != jac.chart:
        raise TensorError("tensor chart does not match the Jacobian")
    inv = jac.inverse
    out = t.components
    for _ in range(t.order):
        out = np.tensordot(out, inv, axes=(0, 0))
    return CovTensor(out, "flat")
