"""Reference Hessian geometry of a rotating rigid body.

A body with heat capacity C and inertia tensor I has internal energy C / beta
and rotational energy I(omega, omega) / 2.  In the flat coordinates (beta, r)
with r = -beta omega its Massieu potential is

    phi(beta, r) = -C ln beta + r^T I r / (2 beta)      (up to a constant)

and the metric in (beta, omega) is C dbeta^2 / beta^2 + beta I(domega, domega).
With u~ = 2 sqrt(C / beta) and Omega~ = I^(1/2) omega it becomes
(4C / u~^2)(du~^2 + |dOmega~|^2), a hyperbolic half-space of curvature -1/(4C).

The dual potential is -S with S(E, M) = C ln(E - M^T I^-1 M / 2); its Hessian
structure has constant Hessian sectional curvature 1/C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .covderiv import faa_di_bruno, quadratic_over_beta_partials
from .curvature import hessian_curvature_arrays
from .model import ChartJacobian, DomainError, GeneralizedTemperature, chart_jacobian, to_flat, transport
from .tensor import CovTensor, UnsupportedOrderError


class DegenerateBodyError(DomainError):
    """Inertia tensor that is not positive-definite (planar or singular body)."""


@dataclass(frozen=True, eq=False)
class RigidBodyParams:
    C: float
    inertia: Union[float, np.ndarray] = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.C) and self.C > 0):
            raise DomainError("heat capacity C must be positive")
        I = np.asarray(self.inertia, dtype=float)
        if I.ndim == 0:
            if not I > 0:
                raise DegenerateBodyError("inertia must be positive")
        else:
            if I.shape != (3, 3) or not np.allclose(I, I.T):
                raise DegenerateBodyError("inertia tensor must be a symmetric 3x3 matrix")
            if np.min(np.linalg.eigvalsh(I)) <= 0:
                raise DegenerateBodyError("inertia tensor must be positive-definite")
        I = I.copy()
        I.setflags(write=False)
        object.__setattr__(self, "inertia", I)

    @property
    def spherical(self) -> bool:
        return self.inertia.ndim == 0

    @property
    def matrix(self) -> np.ndarray:
        return float(self.inertia) * np.eye(3) if self.spherical else np.array(self.inertia)

    @property
    def scalar(self) -> float:
        if not self.spherical:
            raise UnsupportedOrderError("a scalar inertia is only defined for a spherical body")
        return float(self.inertia)

    @property
    def sqrt_matrix(self) -> np.ndarray:
        w, V = np.linalg.eigh(self.matrix)
        return V @ np.diag(np.sqrt(w)) @ V.T


def rb_potential(params: RigidBodyParams, x) -> float:
    x = np.asarray(x, dtype=float)
    if not x[0] > 0:
        raise DomainError("beta must be positive")
    r = x[1:]
    return -params.C * math.log(x[0]) + 0.5 * r @ params.matrix @ r / x[0]


def rb_jet(params: RigidBodyParams, p: GeneralizedTemperature, nmax: int = 4) -> dict:
    """{n: D^n phi} in the flat chart, exact."""
    x = to_flat(p)
    out = {}
    for n in range(1, nmax + 1):
        d = quadratic_over_beta_partials(0.5 * params.matrix, x, n)
        d[(0,) * n] += -params.C * (-1) ** (n - 1) * math.factorial(n - 1) / p.beta**n
        out[n] = d
    return out


def rb_metric(params: RigidBodyParams, p: GeneralizedTemperature, chart: str = "beta-omega") -> CovTensor:
    """Metric C dbeta^2/beta^2 + beta I(domega, domega)."""
    if chart == "beta-omega":
        g = np.zeros((4, 4))
        g[0, 0] = params.C / p.beta**2
        g[1:, 1:] = p.beta * params.matrix
        return CovTensor(g, "beta-omega")
    g = CovTensor(rb_jet(params, p, 2)[2])
    if chart == "flat":
        return g
    if chart == "beta-M":
        fwd = np.zeros((4, 4))
        fwd[0, 0] = 1.0
        fwd[1:, :] = -g.components[1:, :]
        return transport(g, ChartJacobian("beta-M", np.linalg.inv(fwd)))
    return transport(g, chart_jacobian(p, None, chart))


def halfspace_coordinates(params: RigidBodyParams, p: GeneralizedTemperature) -> np.ndarray:
    """(u~, Omega~) = (2 sqrt(C / beta), I^(1/2) omega)."""
    return np.concatenate([[2.0 * math.sqrt(params.C / p.beta)], params.sqrt_matrix @ p.omega])


def halfspace_pullback(params: RigidBodyParams, p: GeneralizedTemperature) -> np.ndarray:
    """Pull (4C/u~^2)(du~^2 + |dOmega~|^2) back to the (beta, omega) chart."""
    ut = 2.0 * math.sqrt(params.C / p.beta)
    J = np.zeros((4, 4))  # d(u~, Omega~) / d(beta, omega)
    J[0, 0] = -math.sqrt(params.C) * p.beta**-1.5
    J[1:, 1:] = params.sqrt_matrix
    return 4.0 * params.C / ut**2 * J.T @ J


def rb_momenta(params: RigidBodyParams, p: GeneralizedTemperature) -> tuple[float, np.ndarray]:
    M = params.matrix @ p.omega
    return params.C / p.beta + 0.5 * p.omega @ M, M


def rb_entropy(params: RigidBodyParams, E: float, M) -> float:
    """S(E, M) = C ln(E - M^T I^-1 M / 2)."""
    M = np.asarray(M, dtype=float)
    h = E - 0.5 * M @ np.linalg.solve(params.matrix, M)
    if not h > 0:
        raise DomainError("internal energy E - M I^-1 M / 2 must be positive")
    return params.C * math.log(h)


def rb_potentials(params: RigidBodyParams, p: GeneralizedTemperature) -> tuple[float, float]:
    """Entropy S and Massieu potential phi = S - C + beta I(omega, omega) / 2."""
    E, M = rb_momenta(params, p)
    S = rb_entropy(params, E, M)
    return S, S - params.C + 0.5 * p.beta * p.omega @ params.matrix @ p.omega


def rb_dual_jet(params: RigidBodyParams, E: float, M, nmax: int = 4) -> dict:
    """{n: D^n psi} for psi = -S in the flat dual coordinates (E, M)."""
    M = np.asarray(M, dtype=float)
    Iinv = np.linalg.inv(params.matrix)
    h = E - 0.5 * M @ Iinv @ M
    if not h > 0:
        raise DomainError("internal energy must be positive")
    inner = {l: np.zeros((4,) * l) for l in range(1, nmax + 1)}
    inner[1] = np.concatenate([[1.0], -Iinv @ M])
    if nmax >= 2:
        inner[2][1:, 1:] = -Iinv
    # psi = -C ln h: psi^(j) = -C (-1)^(j-1) (j-1)! / h^j
    outer = [-params.C * (-1) ** (j - 1) * math.factorial(j - 1) / h**j for j in range(1, nmax + 1)]
    return {n: faa_di_bruno(outer, inner, n) for n in range(1, nmax + 1)}


def rb_generic_curvature(params: RigidBodyParams, p: GeneralizedTemperature) -> np.ndarray:
    """K from the generic Hessian-curvature formula applied to the exact jet (flat chart)."""
    j = rb_jet(params, p, 4)
    return hessian_curvature_arrays(j[2], j[3], j[4])


def rb_dual_curvature(params: RigidBodyParams, E: float, M) -> tuple[np.ndarray, np.ndarray]:
    """(metric, K) of the dual structure in (E, M)."""
    j = rb_dual_jet(params, E, M, 4)
    return j[2], hessian_curvature_arrays(j[2], j[3], j[4])


def rb_hessian_curvature(params: RigidBodyParams, p: GeneralizedTemperature) -> CovTensor:
    """Closed-form K in the (u, omega) chart for a spherical body.

    (u^4/16) K = C du^4 - (I^2 / (2C)) dw_i dw_j dw_i dw_j
                 + (I/2)(du du W + <dw du | du dw> + du W du + W du du)

    where W = <dw | dw> = sum_i dw_i (x) dw_i, juxtaposition is the tensor
    product and the slot order is as written.
    """
    if not params.spherical:
        raise UnsupportedOrderError("closed-form curvature is only available for spherical inertia")
    C, I = params.C, params.scalar
    u = p.u
    e = np.eye(4)
    du, dw = e[0], e[1:]
    K = C * np.einsum("a,b,c,d->abcd", du, du, du, du)
    K -= 0.5 * I**2 / C * np.einsum("ia,jb,ic,jd->abcd", dw, dw, dw, dw)
    K += 0.5 * I * (
        np.einsum("a,b,ic,id->abcd", du, du, dw, dw)
        + np.einsum("ia,b,c,id->abcd", dw, du, du, dw)
        + np.einsum("a,ib,ic,d->abcd", du, dw, dw, du)
        + np.einsum("ia,ib,c,d->abcd", dw, dw, du, du)
    )
    return CovTensor(16.0 / u**4 * K, "u-omega")


def rb_poisson_leaf_factor(params: RigidBodyParams) -> float:
    """Conformal factor 1/I between the pulled-back KKS structure and the Euclidean one."""
    return 1.0 / params.scalar


def kks_sphere_area(radius: float, n: int = 64) -> float:
    """Symplectic area of the coadjoint sphere |M| = radius under the KKS form.

    The KKS form evaluated on tangent vectors X, Y at M is M . (X x Y) / |M|^2;
    it is integrated over polar/azimuthal coordinates by Gauss-Legendre.
    """
    x, w = np.polynomial.legendre.leggauss(n)
    a, wa = 0.5 * math.pi * (x + 1.0), 0.5 * math.pi * w
    b, wb = math.pi * (x + 1.0), math.pi * w
    total = 0.0
    for ai, wai in zip(a, wa):
        for bj, wbj in zip(b, wb):
            M = radius * np.array([math.sin(ai) * math.cos(bj), math.sin(ai) * math.sin(bj), math.cos(ai)])
            Ta = radius * np.array([math.cos(ai) * math.cos(bj), math.cos(ai) * math.sin(bj), -math.sin(ai)])
            Tb = radius * np.array([-math.sin(ai) * math.sin(bj), math.sin(ai) * math.cos(bj), 0.0])
            total += wai * wbj * M @ np.cross(Ta, Tb) / radius**2
    return total


def rb_leaf_area(params: RigidBodyParams, rho: float) -> float:
    """Area of the leaf through |omega| = rho: the KKS sphere of radius |M| = I rho."""
    return kks_sphere_area(params.scalar * rho)
