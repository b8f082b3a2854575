"""Metric, Hessian curvature and Riemann tensor of a Hessian structure.

For a Hessian metric g = D^2 phi with respect to a flat connection D,

    K_abcd = (D^2 g_abcd - g^ef Dg_ace Dg_bdf) / 2
    R_abcd = (K_abcd - K_bacd) / 2

with the sectional curvature of the plane (u, v) equal to
R(u, v, u, v) / (|u|^2 |v|^2 - g(u, v)^2).  The Hessian sectional curvature of
a symmetric contravariant 2-tensor h is K_abcd h^ac h^bd / |h|^2; it is
constant equal to c exactly when K = (c/2)(g_ab g_cd + g_ad g_cb), and then the
Riemannian sectional curvature is -c/4.

An independent Riemann tensor comes from Christoffel symbols of any metric
given as a function of chart coordinates, using finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import partition
from .covderiv import cov_diff_z, jet
from .cumulants import cumulant_table
from .finite_diff import fd_partials
from .model import (
    ChartJacobian,
    GasParameters,
    GeneralizedTemperature,
    chart_jacobian,
    transport,
)
from .tensor import CovTensor


# --- metric ---------------------------------------------------------------


def metric(p: GeneralizedTemperature, gp: GasParameters, chart: str = "flat") -> CovTensor:
    """g = D^2 z pulled back to ``chart``."""
    g = cov_diff_z(2, p, gp)
    if chart == "flat":
        return g
    return transport(g, chart_jacobian(p, gp, chart, metric=g))


def metric_beta_omega_closed_form(p: GeneralizedTemperature, gp: GasParameters) -> np.ndarray:
    """(3/2) dbeta^2 / beta^2 + beta I <domega | domega> + (I'/2) dtheta (x) dtheta in (beta, omega)."""
    b, om = p.beta, p.omega
    c = cumulant_table(p.theta, gp, 2).values
    I, dI = 2.0 * c[0], 2.0 * c[1]
    dth = np.concatenate([[om @ om], 2.0 * b * om])
    g = np.diag([1.5 / b**2, b * I, b * I, b * I])
    return g + 0.5 * dI * np.outer(dth, dth)


def beta_m_blocks(p: GeneralizedTemperature, gp: GasParameters) -> dict:
    """Closed-form blocks of the metric in the (beta, M) chart.

    ``beta_beta`` is (C + theta I' I theta / (2 (2 theta I' + I))) / beta^2 with
    C = 3/2.  The angular-momentum block is beta / (I + 2 theta I') along
    omega and beta / I across it; ``isotropic_MM`` is the single coefficient
    beta / (I + 2 theta I') applied to every direction, which is only
    correct along omega.
    """
    b, th = p.beta, p.theta
    c = cumulant_table(th, gp, 2).values
    I, dI = 2.0 * c[0], 2.0 * c[1]
    denom = 2.0 * th * dI + I
    bb = (1.5 + th * dI / denom * 0.5 * I * th) / b**2
    om = p.omega
    n2 = om @ om
    par = np.outer(om, om) / n2 if n2 > 0 else np.zeros((3, 3))
    perp = np.eye(3) - par
    MM = b / denom * par + b / I * perp
    return {"beta_beta": bb, "MM": MM, "isotropic_MM": b / denom * np.eye(3)}


def inverse(g) -> np.ndarray:
    g = g.components if isinstance(g, CovTensor) else np.asarray(g)
    return np.linalg.inv(g)


# --- Hessian curvature ------------------------------------------------------


def hessian_curvature_arrays(g: np.ndarray, Dg: np.ndarray, D2g: np.ndarray) -> np.ndarray:
    gi = np.linalg.inv(g)
    quad = np.einsum("ace,ef,bdf->abcd", Dg, gi, Dg)
    return 0.5 * (D2g - quad)


def riemann_from_hessian(K: np.ndarray) -> np.ndarray:
    return 0.5 * (K - np.transpose(K, (1, 0, 2, 3)))


def kulkarni_nomizu_half(g: np.ndarray) -> np.ndarray:
    """(g wedge g) / 2 = g_ac g_bd - g_ad g_bc."""
    return np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g)


def constant_hessian_form(g: np.ndarray, c: float) -> np.ndarray:
    """K of constant Hessian sectional curvature c: (c/2)(g_ab g_cd + g_ad g_cb)."""
    return 0.5 * c * (np.einsum("ab,cd->abcd", g, g) + np.einsum("ad,cb->abcd", g, g))


def sectional(riem: np.ndarray, g: np.ndarray, u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    num = np.einsum("abcd,a,b,c,d->", riem, u, v, u, v)
    den = (u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2
    if den <= 1e-14 * (u @ g @ u) * (v @ g @ v):
        raise ValueError("degenerate plane")
    return float(num / den)


def hessian_sectional(K: np.ndarray, g: np.ndarray, h) -> float:
    h = np.asarray(h, dtype=float)
    num = np.einsum("abcd,ac,bd->", K, h, h)
    den = np.einsum("ab,cd,ac,bd->", g, g, h, h)
    return float(num / den)


def g_norm(t: np.ndarray, g: np.ndarray) -> float:
    """Norm of a covariant tensor with all slots raised by g."""
    gi = np.linalg.inv(g)
    raised = t
    for k in range(t.ndim):
        raised = np.moveaxis(np.tensordot(raised, gi, axes=(k, 0)), -1, k)
    return float(np.sqrt(abs(np.sum(raised * t))))


def sample_planes(rng: np.random.Generator, n_random: int, dim: int = 4):
    """The six coordinate planes followed by ``n_random`` random ones."""
    planes = []
    eye = np.eye(dim)
    for i in range(dim):
        for j in range(i + 1, dim):
            planes.append((eye[i], eye[j]))
    for _ in range(n_random):
        planes.append((rng.standard_normal(dim), rng.standard_normal(dim)))
    return planes


# --- Christoffel route -------------------------------------------------------


def riemann_christoffel(
    metric_fn: Callable[[np.ndarray], np.ndarray],
    y,
    steps,
    richardson: int = 2,
) -> np.ndarray:
    """Lowered Riemann tensor of a metric given in chart coordinates.

    R_abcd = (d_b d_c g_ad + d_a d_d g_bc - d_a d_c g_bd - d_b d_d g_ac) / 2
             + g_ef (G^e_bc G^f_ad - G^e_bd G^f_ac)

    First and second metric derivatives come from central differences with
    Richardson extrapolation.  With this sign the round 2-sphere has
    sectional curvature +1.
    """
    y = np.asarray(y, dtype=float)
    g = np.asarray(metric_fn(y), dtype=float)
    dg = fd_partials(metric_fn, y, 1, steps, richardson, positive_first=False)  # dg[k, i, j] = d_k g_ij
    d2g = fd_partials(metric_fn, y, 2, steps, richardson, positive_first=False)  # d2g[k, l, i, j]
    gi = np.linalg.inv(g)
    # Christoffel symbols of the first kind: G_fbc = (d_b g_fc + d_c g_fb - d_f g_bc) / 2
    first = 0.5 * (np.einsum("bfc->fbc", dg) + np.einsum("cfb->fbc", dg) - dg)
    gamma = np.einsum("ef,fbc->ebc", gi, first)
    second = 0.5 * (
        np.einsum("bcad->abcd", d2g)
        + np.einsum("adbc->abcd", d2g)
        - np.einsum("acbd->abcd", d2g)
        - np.einsum("bdac->abcd", d2g)
    )
    quad = np.einsum("ef,ebc,fad->abcd", g, gamma, gamma) - np.einsum("ef,ebd,fac->abcd", g, gamma, gamma)
    return second + quad


# --- report ----------------------------------------------------------------


@dataclass
class CurvatureReport:
    """Metric, Hessian curvature and Riemann tensor at a point, with sampled sectional curvatures."""

    point: GeneralizedTemperature
    chart: str
    metric: CovTensor
    hessian_curvature: CovTensor
    riemann: CovTensor
    sectional_samples: np.ndarray
    kn_deviation: float
    derivatives: dict = field(default_factory=dict)

    @property
    def sectional_min(self) -> float:
        return float(np.min(self.sectional_samples))

    @property
    def sectional_max(self) -> float:
        return float(np.max(self.sectional_samples))


def gas_hessian_curvature(p: GeneralizedTemperature, gp: GasParameters) -> tuple:
    """(g, K, Riem) as flat-chart arrays."""
    j = jet(p, gp, 4)
    g, Dg, D2g = j[2].components, j[3].components, j[4].components
    K = hessian_curvature_arrays(g, Dg, D2g)
    return g, K, riemann_from_hessian(K), j


def kn_deviation(riem: np.ndarray, g: np.ndarray, kappa: float = -1.0 / 12.0) -> float:
    """|Riem - kappa (g wedge g)/2| / |Riem| in the g-norm."""
    return g_norm(riem - kappa * kulkarni_nomizu_half(g), g) / g_norm(riem, g)


def curvature_report(
    p: GeneralizedTemperature,
    gp: GasParameters,
    chart: str = "flat",
    n_planes: int = 50,
    seed: int = 0,
    max_order: int = 4,
) -> CurvatureReport:
    g, K, riem, j = gas_hessian_curvature(p, gp)
    rng = np.random.default_rng(seed)
    secs = np.array([sectional(riem, g, u, v) for u, v in sample_planes(rng, n_planes)])
    dev = kn_deviation(riem, g)
    jac = chart_jacobian(p, gp, chart, metric=g)
    derivs = {n: transport(j[n], jac) for n in range(1, max_order + 1) if n in j}
    return CurvatureReport(
        point=p,
        chart=chart,
        metric=transport(CovTensor(g), jac),
        hessian_curvature=transport(CovTensor(K), jac),
        riemann=transport(CovTensor(riem), jac),
        sectional_samples=secs,
        kn_deviation=dev,
        derivatives=derivs,
    )
