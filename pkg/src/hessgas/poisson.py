"""Poisson bracket on the Gibbs set induced by the expected momentum.

For observables f1, f2 on the Gibbs set, let X = g^-1 df1 and Y = g^-1 df2 be
their metric gradients, read as elements of R x so(3) through the flat
coordinates (beta, r).  The translation factor R is abelian, so only the
rotational parts contribute:

    {f1, f2} = <M, X_r x Y_r>.

With this orientation the angular momentum components satisfy
{M_x, M_y} = +M_z.  The symplectic leaves are the sets of constant beta and
|M|^2, so every function of (beta, |M|^2) is a Casimir.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import partition
from .covderiv import cov_diff_z
from .finite_diff import default_steps, fd_partials
from .model import GasParameters, GeneralizedTemperature, from_flat, momenta, to_flat


@dataclass(frozen=True)
class ObservableFn:
    """Scalar function of the flat coordinates (beta, r1, r2, r3).

    ``grad`` returns the differential as a length-4 array; when it is missing
    the differential is taken by central differences.
    """

    fn: Callable[[np.ndarray], float]
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __call__(self, x) -> float:
        return float(self.fn(np.asarray(x, dtype=float)))

    def differential(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=float)
        return fd_differential(self.fn, x)

    def __mul__(self, other: "ObservableFn") -> "ObservableFn":
        def fn(x):
            return self(x) * other(x)

        def grad(x):
            return self(x) * other.differential(x) + other(x) * self.differential(x)

        return ObservableFn(fn, grad, f"({self.name})*({other.name})")


def fd_differential(fn, x: np.ndarray) -> np.ndarray:
    return fd_partials(lambda y: np.asarray(fn(y)), x, 1, default_steps(x, 1), richardson=2)


def _metric_at(x, gp) -> np.ndarray:
    return cov_diff_z(2, from_flat(x), gp).components


def beta_observable() -> ObservableFn:
    return ObservableFn(lambda x: x[0], lambda x: np.array([1.0, 0.0, 0.0, 0.0]), "beta")


def momentum_component(i: int, gp: GasParameters) -> ObservableFn:
    """M_i = -dz/dr_i, with differential -g[1 + i, :]."""

    def fn(x):
        return momenta(from_flat(x), gp)[1][i]

    def grad(x):
        return -_metric_at(x, gp)[1 + i]

    return ObservableFn(fn, grad, f"M_{'xyz'[i]}")


def energy_observable(gp: GasParameters) -> ObservableFn:
    """E = -dz/dbeta, with differential -g[0, :]."""
    return ObservableFn(
        lambda x: momenta(from_flat(x), gp)[0],
        lambda x: -_metric_at(x, gp)[0],
        "E",
    )


def casimir(phi: Callable, dphi: Callable, gp: GasParameters) -> ObservableFn:
    """f = phi(beta, s) with s = |M|^2; ``dphi`` returns (dphi/dbeta, dphi/ds)."""

    def fn(x):
        M = momenta(from_flat(x), gp)[1]
        return phi(x[0], M @ M)

    def grad(x):
        g = _metric_at(x, gp)
        M = momenta(from_flat(x), gp)[1]
        pb, ps = dphi(x[0], M @ M)
        dM = -g[1:, :]
        return pb * np.array([1.0, 0.0, 0.0, 0.0]) + 2.0 * ps * M @ dM

    return ObservableFn(fn, grad, "casimir")


def poisson_tensor(p: GeneralizedTemperature, gp: GasParameters, g: Optional[np.ndarray] = None) -> np.ndarray:
    """Matrix L with {f1, f2} = df1^T L df2 in the flat chart."""
    if g is None:
        g = cov_diff_z(2, p, gp).components
    M = momenta(p, gp)[1]
    gi = np.linalg.inv(g)
    # M . (a x b) = -a^T hat(M) b
    hat = np.array([[0.0, -M[2], M[1]], [M[2], 0.0, -M[0]], [-M[1], M[0], 0.0]])
    P = np.zeros((4, 4))
    P[1:, 1:] = -hat
    return gi @ P @ gi


def bracket(f1: ObservableFn, f2: ObservableFn, p: GeneralizedTemperature, gp: GasParameters, g: Optional[np.ndarray] = None) -> float:
    """{f1, f2} = <M, X_r x Y_r> with X, Y the metric gradients."""
    x = to_flat(p)
    if g is None:
        g = cov_diff_z(2, p, gp).components
    X = np.linalg.solve(g, f1.differential(x))
    Y = np.linalg.solve(g, f2.differential(x))
    M = momenta(p, gp)[1]
    return float(M @ np.cross(X[1:], Y[1:]))


def bracket_observable(f1: ObservableFn, f2: ObservableFn, gp: GasParameters) -> ObservableFn:
    """{f1, f2} as an observable (its differential is taken by finite differences)."""
    return ObservableFn(lambda x: bracket(f1, f2, from_flat(x), gp), None, f"{{{f1.name},{f2.name}}}")


def leaf_factor(p: GeneralizedTemperature, gp: GasParameters) -> float:
    """Conformal factor 1/I(theta) of the leaf symplectic structure."""
    return 1.0 / partition.inertia(p.theta, gp)
