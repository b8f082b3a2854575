"""Audit of closed forms against their generic counterparts.

Each row compares a closed-form expression with an independent computation
(generic Hessian-curvature formula, transported metric or limit sweep), then
repeats the comparison with the alternative coefficient that the corrected form
replaces.  The corrected form should agree to rounding; the alternative should
not.

    python scripts/closed_form_audit.py
"""

import numpy as np

from hessgas.asymptotics import limit_hessian_curvature, limit_quantities, point_at
from hessgas.covderiv import jet
from hessgas.curvature import beta_m_blocks, hessian_curvature_arrays, metric
from hessgas.model import GasParameters, GeneralizedTemperature, chart_jacobian, transport
from hessgas.partition import inertia
from hessgas.rigidbody import RigidBodyParams, rb_generic_curvature, rb_hessian_curvature
from hessgas.tensor import CovTensor


def rel(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.linalg.norm((a - b).ravel()) / np.linalg.norm(b.ravel()))


def rows():
    gp = GasParameters()
    out = []

    # Rigid body: du^4 coefficient of the Hessian curvature in (u, omega).
    params = RigidBodyParams(1.5, 1.0)
    p = GeneralizedTemperature(1.0, [0.3, -0.4, 0.8])
    generic = transport(CovTensor(rb_generic_curvature(params, p)), chart_jacobian(p, None, "u-omega")).components
    closed = rb_hessian_curvature(params, p).components
    alt = closed.copy()
    alt[0, 0, 0, 0] *= 10.0
    out.append(("rigid K, du^4 coefficient C vs 10 C", rel(closed, generic), rel(alt, generic)))

    # (beta, M) chart: M-block across the omega axis.
    p = GeneralizedTemperature(1.0, [0.0, 0.0, 3.0])
    g = metric(p, gp, "beta-M").components[1:, 1:]
    iso = beta_m_blocks(p, gp)["isotropic_MM"]
    transverse = p.beta / inertia(p.theta, gp)
    out.append(("(beta, M) block, transverse beta/I", rel(transverse, g[0, 0]), rel(iso[0, 0], g[0, 0])))

    # High-velocity limit of beta |d omega|^2: 3 / I_inf vs 6 / I_inf.
    q = limit_quantities(1e5, gp)["norm_domega"]
    I_inf = gp.inertia_high_velocity
    out.append(("beta |d omega|^2 limit, 3/I vs 6/I", rel(q, 3.0 / I_inf), rel(q, 6.0 / I_inf)))

    # Limit Hessian curvature: inertia m R^2 vs m R^2 / 2.
    p = point_at(1e5)
    j = jet(p, gp, 4)
    K = hessian_curvature_arrays(j[2].components, j[3].components, j[4].components)
    K_u = transport(CovTensor(K), chart_jacobian(p, gp, "u-omega", metric=j[2].components)).components
    good = limit_hessian_curvature(p, gp).components
    half = limit_hessian_curvature(p, gp, inertia=0.5 * gp.m * gp.R**2).components
    out.append(("limit K, inertia m R^2 vs m R^2 / 2", rel(K_u, good), rel(K_u, half)))

    # Limit du^4 coefficient in (u/2)^4 units: 3 vs 30.
    c = (p.u / 2) ** 4 * K_u[0, 0, 0, 0]
    out.append(("limit K, du^4 coefficient 3 vs 30", rel(c, 3.0), rel(c, 30.0)))
    return out


def main():
    print(f"{'form':<42} {'corrected':>10} {'alternative':>12}")
    for name, good, bad in rows():
        print(f"{name:<42} {good:>10.2e} {bad:>12.2e}")


if __name__ == "__main__":
    main()
