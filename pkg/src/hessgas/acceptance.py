"""Acceptance suite: fourteen numbered checks shared by the CLI and the tests.

Each check returns a CriterionResult with the worst observed error, the
tolerance it was held to and its wall-clock time.  A check passes when the
error is within tolerance, any side condition (monotone decay) holds and the
runtime is within its budget.  Checks with several tolerances report the
largest error-to-tolerance ratio against a tolerance of 1.
``tolerance_scale`` multiplies every tolerance (0.1 tightens by ten).
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import asymptotics, partition, poisson
from .covderiv import cov_diff_z, cov_diff_zrot, cov_diff_zrot_explicit, fd_oracle, relative_frobenius
from .cumulants import PowerSeries, cumulant_table, fn_expected, moments_to_series, series_to_moments
from .curvature import beta_m_blocks, hessian_sectional, metric, riemann_christoffel, sample_planes, sectional
from .model import GasParameters, GeneralizedTemperature, massieu, momenta
from .rigidbody import RigidBodyParams, rb_dual_curvature, rb_metric, rb_momenta

MODULES = ("rigidbody", "partition", "covderiv", "cumulants", "model", "curvature", "asymptotics", "poisson")


@dataclass
class CriterionResult:
    id: int
    name: str
    module: str
    passed: bool
    error: float
    tolerance: float
    runtime: float
    budget: float
    details: dict = field(default_factory=dict)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] {self.id:2d} {self.name}: error {self.error:.3e} (tol {self.tolerance:.1e}), "
            f"{self.runtime:.2f}s (budget {self.budget:g}s)"
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class _Criterion:
    id: int
    name: str
    module: str
    budget: float
    fn: Callable


_REGISTRY: list = []


def _criterion(id: int, name: str, module: str, budget: float):
    def wrap(fn):
        _REGISTRY.append(_Criterion(id, name, module, budget, fn))
        return fn

    return wrap


def _random_points(rng, n, theta_range=(1e-2, 1e2), beta_range=(0.5, 2.0)):
    pts = []
    for _ in range(n):
        beta = rng.uniform(*beta_range)
        theta = 10.0 ** rng.uniform(*np.log10(theta_range))
        axis = rng.standard_normal(3)
        axis /= np.linalg.norm(axis)
        pts.append(GeneralizedTemperature(beta, math.sqrt(theta / beta) * axis))
    return pts


# A fixed symmetric positive-definite, non-spherical inertia tensor.
NON_SPHERICAL_INERTIA = np.array([[2.0, 0.3, -0.1], [0.3, 1.0, 0.2], [-0.1, 0.2, 0.6]])


# --- rigid body ----------------------------------------------------------------


@_criterion(1, "rigid-body hyperbolicity", "rigidbody", 5.0)
def _rigid_hyperbolic(rng, scale):
    tol = 1e-8 * scale
    worst = 0.0
    for C in (0.5, 1.5, 3.0):
        for inertia in (1.3, NON_SPHERICAL_INERTIA):
            params = RigidBodyParams(C, inertia)
            for _ in range(20):
                beta = rng.uniform(0.5, 2.0)
                omega = rng.standard_normal(3)
                y = np.concatenate([[beta], omega])

                def g_fn(y, params=params):
                    return rb_metric(params, GeneralizedTemperature(y[0], y[1:]), "beta-omega").components

                steps = np.array([0.05 * beta, 0.05, 0.05, 0.05])
                riem = riemann_christoffel(g_fn, y, steps, richardson=2)
                g = g_fn(y)
                for u, v in sample_planes(rng, 4):
                    worst = max(worst, abs(sectional(riem, g, u, v) + 1.0 / (4.0 * C)))
    return worst, tol, {"points_per_body": 20, "heat_capacities": [0.5, 1.5, 3.0]}


@_criterion(2, "dual Hessian constancy", "rigidbody", 5.0)
def _dual_constancy(rng, scale):
    tol = 1e-8 * scale
    worst = 0.0
    for C in (0.5, 1.5, 3.0):
        for inertia in (1.3, NON_SPHERICAL_INERTIA):
            params = RigidBodyParams(C, inertia)
            for _ in range(10):
                p = GeneralizedTemperature(rng.uniform(0.5, 2.0), rng.standard_normal(3))
                E, M = rb_momenta(params, p)
                g, K = rb_dual_curvature(params, E, M)
                for _ in range(5):
                    a = rng.standard_normal((4, 4))
                    h = a + a.T
                    worst = max(worst, abs(hessian_sectional(K, g, h) - 1.0 / C) * C)
    return worst, tol, {"measure": "relative to 1/C"}


# --- partition function ----------------------------------------------------------


@_criterion(3, "partition cross-validation", "partition", 5.0)
def _partition_paths(rng, scale):
    tol = 1e-10 * scale
    worst = 0.0
    gp = GasParameters()
    for th in np.logspace(-3, 5, 30):
        vals = [partition.zeta_rot(th, gp, method=m) for m in partition.ZROT_METHODS]
        ref = vals[0]
        for v in vals[1:]:
            worst = max(worst, abs(v - ref) / abs(ref))
    return worst, tol, {"methods": list(partition.ZROT_METHODS), "theta_points": 30}


def _uniform_ball_inertia(m: float, R: float) -> float:
    """2 E[m rho^2 / 2] for the uniform ball, by radial Gauss-Legendre quadrature."""
    x, w = np.polynomial.legendre.leggauss(8)
    r = 0.5 * R * (x + 1.0)
    mean_r2 = np.sum(w * r**4) / np.sum(w * r**2)
    # E[x^2 + y^2] = (2/3) E[|q|^2] by isotropy
    return m * (2.0 / 3.0) * mean_r2


@_criterion(4, "zero-rotation inertia", "partition", 2.0)
def _rest_inertia(rng, scale):
    tol = 1e-10 * scale
    worst = 0.0
    for m, R in ((1.0, 1.0), (2.0, 0.5), (0.3, 3.0)):
        gp = GasParameters(m, R)
        oracle = _uniform_ball_inertia(m, R)
        worst = max(worst, abs(partition.inertia(0.0, gp) - oracle) / oracle)
    return worst, tol, {}


# --- covariant derivatives ----------------------------------------------------------


@_criterion(5, "Faa di Bruno vs finite differences", "covderiv", 60.0)
def _fdb_vs_fd(rng, scale):
    gp = GasParameters()
    tols = {2: 1e-5 * scale, 3: 1e-5 * scale, 4: 1e-3 * scale}
    sym_tol = 1e-12 * scale
    ratios, worst = [], {n: 0.0 for n in tols}
    worst_sym = 0.0
    for p in _random_points(rng, 10):
        for n, tol in tols.items():
            d = cov_diff_z(n, p, gp)
            worst_sym = max(worst_sym, d.symmetry_defect())
            err = relative_frobenius(d, fd_oracle(n, p, gp))
            worst[n] = max(worst[n], err)
            ratios.append(err / tol)
    ratio = max(max(ratios), worst_sym / sym_tol)
    details = {f"max_rel_frobenius_n{n}": v for n, v in worst.items()}
    details["max_symmetry_defect"] = worst_sym
    return ratio, 1.0, details


@_criterion(6, "order-4 closed forms", "covderiv", 5.0)
def _closed_forms(rng, scale):
    tol = 1e-10 * scale
    gp = GasParameters()
    worst = 0.0
    for p in _random_points(rng, 10, theta_range=(1e-3, 1e4)):
        table = cumulant_table(p.theta, gp, 4)
        for n in range(1, 5):
            a = cov_diff_zrot(n, p, gp, table)
            b = cov_diff_zrot_explicit(n, p, gp, table)
            worst = max(worst, relative_frobenius(a, b))
    return worst, tol, {}


# --- cumulants -------------------------------------------------------------------


@_criterion(7, "moment-cumulant duality", "cumulants", 10.0)
def _duality(rng, scale):
    tol_series, tol_fn = 1e-12 * scale, 1e-9 * scale
    worst_series = 0.0
    gp = GasParameters()
    # Moment sequences of actual laws: random discrete laws on [0, 1] and the
    # radial observable of the gas; random cumulant series for the other direction.
    sequences = []
    for _ in range(20):
        x, w = rng.uniform(0.0, 1.0, 5), rng.dirichlet(np.ones(5))
        sequences.append([1.0] + [float(w @ x**j) for j in range(1, 9)])
    for th in (0.0, 1.0, 10.0, 1e3):
        sequences.append([1.0] + list(partition.iota_raw_moments(th, gp, 8)[1:]))
    for raw in sequences:
        back = series_to_moments(moments_to_series(raw).log().exp())
        worst_series = max(worst_series, max(abs(a - b) / abs(b) for a, b in zip(back, raw)))
    for _ in range(20):
        kappa = PowerSeries([0.0] + list(rng.standard_normal(8)))
        again = kappa.exp().log()
        worst_series = max(worst_series, max(abs(again[k] - kappa[k]) / max(1.0, abs(kappa[k])) for k in range(1, 9)))
    worst_fn = 0.0
    for th in (0.0, 1.0, 10.0, 1e3):
        table = cumulant_table(th, gp, 6)
        for n in range(1, 7):
            worst_fn = max(worst_fn, abs(fn_expected(th, gp, n) - table[n]) / abs(table[n]))
    ratio = max(worst_series / tol_series, worst_fn / tol_fn)
    return ratio, 1.0, {"series_round_trip": worst_series, "fn_vs_cn": worst_fn}


# --- model -------------------------------------------------------------------------


@_criterion(8, "scaling law", "model", 2.0)
def _scaling(rng, scale):
    tol = 1e-10 * scale
    gp = GasParameters()
    worst = 0.0
    for p in _random_points(rng, 10, theta_range=(1e-3, 1e3)):
        for eta in (0.5, 2.0, 10.0):
            lhs = massieu(GeneralizedTemperature(p.beta, eta * p.omega), gp)
            rhs = 3.0 * math.log(eta) + massieu(GeneralizedTemperature(eta**2 * p.beta, p.omega), gp)
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst, tol, {}


# --- curvature -------------------------------------------------------------------


@_criterion(9, "mixed-coordinate block diagonality", "curvature", 5.0)
def _beta_m(rng, scale):
    """Cross block, the beta-beta entry and the M-M block against the isotropic closed form."""
    tol = 1e-9 * scale
    gp = GasParameters()
    cross = bb = mm = mm_corrected = 0.0
    for p in _random_points(rng, 10, theta_range=(1e-2, 1e3)):
        g = metric(p, gp, "beta-M").components
        blocks = beta_m_blocks(p, gp)
        scale_mm = np.linalg.norm(g[1:, 1:])
        cross = max(cross, np.max(np.abs(g[0, 1:])) / math.sqrt(abs(g[0, 0]) * scale_mm))
        bb = max(bb, abs(g[0, 0] - blocks["beta_beta"]) / abs(blocks["beta_beta"]))
        mm = max(mm, np.linalg.norm(g[1:, 1:] - blocks["isotropic_MM"]) / scale_mm)
        mm_corrected = max(mm_corrected, np.linalg.norm(g[1:, 1:] - blocks["MM"]) / scale_mm)
    worst = max(cross, bb, mm)
    return worst, tol, {
        "cross_block": cross,
        "beta_beta": bb,
        "MM_isotropic": mm,
        "MM_split_along_and_across_omega": mm_corrected,
    }


# --- asymptotics ------------------------------------------------------------------


_LIMIT_TOLERANCES = {
    "cumulant_2": 0.05,
    "cumulant_3": 0.05,
    "inertia": 0.001,
    "norm_du": 0.05,
    "norm_domega": 0.05,
    "heat_capacity": 0.05,
}


@_criterion(10, "asymptotic limits", "asymptotics", 60.0)
def _limits(rng, scale):
    gp = GasParameters()
    suite = asymptotics.limit_suite(gp, (1e2, 1e3, 1e4))
    ratio = 0.0
    details = {}
    for name, tol in _LIMIT_TOLERANCES.items():
        r = suite[name]
        ok_monotone = r.monotone
        details[name] = {
            "value": float(r.values[-1]),
            "limit": r.limit,
            "rel_error": r.final_error,
            "monotone": ok_monotone,
        }
        ratio = max(ratio, r.final_error / (tol * scale))
    monotone = all(d["monotone"] for d in details.values())
    return ratio, 1.0, details, monotone


@_criterion(11, "curvature limit", "asymptotics", 60.0)
def _curvature_limit(rng, scale):
    gp = GasParameters()
    tol = 0.05 * scale
    grid = (1e0, 1e1, 1e2, 1e3, 1e4)
    devs = [asymptotics.limit_quantities(th, gp, seed=int(rng.integers(2**31)))["kn_deviation"] for th in grid[:-1]]
    last = asymptotics.limit_quantities(grid[-1], gp, seed=int(rng.integers(2**31)))
    devs.append(last["kn_deviation"])
    secs = last["sectional_samples"]
    sec_err = float(np.max(np.abs(secs * 12.0 + 1.0)))
    decreasing = bool(np.all(np.diff(devs) < 0))
    worst = max(sec_err, devs[-1])
    details = {"sectional_rel_error": sec_err, "kn_deviation": devs, "decreasing": decreasing, "planes": len(secs)}
    return worst, tol, details, decreasing


@_criterion(12, "weak limit", "asymptotics", 10.0)
def _weak_limit(rng, scale):
    tol = 0.01 * scale
    gp = GasParameters()
    theta = 1e4
    axis = rng.standard_normal(3)
    axis /= np.linalg.norm(axis)
    omega = math.sqrt(theta) * axis
    tests = {
        "1": lambda q: np.ones(q.shape[:-1]),
        "rho^2": lambda q: np.sum(q * q, axis=-1) - (q @ axis) ** 2,
        "y^2": lambda q: (q @ axis) ** 2,
        "q_x^2": lambda q: q[..., 0] ** 2,
    }
    details, worst = {}, 0.0
    for name, fq in tests.items():
        f = asymptotics.cartesian_test_function(fq, omega)
        v = asymptotics.weak_limit_integral(f, 1.0, omega, gp)
        c = asymptotics.circle_average(f, gp)
        err = abs(v - c) / gp.R**2
        details[name] = {"integral": v, "circle_average": c}
        worst = max(worst, err)
    return worst, tol, details


@_criterion(13, "Watson lemma", "asymptotics", 2.0)
def _watson(rng, scale):
    tol = 0.005 * scale
    cases = {
        "F=1, alpha=0": (lambda x: np.ones_like(x), 0.0),
        "F=1, alpha=1/2": (lambda x: np.ones_like(x), 0.5),
        "F=x, alpha=1/2": (lambda x: np.asarray(x, dtype=float), 0.5),
    }
    details, worst = {}, 0.0
    for name, (F, alpha) in cases.items():
        r = asymptotics.watson_first_order(F, alpha, 1.0, (1e2, 1e3, 1e4))
        details[name] = r.final_error
        worst = max(worst, r.final_error)
    return worst, tol, details


# --- Poisson -------------------------------------------------------------------------


def _quadratic_observable(rng) -> poisson.ObservableFn:
    a = rng.standard_normal(4)
    B = rng.standard_normal((4, 4))
    B = B + B.T
    return poisson.ObservableFn(lambda x: a @ x + 0.5 * x @ B @ x, lambda x: a + B @ x, "quadratic")


def _omega_observable(i: int) -> poisson.ObservableFn:
    return poisson.ObservableFn(
        lambda x: -x[1 + i] / x[0],
        lambda x: np.concatenate([[x[1 + i] / x[0] ** 2], -np.eye(3)[i] / x[0]]),
        f"omega_{i}",
    )


@_criterion(14, "Poisson algebra", "poisson", 10.0)
def _poisson(rng, scale):
    tol = 1e-6 * scale
    gp = GasParameters()
    casimirs = [
        (lambda b, s: b * s, lambda b, s: (s, b)),
        (lambda b, s: math.exp(-s) + b**2, lambda b, s: (2.0 * b, -math.exp(-s))),
        (lambda b, s: s**2, lambda b, s: (0.0, 2.0 * s)),
    ]
    anti = leib = alg = cas = leaf = 0.0
    for p in _random_points(rng, 5, theta_range=(1e-2, 1e2)):
        g = cov_diff_z(2, p, gp).components
        obs = [_quadratic_observable(rng) for _ in range(20)]
        for f1, f2, f3 in zip(obs[0::3], obs[1::3], obs[2::3]):
            b12 = poisson.bracket(f1, f2, p, gp, g)
            anti = max(anti, abs(b12 + poisson.bracket(f2, f1, p, gp, g)))
            x = p.flat()
            lhs = poisson.bracket(f1, f2 * f3, p, gp, g)
            rhs = b12 * f3(x) + f2(x) * poisson.bracket(f1, f3, p, gp, g)
            leib = max(leib, abs(lhs - rhs))
        Mx, My, Mz = (poisson.momentum_component(i, gp) for i in range(3))
        M = momenta(p, gp)[1]
        alg = max(alg, abs(poisson.bracket(Mx, My, p, gp, g) - M[2]))
        for phi, dphi in casimirs:
            c = poisson.casimir(phi, dphi, gp)
            for f in obs:
                cas = max(cas, abs(poisson.bracket(c, f, p, gp, g)))
        # {omega_x, omega_y} = (1 / I) omega_z on the leaf through p
        b = poisson.bracket(_omega_observable(0), _omega_observable(1), p, gp, g)
        leaf = max(leaf, abs(b - poisson.leaf_factor(p, gp) * p.omega[2]))
    worst = max(anti, leib, alg, cas, leaf)
    return worst, tol, {"antisymmetry": anti, "leibniz": leib, "Mx_My_Mz": alg, "casimir": cas, "leaf_factor": leaf}


# --- driver ----------------------------------------------------------------------


def criteria() -> list:
    return sorted(_REGISTRY, key=lambda c: c.id)


def run_criterion(c: _Criterion, tolerance_scale: float = 1.0, seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng([seed, c.id])
    t0 = time.perf_counter()
    out = c.fn(rng, tolerance_scale)
    runtime = time.perf_counter() - t0
    error, tol, details = out[:3]
    conditions_hold = out[3] if len(out) > 3 else True
    error = float(error)
    passed = bool(error <= tol and conditions_hold and runtime <= c.budget)
    return CriterionResult(c.id, c.name, c.module, passed, error, float(tol), runtime, c.budget, details)


def run_all(only: Optional[Sequence[str]] = None, tolerance_scale: float = 1.0, seed: int = 0) -> list:
    if isinstance(only, str):
        only = [only]
    if only is not None:
        unknown = set(only) - set(MODULES)
        if unknown:
            raise ValueError(f"unknown module(s) {sorted(unknown)}; expected some of {MODULES}")
    if not tolerance_scale > 0:
        raise ValueError("tolerance scale must be positive")
    return [
        run_criterion(c, tolerance_scale, seed)
        for c in criteria()
        if only is None or c.module in only
    ]
