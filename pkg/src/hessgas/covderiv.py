"""Iterated flat covariant derivatives D^n z of the Massieu function.

In the flat chart (beta, r) the covariant derivative is the ordinary
derivative, so D^n z is the array of n-th partial derivatives.  The
rotational part depends on the point only through theta = |r|^2 / beta and a
multivariate Faa di Bruno formula gives

    D^n zeta_rot = sum_j (1/j!) c_j (Sym/n!) sum_k multinom(n; k_1+1, ..., k_j+1)
                   D^{k_1+1} theta (x) ... (x) D^{k_j+1} theta

where k runs over compositions of n - j into j non-negative parts.  The
derivatives of theta have the closed forms

    D theta       = -|omega|^2 dbeta - 2 <omega, dr>
    D^2 theta     = 2 beta <domega | domega>
    D^{l+2} theta = ((-1)^l / beta^(l-1)) dbeta^(.l) . <domega . domega>,  l >= 1

with domega_i = -(dr_i + omega_i dbeta) / beta.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import partition
from .cumulants import CumulantTable, cumulant_table
from .finite_diff import default_steps, fd_partials
from .model import GasParameters, GeneralizedTemperature, from_flat, to_flat
from .tensor import (
    MAX_ORDER,
    CovTensor,
    UnsupportedOrderError,
    VectorValuedForm,
    sym,
    sym_contract,
    sym_power,
    sym_product_array,
)


def _check_order(n: int, low: int = 1) -> None:
    if not isinstance(n, (int, np.integer)) or n < low:
        raise ValueError(f"derivative order must be an integer >= {low}, got {n!r}")
    if n > MAX_ORDER:
        raise UnsupportedOrderError(f"order {n} exceeds {MAX_ORDER}")


# --- building blocks ---------------------------------------------------------


def dbeta() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def domega(p: GeneralizedTemperature) -> VectorValuedForm:
    """so(3)-valued 1-form d omega in the flat chart, shape (4, 3)."""
    comp = np.zeros((4, 3))
    comp[0, :] = -p.omega / p.beta
    comp[1:, :] = -np.eye(3) / p.beta
    return VectorValuedForm(comp, "so3")


def du(p: GeneralizedTemperature) -> np.ndarray:
    """du for u = 2 / sqrt(beta): -beta^(-3/2) dbeta."""
    return -(p.beta**-1.5) * dbeta()


def compositions(total: int, parts: int):
    """Ordered tuples of ``parts`` non-negative integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


@dataclass(frozen=True)
class PartitionSum:
    """Compositions k of n - j into j parts with weights multinom(n; k_1+1, ..., k_j+1)."""

    n: int
    j: int
    terms: tuple  # ((k_1, ..., k_j), weight)

    @property
    def total_weight(self) -> int:
        return sum(w for _, w in self.terms)


@lru_cache(maxsize=None)
def partition_sum(n: int, j: int) -> PartitionSum:
    if not (1 <= j <= n):
        raise ValueError("need 1 <= j <= n")
    terms = []
    for k in compositions(n - j, j):
        w = math.factorial(n)
        for ki in k:
            w //= math.factorial(ki + 1)
        terms.append((k, w))
    return PartitionSum(n, j, tuple(terms))


# --- derivatives of theta ----------------------------------------------------


def theta_derivative(l: int, p: GeneralizedTemperature) -> CovTensor:
    """D^l theta in the flat chart from the closed forms above."""
    _check_order(l)
    b, om = p.beta, p.omega
    if l == 1:
        return CovTensor(np.concatenate([[-(om @ om)], -2.0 * om]))
    dw = domega(p)
    if l == 2:
        return CovTensor(2.0 * b * np.einsum("ai,bi->ab", dw.components, dw.components))
    n = l - 2
    ww = sym_contract(dw, dw).components
    return CovTensor((-1) ** n / b ** (n - 1) * sym_product_array(sym_power(dbeta(), n), ww))


def quadratic_over_beta_partials(A: np.ndarray, x: np.ndarray, order: int) -> np.ndarray:
    """Exact partials of f(beta, r) = r^T A r / beta (A symmetric 3x3) in the flat chart.

    With B_a = d^a(1/beta)/dbeta^a = (-1)^a a! / beta^(a+1), a partial with a
    beta-slots and b r-slots is r^T A r B_a (b = 0), 2 (A r)_i B_a (b = 1),
    2 A_ij B_a (b = 2) and zero for b >= 3.
    """
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    beta, r = x[0], x[1:]
    out = np.zeros((4,) * order)
    Ar = A @ r
    for idx in itertools.product(range(4), repeat=order):
        rs = [i - 1 for i in idx if i > 0]
        a = order - len(rs)
        Ba = (-1) ** a * math.factorial(a) / beta ** (a + 1)
        if len(rs) == 0:
            val = r @ Ar
        elif len(rs) == 1:
            val = 2.0 * Ar[rs[0]]
        elif len(rs) == 2:
            val = 2.0 * A[rs[0], rs[1]]
        else:
            val = 0.0
        out[idx] = val * Ba
    return out


def theta_partials_exact(l: int, p: GeneralizedTemperature) -> np.ndarray:
    """D^l theta from the exact partials of |r|^2 / beta (independent of the closed forms)."""
    return quadratic_over_beta_partials(np.eye(3), to_flat(p), l)


# --- Faa di Bruno --------------------------------------------------------------


def faa_di_bruno(outer: Sequence[float], inner: dict, n: int) -> np.ndarray:
    """n-th derivative of phi(theta(x)) from phi^(j) = outer[j - 1] and D^l theta = inner[l]."""
    _check_order(n)
    total = np.zeros((4,) * n)
    for j in range(1, n + 1):
        ps = partition_sum(n, j)
        acc = np.zeros((4,) * n)
        for k, w in ps.terms:
            t = np.array(1.0)
            for ki in k:
                t = np.multiply.outer(t, inner[ki + 1])
            acc += w * t
        total += outer[j - 1] / math.factorial(j) * sym(acc) / math.factorial(n)
    return total


def d_zeta_int(n: int, beta: float) -> np.ndarray:
    """D^n zeta_int = (3/2)(n-1)! beta^(n/2) du^(x)n = (3/2)(n-1)! (-1)^n beta^(-n) dbeta^(x)n."""
    _check_order(n)
    out = np.zeros((4,) * n)
    out[(0,) * n] = 1.5 * math.factorial(n - 1) * (-1) ** n / beta**n
    return out


def _cumulants(p: GeneralizedTemperature, gp: GasParameters, n: int, table: Optional[CumulantTable]):
    if table is not None and table.order >= n:
        return table.values
    return cumulant_table(p.theta, gp, n).values


def cov_diff_zrot(n: int, p: GeneralizedTemperature, gp: GasParameters, table: Optional[CumulantTable] = None) -> CovTensor:
    _check_order(n)
    c = _cumulants(p, gp, n, table)
    inner = {l: theta_derivative(l, p).components for l in range(1, n + 1)}
    return CovTensor(faa_di_bruno(c, inner, n))


def cov_diff_z(n: int, p: GeneralizedTemperature, gp: GasParameters, table: Optional[CumulantTable] = None) -> CovTensor:
    """D^n z in the flat chart for 1 <= n <= 5."""
    _check_order(n)
    rot = cov_diff_zrot(n, p, gp, table).components
    return CovTensor(rot + d_zeta_int(n, p.beta))


def jet(p: GeneralizedTemperature, gp: GasParameters, nmax: int = 4) -> dict:
    """{n: D^n z} for n = 1..nmax from a single cumulant evaluation."""
    _check_order(nmax)
    table = cumulant_table(p.theta, gp, nmax)
    return {n: cov_diff_z(n, p, gp, table) for n in range(1, nmax + 1)}


# --- hand-written low orders ---------------------------------------------------


def cov_diff_zrot_explicit(n: int, p: GeneralizedTemperature, gp: GasParameters, table: Optional[CumulantTable] = None) -> CovTensor:
    """D^n zeta_rot for n <= 4 written out term by term.

    D zeta   = c1 dtheta
    D^2 zeta = c2 dtheta^2 + c1 beta <dw . dw>
    D^3 zeta = c3 dtheta^3 + c2 beta dtheta . <dw . dw> - c1 dbeta . <dw . dw>
    D^4 zeta = c4 dtheta^4 + c3 beta (dtheta (x) dtheta) . <dw . dw>
               + c2 (2 beta^2 <dw | dw> . <dw | dw> - dbeta . dtheta . <dw . dw>)
               + (c1 / beta) dbeta . dbeta . <dw . dw>
    where dtheta^k is the k-fold tensor power and <dw . dw> = 2 <dw | dw>.
    """
    if n < 1 or n > 4:
        raise UnsupportedOrderError("explicit forms are written for n <= 4")
    c = _cumulants(p, gp, n, table)
    b = p.beta
    dth = theta_derivative(1, p).components
    db = dbeta()
    dw = domega(p)
    ww = sym_contract(dw, dw).components  # <dw . dw>
    wt = 0.5 * ww  # <dw | dw>
    dth2 = np.multiply.outer(dth, dth)
    if n == 1:
        out = c[0] * dth
    elif n == 2:
        out = c[1] * dth2 + c[0] * b * ww
    elif n == 3:
        out = (
            c[2] * np.multiply.outer(dth2, dth)
            + c[1] * b * sym_product_array(dth, ww)
            - c[0] * sym_product_array(db, ww)
        )
    else:
        out = (
            c[3] * np.multiply.outer(dth2, dth2)
            + c[2] * b * sym_product_array(dth2, ww)
            + c[1] * (2.0 * b**2 * sym_product_array(wt, wt) - sym_product_array(sym_product_array(db, dth), ww))
            + c[0] / b * sym_product_array(sym_product_array(db, db), ww)
        )
    return CovTensor(out)


# --- finite-difference oracle ----------------------------------------------------


def fd_oracle(n: int, p: GeneralizedTemperature, gp: GasParameters, steps=None, richardson: int = 1) -> CovTensor:
    """D^n z by nested central differences of z in the flat chart."""
    _check_order(n)
    x = to_flat(p)
    if steps is None:
        steps = default_steps(x, n)

    def z(y):
        q = from_flat(y)
        return partition.massieu(q.beta, q.theta, gp)

    return CovTensor(fd_partials(z, x, n, steps, richardson))


def relative_frobenius(a, b) -> float:
    a = a.components if isinstance(a, CovTensor) else np.asarray(a)
    b = b.components if isinstance(b, CovTensor) else np.asarray(b)
    return float(np.linalg.norm((a - b).ravel()) / np.linalg.norm(b.ravel()))
