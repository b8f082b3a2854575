"""Cumulants of the radial observable and their moment-polynomial representation.

The cumulants ``c_n = d^n zeta_rot / d theta^n`` are the cumulants of
``iota = m rho^2 / 2`` under the tilted law.  Two routes compute them:

* the production route takes central moments by quadrature and converts them
  with a truncated power-series logarithm;
* the symbolic route builds polynomials ``f_n`` in ``X = iota`` and the raw
  moments ``mu_j`` through ``f_1 = X``, ``f_2 = (X - mu_1)^2`` and
  ``f_{n+1} = (X - mu_1) f_n + d f_n / d theta`` with
  ``d mu_j / d theta = mu_{j+1} - mu_j mu_1``, and takes expectations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import partition


class SeriesError(ValueError):
    """Invalid operation on a truncated power series."""


@dataclass(frozen=True)
class PowerSeries:
    """Truncated power series sum_k coeffs[k] t^k, known through degree len(coeffs) - 1."""

    coeffs: tuple

    def __init__(self, coeffs: Sequence):
        object.__setattr__(self, "coeffs", tuple(coeffs))
        if not self.coeffs:
            raise SeriesError("a power series needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k]

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(self.coeffs[: order + 1])

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order)
        return PowerSeries([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])])

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order)
        return PowerSeries([a - b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])])

    def __mul__(self, other) -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return PowerSeries([other * a for a in self.coeffs])
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        return PowerSeries([sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n + 1)])

    __rmul__ = __mul__

    def exp(self) -> "PowerSeries":
        """exp of a series with zero constant term: n e_n = sum_k k b_k e_{n-k}."""
        b = self.coeffs
        if b[0] != 0:
            raise SeriesError("exp needs a zero constant term")
        one = b[0] + 1  # keeps Fraction inputs exact
        e = [one]
        for n in range(1, self.order + 1):
            e.append(sum(k * b[k] * e[n - k] for k in range(1, n + 1)) / n)
        return PowerSeries(e)

    def log(self) -> "PowerSeries":
        """log of a series with constant term 1: n b_n = n a_n - sum_k k b_k a_{n-k}."""
        a = self.coeffs
        if a[0] != 1:
            raise SeriesError("log needs constant term 1")
        b = [a[0] - 1]
        for n in range(1, self.order + 1):
            b.append((n * a[n] - sum(k * b[k] * a[n - k] for k in range(1, n))) / n)
        return PowerSeries(b)


def moments_to_series(moments: Sequence) -> PowerSeries:
    """Moment generating series sum_k m_k t^k / k! from m_0 = 1, m_1, ..."""
    return PowerSeries([m / math.factorial(k) for k, m in enumerate(moments)])


def series_to_moments(s: PowerSeries) -> list:
    return [c * math.factorial(k) for k, c in enumerate(s.coeffs)]


@dataclass(frozen=True)
class CumulantTable:
    """Cumulants c_1..c_n at one value of theta (``theta`` is None when not tied to the gas)."""

    theta: Optional[float]
    values: np.ndarray  # values[k] = c_{k+1}
    errors: np.ndarray

    def __getitem__(self, n: int) -> float:
        """c_n, one-based."""
        if n < 1 or n > len(self.values):
            raise IndexError(f"cumulant c_{n} not in table")
        return float(self.values[n - 1])

    @property
    def order(self) -> int:
        return len(self.values)


def cumulants_from_moments(raw: Sequence[float]) -> CumulantTable:
    """Cumulants from raw moments m_0 = 1, m_1, ..., m_n via the series logarithm."""
    raw = list(raw)
    if not raw or abs(raw[0] - 1) > 1e-12:
        raise SeriesError("raw moments must start with m_0 = 1")
    raw[0] = 1
    k = series_to_moments(moments_to_series(raw).log())[1:]
    vals = np.array([float(v) for v in k])
    return CumulantTable(None, vals, np.zeros_like(vals))


def cumulants_from_central(mean: float, central: Sequence[float]) -> np.ndarray:
    """Cumulants c_1..c_n from the mean and central moments mu_0 = 1, mu_1 = 0, mu_2, ..."""
    central = list(central)
    central[0] = 1
    central[1] = 0
    k = series_to_moments(moments_to_series(central).log())
    k[1] = mean
    return np.array([float(v) for v in k[1:]])


def cumulant_table(theta: float, gp, n: int, rtol: float = 1e-14) -> CumulantTable:
    """c_1..c_n of iota at theta by quadrature central moments."""
    if n < 1:
        raise ValueError("n must be at least 1")
    cm = partition.iota_central_moments(theta, gp, max(n, 2), rtol)
    mean = partition.iota_mean(theta, gp, rtol)
    vals = cumulants_from_central(mean, cm[: n + 1] if n >= 2 else cm[:3])[:n]
    # Each central moment carries roughly rtol relative error against its L1 size.
    scale = np.array([abs(mean)] + [math.factorial(k) * max(cm[2], 1e-300) ** (k / 2) for k in range(2, n + 1)])
    return CumulantTable(float(theta), vals, 10 * rtol * scale[:n])


# --- symbolic f_n ------------------------------------------------------------

Monomial = tuple  # (power of X, sorted tuple of moment indices)


class MomentPolynomial:
    """Polynomial in X with coefficients that are polynomials in the raw moments mu_j.

    Terms are stored as ``{(xpow, (j1, j2, ...)): Fraction}`` where the tuple
    lists moment indices with repetition, so ``(2, (1, 1, 3))`` is
    ``X^2 mu_1^2 mu_3``.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def x(cls) -> "MomentPolynomial":
        return cls({(1, ()): 1})

    @classmethod
    def mu(cls, j: int) -> "MomentPolynomial":
        return cls({(0, (j,)): 1})

    @classmethod
    def const(cls, c) -> "MomentPolynomial":
        return cls({(0, ()): c})

    def __add__(self, other: "MomentPolynomial") -> "MomentPolynomial":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return MomentPolynomial(out)

    def __neg__(self):
        return MomentPolynomial({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "MomentPolynomial") -> "MomentPolynomial":
        if not isinstance(other, MomentPolynomial):
            return MomentPolynomial({k: v * other for k, v in self.terms.items()})
        out: dict = {}
        for (xa, ma), va in self.terms.items():
            for (xb, mb), vb in other.terms.items():
                key = (xa + xb, tuple(sorted(ma + mb)))
                out[key] = out.get(key, 0) + va * vb
        return MomentPolynomial(out)

    __rmul__ = __mul__

    def d_theta(self) -> "MomentPolynomial":
        """Derivative in theta: X is constant, d mu_j = mu_{j+1} - mu_j mu_1."""
        out: dict = {}
        for (xp, mono), v in self.terms.items():
            for pos, j in enumerate(mono):
                rest = mono[:pos] + mono[pos + 1 :]
                k1 = (xp, tuple(sorted(rest + (j + 1,))))
                k2 = (xp, tuple(sorted(rest + (j, 1))))
                out[k1] = out.get(k1, 0) + v
                out[k2] = out.get(k2, 0) - v
        return MomentPolynomial(out)

    def expectation(self, moments: Sequence[float]) -> float:
        """E[poly] where X^a -> mu_a; ``moments[k]`` is the k-th moment, moments[0] = 1."""
        total = 0.0
        for (xp, mono), v in self.terms.items():
            term = float(v) * moments[xp]
            for j in mono:
                term *= moments[j]
            total += term
        return total

    def max_moment(self) -> int:
        """Largest moment index needed by ``expectation``."""
        return max((max((xp,) + mono) for (xp, mono) in self.terms), default=0)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"MomentPolynomial({len(self.terms)} terms)"


@lru_cache(maxsize=None)
def f_polynomial(n: int) -> MomentPolynomial:
    """The polynomial f_n with E[f_n] = c_n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    x = MomentPolynomial.x()
    xhat = x - MomentPolynomial.mu(1)
    if n == 1:
        return x
    f = xhat * xhat
    for _ in range(2, n):
        f = xhat * f + f.d_theta()
    return f


def fn_expected(theta: float, gp, n: int, central: bool = True) -> float:
    """E[f_n] at theta.

    With ``central`` set, the moments of iota - E[iota] are used for n >= 2;
    this is exact because f_n is built from X - mu_1 and its theta-derivatives,
    and avoids the cancellation between large raw moments at high theta.
    """
    poly = f_polynomial(n)
    kmax = max(poly.max_moment(), 2)
    if n == 1:
        return partition.iota_mean(theta, gp)
    if central:
        mom = partition.iota_central_moments(theta, gp, kmax)
    else:
        mom = partition.iota_raw_moments(theta, gp, kmax)
    return poly.expectation(mom)


def cumulant_limit(n: int) -> float:
    """Limit of theta^n c_n for n >= 2: (-1)^n (3/2) (n - 1)!."""
    if n < 2:
        raise ValueError("the limit is stated for n >= 2")
    return (-1) ** n * 1.5 * math.factorial(n - 1)


def moment_limit_constant(k: int) -> Fraction:
    """Limit of theta^k E[(iota - E iota)^k] as theta grows.

    In the limit theta * iota_hat tends in law to 3/2 - G with G ~ Gamma(3/2, 1),
    so the limit is sum_p C(k, p) E[G^p] (-1)^p (3/2)^(k-p).
    """
    total = Fraction(0)
    for p in range(k + 1):
        gp_moment = Fraction(1)
        for j in range(p):
            gp_moment *= Fraction(3, 2) + j
        total += math.comb(k, p) * gp_moment * (-1) ** p * Fraction(3, 2) ** (k - p)
    return total
