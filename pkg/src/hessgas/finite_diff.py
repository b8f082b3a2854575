"""Nested central finite differences with Richardson extrapolation.

Used only as an independent oracle for analytic derivatives.
"""

from __future__ import annotations

import itertools
import math
import warnings
from typing import Callable, Sequence

import numpy as np


class StepAdjustmentWarning(UserWarning):
    """A finite-difference step was shrunk to keep the stencil inside the domain."""


def default_steps(x: np.ndarray, n: int, rel: float = 1e-2) -> np.ndarray:
    """Steps for flat coordinates (beta, r): h_beta ~ beta, h_r ~ max(1, |r|)."""
    x = np.asarray(x, dtype=float)
    floor = np.finfo(float).eps ** (1.0 / (n + 2))
    hb = max(rel * x[0], floor * x[0])
    hr = max(rel * max(1.0, float(np.linalg.norm(x[1:]))), floor)
    return np.array([hb] + [hr] * (len(x) - 1))


def _stencil(fn, x, idx, h, cache):
    n = len(idx)
    total = None
    for signs in itertools.product((1, -1), repeat=n):
        y = x.copy()
        for s, i in zip(signs, idx):
            y[i] += s * h[i]
        key = y.tobytes()
        if key not in cache:
            cache[key] = np.asarray(fn(y), dtype=float)
        term = math.prod(signs) * cache[key]
        total = term if total is None else total + term
    return total / math.prod(2.0 * h[i] for i in idx)


def fd_partials(
    fn: Callable[[np.ndarray], np.ndarray],
    x: Sequence[float],
    n: int,
    steps: Sequence[float],
    richardson: int = 1,
    positive_first: bool = True,
) -> np.ndarray:
    """All n-th order partial derivatives of ``fn`` at ``x``.

    Returns an array of shape ``(d,) * n + shape(fn(x))``.  Each distinct
    multi-index is evaluated once with nested central differences and the
    result is copied to its permutations.  ``richardson`` levels of step
    halving remove the leading even powers of the step.  With
    ``positive_first`` the first coordinate is kept positive by shrinking its
    step if needed.
    """
    x = np.asarray(x, dtype=float)
    h = np.array(steps, dtype=float)
    d = len(x)
    if positive_first and n * h[0] >= 0.5 * x[0]:
        h[0] = 0.5 * x[0] / (n + 1)
        warnings.warn("beta step shrunk to stay inside the domain", StepAdjustmentWarning, stacklevel=2)
    cache: dict = {}
    out = None
    for idx in itertools.combinations_with_replacement(range(d), n):
        levels = [_stencil(fn, x, idx, h / 2**k, cache) for k in range(richardson + 1)]
        # Richardson table for an error series in h^2, h^4, ...
        for lvl in range(1, richardson + 1):
            f = 4.0**lvl
            levels = [(f * levels[k + 1] - levels[k]) / (f - 1.0) for k in range(len(levels) - 1)]
        val = levels[0]
        if out is None:
            out = np.zeros((d,) * n + np.shape(val))
        for perm in set(itertools.permutations(idx)):
            out[perm] = val
    return out
