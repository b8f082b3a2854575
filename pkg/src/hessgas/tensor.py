"""Symmetric covariant tensors on the 4-dimensional space of generalized temperatures.

Conventions
-----------
* ``Sym`` is the unnormalised symmetriser: the sum over all permutations of
  the slots, without dividing by the number of permutations.
* The symmetric product of a j-form and a k-form is
  ``a . b = Sym(a (x) b) / (j! k!)``.  With this choice ``a . a = 2 a (x) a``
  for a 1-form ``a``, and repeated products of 1-forms are associative.
* The Lie algebra so(3) is identified with R^3 and carries the Euclidean
  inner product, so contracting an so(3)-valued form with an so(3)-valued or
  so(3)*-valued form is a plain sum over the three value components.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

DIM = 4
MAX_ORDER = 5
CHARTS = ("flat", "beta-omega", "u-omega", "beta-M")
VALUE_SPACES = ("scalar", "so3", "so3-dual")


class TensorError(ValueError):
    """Base error for malformed tensors or operations."""


class UnsupportedOrderError(TensorError):
    """Tensor order outside the supported range 0..5."""


class ConventionError(TensorError):
    """An operation expected a symmetric tensor and got a non-symmetric one."""


class ContractionError(TensorError):
    """Slots or value spaces that cannot be contracted."""


class ChartMismatchError(TensorError):
    """Tensors expressed in different charts were combined."""


def _check_chart(chart: str) -> None:
    if chart not in CHARTS:
        raise TensorError(f"unknown chart {chart!r}; expected one of {CHARTS}")


@dataclass(frozen=True, eq=False)
class CovTensor:
    """Covariant tensor of order 0..5 with components in a named chart."""

    components: np.ndarray
    chart: str = "flat"

    def __post_init__(self):
        arr = np.array(self.components, dtype=float)
        if arr.ndim > MAX_ORDER:
            raise UnsupportedOrderError(f"order {arr.ndim} exceeds {MAX_ORDER}")
        if any(n != DIM for n in arr.shape):
            raise TensorError(f"components must have shape {(DIM,) * arr.ndim}, got {arr.shape}")
        _check_chart(self.chart)
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def order(self) -> int:
        return self.components.ndim

    def symmetry_defect(self) -> float:
        """Largest absolute difference between the tensor and its slot permutations."""
        a = self.components
        if a.ndim < 2:
            return 0.0
        return max(
            float(np.max(np.abs(a - np.transpose(a, p))))
            for p in itertools.permutations(range(a.ndim))
        )

    def is_symmetric(self, rtol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.components)))) if self.order else 1.0
        return self.symmetry_defect() <= rtol * scale

    def _same_chart(self, other: "CovTensor") -> None:
        if other.chart != self.chart:
            raise ChartMismatchError(f"{self.chart} vs {other.chart}")

    def __add__(self, other: "CovTensor") -> "CovTensor":
        self._same_chart(other)
        if other.order != self.order:
            raise TensorError("cannot add tensors of different order")
        return CovTensor(self.components + other.components, self.chart)

    def __sub__(self, other: "CovTensor") -> "CovTensor":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "CovTensor":
        return CovTensor(float(scalar) * self.components, self.chart)

    __rmul__ = __mul__

    def __neg__(self) -> "CovTensor":
        return (-1.0) * self

    def __call__(self, *vectors) -> float:
        """Evaluate the multilinear form on ``order`` vectors."""
        if len(vectors) != self.order:
            raise TensorError(f"expected {self.order} vectors, got {len(vectors)}")
        out = self.components
        for v in vectors:
            out = np.tensordot(out, np.asarray(v, dtype=float), axes=(0, 0))
        return float(out)

    def norm(self) -> float:
        return float(np.linalg.norm(self.components.ravel()))


def as_array(t) -> np.ndarray:
    return t.components if isinstance(t, CovTensor) else np.asarray(t, dtype=float)


def sym(a: np.ndarray) -> np.ndarray:
    """Unnormalised symmetrisation of an array over all of its axes."""
    a = np.asarray(a, dtype=float)
    if a.ndim < 2:
        return a.copy()
    out = np.zeros_like(a)
    for p in itertools.permutations(range(a.ndim)):
        out += np.transpose(a, p)
    return out


def symmetrize(t: CovTensor) -> CovTensor:
    """Unnormalised symmetriser ``Sym`` applied to a tensor."""
    return CovTensor(sym(t.components), t.chart)


def outer(a, b) -> np.ndarray:
    return np.multiply.outer(as_array(a), as_array(b))


def sym_product_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``Sym(a (x) b) / (j! k!)`` on raw arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return sym(np.multiply.outer(a, b)) / (math.factorial(a.ndim) * math.factorial(b.ndim))


def sym_product(a: CovTensor, b: CovTensor, *, require_symmetric: bool = True) -> CovTensor:
    """Symmetric product ``a . b`` of two symmetric tensors.

    Raises
    ------
    UnsupportedOrderError
        If the result would exceed order 5.
    ConventionError
        If an input is not symmetric and ``require_symmetric`` is set.
    """
    a._same_chart(b)
    if a.order + b.order > MAX_ORDER:
        raise UnsupportedOrderError(f"product order {a.order + b.order} exceeds {MAX_ORDER}")
    if require_symmetric and not (a.is_symmetric() and b.is_symmetric()):
        raise ConventionError("symmetric product needs symmetric arguments")
    return CovTensor(sym_product_array(a.components, b.components), a.chart)


def sym_power(a, n: int) -> np.ndarray:
    """n-fold symmetric product of a 1-form: n! a (x) ... (x) a."""
    a = as_array(a)
    if a.ndim != 1:
        raise TensorError("sym_power expects a 1-form")
    out = np.array(1.0)
    for _ in range(n):
        out = np.multiply.outer(out, a)
    return math.factorial(n) * out


def contract_metric(t: CovTensor, g_inv, i: int, j: int) -> CovTensor:
    """Contract slots ``i`` and ``j`` of ``t`` with the inverse metric."""
    g_inv = as_array(g_inv)
    if g_inv.shape != (DIM, DIM):
        raise ContractionError("inverse metric must be 4x4")
    n = t.order
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ContractionError(f"cannot contract slots {i}, {j} of an order-{n} tensor")
    letters = "abcdefgh"
    idx = list(letters[:n])
    idx[i] = "y"
    idx[j] = "z"
    rest = "".join(c for k, c in enumerate(letters[:n]) if k not in (i, j))
    subscripts = "".join(idx) + ",yz->" + rest
    return CovTensor(np.einsum(subscripts, t.components, g_inv), t.chart)


def contract_pair(a: CovTensor, b: CovTensor, g_inv, slot_a: int, slot_b: int) -> CovTensor:
    """Contract one slot of ``a`` with one slot of ``b`` through the inverse metric.

    The free slots of ``a`` come first, then those of ``b``.
    """
    a._same_chart(b)
    g_inv = as_array(g_inv)
    if not (0 <= slot_a < a.order and 0 <= slot_b < b.order):
        raise ContractionError("slot out of range")
    if a.order + b.order - 2 > MAX_ORDER:
        raise UnsupportedOrderError("contraction result exceeds order 5")
    ga = np.tensordot(a.components, g_inv, axes=(slot_a, 0))
    # The contracted index of ga now sits last.
    out = np.tensordot(ga, b.components, axes=(ga.ndim - 1, slot_b))
    return CovTensor(out, a.chart)


@dataclass(frozen=True, eq=False)
class VectorValuedForm:
    """A symmetric k-form with values in so(3) or its dual.

    ``components`` has shape ``(4,) * k + (3,)``; the last axis is the value slot.
    """

    components: np.ndarray
    value_space: str = "so3"
    chart: str = "flat"
    base_order: int = field(init=False)

    def __post_init__(self):
        arr = np.array(self.components, dtype=float)
        if arr.ndim < 1 or arr.shape[-1] != 3:
            raise TensorError("value slot must have dimension 3")
        if any(n != DIM for n in arr.shape[:-1]):
            raise TensorError("form slots must have dimension 4")
        if self.value_space not in VALUE_SPACES:
            raise TensorError(f"unknown value space {self.value_space!r}")
        _check_chart(self.chart)
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)
        object.__setattr__(self, "base_order", arr.ndim - 1)


def _check_value_pairing(a: VectorValuedForm, b: VectorValuedForm) -> None:
    if a.chart != b.chart:
        raise ChartMismatchError(f"{a.chart} vs {b.chart}")
    if "scalar" in (a.value_space, b.value_space):
        raise ContractionError("scalar-tagged value slot cannot be contracted with an so(3) slot")


def tensor_contract(a: VectorValuedForm, b: VectorValuedForm) -> CovTensor:
    """``<a | b>``: tensor product of the form parts, value slots contracted."""
    _check_value_pairing(a, b)
    if a.base_order + b.base_order > MAX_ORDER:
        raise UnsupportedOrderError("contraction result exceeds order 5")
    out = np.tensordot(a.components, b.components, axes=0)
    # Bring the two value axes together and trace them.
    out = np.trace(out, axis1=a.base_order, axis2=a.base_order + 1 + b.base_order)
    return CovTensor(out, a.chart)


def sym_contract(a: VectorValuedForm, b: VectorValuedForm) -> CovTensor:
    """``<a . b>``: symmetric product of the form parts, value slots contracted.

    For an so(3)-valued 1-form ``w``, ``<w . w> = 2 <w | w>``.
    """
    t = tensor_contract(a, b).components
    return CovTensor(sym(t) / (math.factorial(a.base_order) * math.factorial(b.base_order)), a.chart)
