"""Dense arithmetic in the truncated tensor algebra T^N(R^d).

A :class:`TruncatedTensor` stores one contiguous float64 array per level.
Level ``k`` holds ``d**k`` coefficients in row-major multi-index order, so the
word ``(z_1, ..., z_k)`` (1-based letters) lives at offset
``sum((z_c - 1) * d**(k - c))``.  Level 0 is a length-1 array and is kept
explicitly: signatures carry a 1 there, log-signatures a 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "TruncatedTensor",
    "ContractError",
    "unit",
    "zero",
    "tensor_add",
    "tensor_scale",
    "tensor_mul",
    "tensor_exp",
    "tensor_log",
    "level_index",
]


class ContractError(ValueError):
    """Raised when an operation's preconditions are violated."""


@dataclass(frozen=True, eq=False)
class TruncatedTensor:
    dim: int
    order: int
    levels: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.dim < 1 or self.order < 1:
            raise ContractError(f"invalid dim/order ({self.dim}, {self.order})")
        if len(self.levels) != self.order + 1:
            raise ContractError(
                f"expected {self.order + 1} levels, got {len(self.levels)}")
        frozen = []
        for k, lvl in enumerate(self.levels):
            arr = np.array(lvl, dtype=np.float64).reshape(-1)
            if arr.size != self.dim ** k:
                raise ContractError(
                    f"level {k} must hold {self.dim ** k} coefficients, got {arr.size}")
            arr.flags.writeable = False
            frozen.append(arr)
        object.__setattr__(self, "levels", tuple(frozen))

    @property
    def scalar(self) -> float:
        return float(self.levels[0][0])

    def level(self, k: int, shaped: bool = False) -> np.ndarray:
        """Level ``k`` coefficients, optionally reshaped to ``(d,) * k``."""
        arr = self.levels[k]
        return arr.reshape((self.dim,) * k) if shaped else arr

    def __getitem__(self, word: Sequence[int]) -> float:
        """Coefficient of a word given as 1-based letters, e.g. ``t[1, 2]``."""
        if isinstance(word, int):
            word = (word,)
        return float(self.levels[len(word)][level_index(word, self.dim)])

    def allclose(self, other: "TruncatedTensor", atol: float = 1e-12,
                 rtol: float = 0.0) -> bool:
        _check_compatible(self, other)
        return all(np.allclose(a, b, atol=atol, rtol=rtol)
                   for a, b in zip(self.levels, other.levels))

    def max_abs_diff(self, other: "TruncatedTensor") -> float:
        _check_compatible(self, other)
        return max(float(np.max(np.abs(a - b)))
                   for a, b in zip(self.levels, other.levels))

    def __add__(self, other):
        return tensor_add(self, other)

    def __sub__(self, other):
        return tensor_add(self, tensor_scale(other, -1.0))

    def __neg__(self):
        return tensor_scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, TruncatedTensor):
            return tensor_mul(self, other)
        return tensor_scale(self, float(other))

    def __rmul__(self, c):
        return tensor_scale(self, float(c))

    def __repr__(self):
        return f"TruncatedTensor(dim={self.dim}, order={self.order}, scalar={self.scalar:g})"


def level_index(word: Sequence[int], dim: int) -> int:
    """Row-major offset of a 1-based word inside its level."""
    offset = 0
    for z in word:
        if not 1 <= z <= dim:
            raise ContractError(f"letter {z} outside 1..{dim}")
        offset = offset * dim + (z - 1)
    return offset


def unit(dim: int, order: int) -> TruncatedTensor:
    levels = [np.ones(1)] + [np.zeros(dim ** k) for k in range(1, order + 1)]
    return TruncatedTensor(dim, order, tuple(levels))


def zero(dim: int, order: int) -> TruncatedTensor:
    return TruncatedTensor(dim, order, tuple(np.zeros(dim ** k) for k in range(order + 1)))


def _check_compatible(a: TruncatedTensor, b: TruncatedTensor):
    if a.dim != b.dim or a.order != b.order:
        raise ContractError(
            f"incompatible tensors: (dim={a.dim}, order={a.order}) vs "
            f"(dim={b.dim}, order={b.order})")


def tensor_add(a: TruncatedTensor, b: TruncatedTensor) -> TruncatedTensor:
    _check_compatible(a, b)
    return TruncatedTensor(a.dim, a.order, tuple(x + y for x, y in zip(a.levels, b.levels)))


def tensor_scale(a: TruncatedTensor, c: float) -> TruncatedTensor:
    return TruncatedTensor(a.dim, a.order, tuple(c * x for x in a.levels))


def _mul_levels(a: Sequence[np.ndarray], b: Sequence[np.ndarray], order: int) -> list[np.ndarray]:
    # level k = sum_{i+j=k} a_i (x) b_j; a flat outer product is exactly the
    # row-major layout of the concatenated word
    out = []
    for k in range(order + 1):
        acc = a[0][0] * b[k]
        for i in range(1, k + 1):
            acc = acc + np.outer(a[i], b[k - i]).reshape(-1)
        out.append(acc)
    return out


def tensor_mul(a: TruncatedTensor, b: TruncatedTensor) -> TruncatedTensor:
    """Truncated tensor product ``a (x) b``; terms above ``order`` are dropped."""
    _check_compatible(a, b)
    return TruncatedTensor(a.dim, a.order, tuple(_mul_levels(a.levels, b.levels, a.order)))


def tensor_exp(x: TruncatedTensor) -> TruncatedTensor:
    """Truncated exponential ``1 + x + x^2/2! + ... + x^N/N!``.

    Evaluated in Horner form ``1 + x(1 + x/2 (1 + x/3 (...)))`` so only ``N``
    products are needed.
    """
    if x.scalar != 0.0:
        raise ContractError(f"tensor_exp needs a zero scalar term, got {x.scalar!r}")
    n = x.order
    one = unit(x.dim, n).levels
    acc = list(one)
    for k in range(n, 0, -1):
        prod = _mul_levels(x.levels, acc, n)
        acc = [p / k for p in prod]
        acc[0] = acc[0] + 1.0
    return TruncatedTensor(x.dim, n, tuple(acc))


def tensor_log(x: TruncatedTensor) -> TruncatedTensor:
    """Truncated logarithm ``y - y^2/2 + y^3/3 - ...`` with ``y = x - 1``.

    Horner form: ``log(1 + y) = y (1 - y (1/2 - y (1/3 - ...)))``.
    """
    if x.scalar != 1.0:
        raise ContractError(f"tensor_log needs a unit scalar term, got {x.scalar!r}")
    n = x.order
    y = list(x.levels)
    y[0] = np.zeros(1)
    acc = [np.zeros(x.dim ** k) for k in range(n + 1)]
    acc[0] = np.array([(-1.0) ** (n + 1) / n])
    for k in range(n - 1, 0, -1):
        acc = _mul_levels(y, acc, n)
        acc[0] = acc[0] + (-1.0) ** (k + 1) / k
    return TruncatedTensor(x.dim, n, tuple(_mul_levels(y, acc, n)))
