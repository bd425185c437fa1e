"""Dense symmetric tensors in canonical storage and Taylor data built from them.

A symmetric tensor of order q on R^n is stored once per non-decreasing
multi-index (i_1 <= ... <= i_q), in the lexicographic order produced by
``itertools.combinations_with_replacement``. Symmetry therefore holds by
construction; the number of distinct permutations of each multi-index is
applied when the tensor is contracted.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, permutations
from math import comb, factorial
from typing import TypeAlias

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionMismatchError, NonFiniteValueError

Vector: TypeAlias = NDArray[np.float64]

MAX_ORDER = 3


def canonical_size(dim: int, order: int) -> int:
    return comb(dim + order - 1, order)


@lru_cache(maxsize=None)
def canonical_indices(dim: int, order: int) -> NDArray[np.intp]:
    rows = list(combinations_with_replacement(range(dim), order))
    indices = np.array(rows, dtype=np.intp).reshape(len(rows), order)
    indices.setflags(write=False)
    return indices


@lru_cache(maxsize=None)
def _positions(dim: int, order: int) -> dict[tuple[int, ...], int]:
    return {tuple(int(i) for i in row): pos for pos, row in enumerate(canonical_indices(dim, order))}


@lru_cache(maxsize=None)
def multiplicities(dim: int, order: int) -> Vector:
    """Number of distinct orderings of every canonical multi-index."""
    counts = []
    for row in canonical_indices(dim, order):
        _, repeats = np.unique(row, return_counts=True)
        counts.append(factorial(order) // int(np.prod([factorial(int(r)) for r in repeats])))
    weights = np.array(counts, dtype=float)
    weights.setflags(write=False)
    return weights


@lru_cache(maxsize=None)
def raise_table(dim: int, order: int) -> NDArray[np.intp]:
    """Position in order-``order`` storage of sorted(J + (i,)) for J of order ``order - 1``."""
    lookup = _positions(dim, order)
    lower = canonical_indices(dim, order - 1)
    table = np.empty((lower.shape[0], dim), dtype=np.intp)
    for row, multi_index in enumerate(lower):
        for i in range(dim):
            table[row, i] = lookup[tuple(sorted((*(int(j) for j in multi_index), i)))]
    table.setflags(write=False)
    return table


@dataclass(frozen=True, eq=False)
class SymTensor:
    order: int
    dim: int
    entries: Vector

    def __post_init__(self):
        if not 1 <= self.order <= MAX_ORDER:
            raise DimensionMismatchError(f'Tensor order must lie in [1, {MAX_ORDER}], got {self.order}')
        if self.dim < 1:
            raise DimensionMismatchError(f'Tensor dimension must be positive, got {self.dim}')
        entries = np.array(self.entries, dtype=float).reshape(-1)
        expected = canonical_size(self.dim, self.order)
        if entries.shape != (expected,):
            raise DimensionMismatchError(
                f'Order-{self.order} tensor on R^{self.dim} needs {expected} entries, got {entries.size}')
        if not np.all(np.isfinite(entries)):
            raise NonFiniteValueError('Tensor entries must be finite')
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @classmethod
    def zeros(cls, order: int, dim: int) -> 'SymTensor':
        return cls(order, dim, np.zeros(canonical_size(dim, order)))

    @classmethod
    def from_vector(cls, vector) -> 'SymTensor':
        vector = np.asarray(vector, dtype=float).reshape(-1)
        return cls(1, vector.size, vector)

    @classmethod
    def diagonal(cls, values, order: int) -> 'SymTensor':
        values = np.asarray(values, dtype=float).reshape(-1)
        dim = values.size
        entries = np.zeros(canonical_size(dim, order))
        lookup = _positions(dim, order)
        for i, value in enumerate(values):
            entries[lookup[(i,) * order]] = value
        return cls(order, dim, entries)

    @classmethod
    def from_dense(cls, array, symmetrize: bool = False) -> 'SymTensor':
        array = np.asarray(array, dtype=float)
        order = array.ndim
        if order < 1 or len(set(array.shape)) != 1:
            raise DimensionMismatchError(f'Dense tensor must be hypercubic, got shape {array.shape}')
        if symmetrize and order > 1:
            array = sum(np.transpose(array, perm) for perm in permutations(range(order))) / factorial(order)
        dim = array.shape[0]
        return cls(order, dim, array[tuple(canonical_indices(dim, order).T)])

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.dim,) * self.order)
        indices = canonical_indices(self.dim, self.order)
        for perm in permutations(range(self.order)):
            dense[tuple(indices[:, list(perm)].T)] = self.entries
        return dense

    def _check_compatible(self, other: 'SymTensor'):
        if (self.order, self.dim) != (other.order, other.dim):
            raise DimensionMismatchError(
                f'Cannot combine order-{self.order} R^{self.dim} and order-{other.order} R^{other.dim} tensors')

    def __add__(self, other: 'SymTensor') -> 'SymTensor':
        self._check_compatible(other)
        return SymTensor(self.order, self.dim, self.entries + other.entries)

    def __sub__(self, other: 'SymTensor') -> 'SymTensor':
        self._check_compatible(other)
        return SymTensor(self.order, self.dim, self.entries - other.entries)

    def __mul__(self, scalar: float) -> 'SymTensor':
        return SymTensor(self.order, self.dim, float(scalar) * self.entries)

    __rmul__ = __mul__

    def __repr__(self):
        return f'SymTensor(order={self.order}, dim={self.dim})'


@dataclass(frozen=True, eq=False)
class TaylorData:
    """Value and derivative tensors of orders 1..p of a scalar function at one point."""

    value: float
    derivs: tuple[SymTensor, ...]

    def __post_init__(self):
        derivs = tuple(self.derivs)
        if not 1 <= len(derivs) <= MAX_ORDER:
            raise DimensionMismatchError(f'Taylor data needs between 1 and {MAX_ORDER} derivative tensors')
        for q, tensor in enumerate(derivs, start=1):
            if tensor.order != q:
                raise DimensionMismatchError(f'Derivative {q} has order {tensor.order}')
            if tensor.dim != derivs[0].dim:
                raise DimensionMismatchError('All derivative tensors must share one dimension')
        if not np.isfinite(self.value):
            raise NonFiniteValueError(f'Function value is not finite: {self.value}')
        object.__setattr__(self, 'value', float(self.value))
        object.__setattr__(self, 'derivs', derivs)

    @property
    def p(self) -> int:
        return len(self.derivs)

    @property
    def dim(self) -> int:
        return self.derivs[0].dim

    @property
    def gradient(self) -> Vector:
        return np.array(self.derivs[0].entries)

    def truncated(self, p: int) -> 'TaylorData':
        if p > self.p:
            raise DimensionMismatchError(f'Cannot raise Taylor data of order {self.p} to {p}')
        return TaylorData(self.value, self.derivs[:p])

    @classmethod
    def from_dense(cls, value: float, gradient, hessian=None, third=None, p: int = 1) -> 'TaylorData':
        """Build Taylor data of order p from dense arrays; missing orders are zero."""
        if not 1 <= p <= MAX_ORDER:
            raise DimensionMismatchError(f'Taylor order must lie in [1, {MAX_ORDER}], got {p}')
        derivs = [SymTensor.from_vector(gradient)]
        dim = derivs[0].dim
        for order, dense in ((2, hessian), (3, third)):
            if order > p:
                break
            derivs.append(SymTensor.zeros(order, dim) if dense is None else SymTensor.from_dense(dense))
        return cls(value, tuple(derivs))
