from math import factorial

import numpy as np

from models.errors import DimensionMismatchError
from models.tensors import SymTensor, TaylorData, Vector, canonical_indices, multiplicities, raise_table


def _as_direction(s, dim: int) -> Vector:
    s = np.asarray(s, dtype=float).reshape(-1)
    if s.size != dim:
        raise DimensionMismatchError(f'Direction has dimension {s.size}, tensor has dimension {dim}')
    return s


def contract(tensor: SymTensor, s, k: int) -> SymTensor | float:
    """Apply ``tensor`` k times to the vector s; a full contraction returns a scalar."""
    s = _as_direction(s, tensor.dim)
    if not 1 <= k <= tensor.order:
        raise DimensionMismatchError(f'Cannot contract an order-{tensor.order} tensor {k} times')
    dim, order = tensor.dim, tensor.order
    if k == order:
        monomials = np.prod(s[canonical_indices(dim, order)], axis=1)
        return float(np.sum(multiplicities(dim, order) * tensor.entries * monomials))
    entries = tensor.entries
    for current in range(order, order - k, -1):
        entries = entries[raise_table(dim, current)] @ s
    return SymTensor(order - k, dim, entries)


def taylor_increment(taylor: TaylorData, s) -> float:
    """T_p(x, s) - T_p(x, 0), summed without the function value."""
    s = _as_direction(s, taylor.dim)
    return sum(contract(d, s, q) / factorial(q) for q, d in enumerate(taylor.derivs, start=1))


def taylor_value(taylor: TaylorData, s) -> float:
    return taylor.value + taylor_increment(taylor, s)


def taylor_gradient(taylor: TaylorData, s) -> Vector:
    s = _as_direction(s, taylor.dim)
    gradient = taylor.gradient
    for q, d in enumerate(taylor.derivs[1:], start=2):
        gradient = gradient + contract(d, s, q - 1).entries / factorial(q - 1)
    return gradient
