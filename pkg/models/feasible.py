from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError, InfeasiblePointError
from .tensors import Vector

DEFAULT_FEASIBILITY_TOL = 1e-10


class SetVariant(str, Enum):
    WHOLE_SPACE = 'WholeSpace'
    BOX = 'Box'


@dataclass(frozen=True, eq=False)
class FeasibleSet:
    """The convex set F: either the whole space or a box with possibly infinite bounds.

    The whole space is stored as a box with infinite bounds so that projection,
    membership and the linearized criticality subproblem share one code path.
    """

    lower: Vector
    upper: Vector
    variant: SetVariant = SetVariant.BOX

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float).reshape(-1)
        upper = np.array(self.upper, dtype=float).reshape(-1)
        if lower.shape != upper.shape or lower.size == 0:
            raise DimensionMismatchError(f'Bounds must be non-empty and of equal length: {lower.size} vs {upper.size}')
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise ValueError('Bounds must not be NaN')
        if np.any(lower > upper):
            raise ValueError('Empty box: every lower bound must not exceed its upper bound')
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)

    @classmethod
    def whole_space(cls, dim: int) -> 'FeasibleSet':
        return cls(np.full(dim, -np.inf), np.full(dim, np.inf), SetVariant.WHOLE_SPACE)

    @classmethod
    def box(cls, lower, upper) -> 'FeasibleSet':
        return cls(lower, upper, SetVariant.BOX)

    @property
    def dim(self) -> int:
        return self.lower.size

    def _as_point(self, x) -> Vector:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.dim:
            raise DimensionMismatchError(f'Point has dimension {x.size}, set has dimension {self.dim}')
        return x

    def project(self, x) -> Vector:
        """Euclidean projection onto F (componentwise clamp)."""
        return np.clip(self._as_point(x), self.lower, self.upper)

    def contains(self, x, tol: float = DEFAULT_FEASIBILITY_TOL) -> bool:
        if tol < 0:
            raise ValueError('Tolerance must be non-negative')
        x = self._as_point(x)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def chi_linear_min(self, x, g, tol: float = DEFAULT_FEASIBILITY_TOL) -> tuple[float, Vector]:
        """Minimize <g, d> over x + d in F and ||d||_inf <= 1.

        The problem is separable on a box: every d_i ranges over
        [max(l_i - x_i, -1), min(u_i - x_i, 1)] and takes the end of that
        interval with the smaller g_i d_i, or zero when g_i is zero.
        """
        x = self._as_point(x)
        g = self._as_point(g)
        if not self.contains(x, tol):
            raise InfeasiblePointError('Criticality is only defined at feasible points')
        low = np.minimum(np.maximum(self.lower - x, -1.0), 0.0)
        high = np.maximum(np.minimum(self.upper - x, 1.0), 0.0)
        d = np.where(g > 0, low, np.where(g < 0, high, 0.0))
        return float(min(np.dot(g, d), 0.0)), d
