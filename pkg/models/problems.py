from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError
from .feasible import FeasibleSet
from .tensors import TaylorData, Vector


class SmoothFunction(ABC):
    """A scalar function on R^n able to report its value and Taylor data up to order 3."""

    dim: int

    @abstractmethod
    def eval_value(self, x: Vector) -> float:
        ...

    @abstractmethod
    def eval_taylor(self, x: Vector, p: int) -> TaylorData:
        ...

    def _as_point(self, x) -> Vector:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.dim:
            raise DimensionMismatchError(f'{type(self).__name__} expects dimension {self.dim}, got {x.size}')
        return x


@dataclass(frozen=True, eq=False)
class Problem:
    name: str
    objective: SmoothFunction
    feasible: FeasibleSet
    x_start: Vector
    f_low: float
    constraints: tuple[SmoothFunction, ...] = ()
    f_up: float | None = None
    lipschitz: dict[int, float] = field(default_factory=dict)
    description: str = ''

    def __post_init__(self):
        n = self.objective.dim
        if self.feasible.dim != n:
            raise DimensionMismatchError(f'Feasible set dimension {self.feasible.dim} differs from objective {n}')
        for i, constraint in enumerate(self.constraints):
            if constraint.dim != n:
                raise DimensionMismatchError(f'Constraint {i} has dimension {constraint.dim}, expected {n}')
        x_start = np.array(self.x_start, dtype=float).reshape(-1)
        if x_start.size != n:
            raise DimensionMismatchError(f'Start point has dimension {x_start.size}, expected {n}')
        x_start.setflags(write=False)
        object.__setattr__(self, 'x_start', x_start)
        object.__setattr__(self, 'constraints', tuple(self.constraints))

    @property
    def dim(self) -> int:
        return self.objective.dim

    @property
    def m(self) -> int:
        return len(self.constraints)

    def lipschitz_for(self, p: int) -> float | None:
        return self.lipschitz.get(p)

    def start_point(self, seed: int | None = None, scale: float = 0.5) -> Vector:
        """Default start, or a seeded normal perturbation of it, projected onto F."""
        x = np.array(self.x_start)
        if seed is not None:
            x = x + scale * np.random.default_rng(seed).standard_normal(self.dim)
        return self.feasible.project(x)
