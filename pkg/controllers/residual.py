"""The merit mu(x, t) = 1/2 ||r(x, t)||^2 with r(x, t) = (c(x), f(x) - t).

Component Taylor data of c and f are cached per point. The target only shifts
the value of the last residual, so a cached point can be rescored against a
new target without touching the oracle.
"""
import logging
from dataclasses import dataclass

import numpy as np

from models.errors import DimensionMismatchError, StaleCacheError
from models.feasible import FeasibleSet
from models.problems import SmoothFunction
from models.tensors import MAX_ORDER, SymTensor, TaylorData, Vector

from .criticality import chi
from .oracle import EvaluationOracle

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ResidualData:
    x: Vector
    t: float | None
    constraints: tuple[TaylorData, ...]
    objective: TaylorData | None = None

    @property
    def c_values(self) -> Vector:
        return np.array([taylor.value for taylor in self.constraints])

    @property
    def c_norm(self) -> float:
        return float(np.linalg.norm(self.c_values))

    @property
    def f_value(self) -> float | None:
        return None if self.objective is None else self.objective.value

    @property
    def r(self) -> Vector:
        if self.objective is None:
            return self.c_values
        return np.append(self.c_values, self.objective.value - self.t)

    def components(self) -> list[tuple[float, TaylorData]]:
        """(residual value, component Taylor data) for every entry of r."""
        pairs = list(zip(self.c_values, self.constraints))
        if self.objective is not None:
            pairs.append((self.objective.value - self.t, self.objective))
        return pairs

    def at_target(self, t: float) -> 'ResidualData':
        return ResidualData(self.x, t, self.constraints, self.objective)


def mu_value(data: ResidualData) -> float:
    r = data.r
    return 0.5 * float(r @ r)


def mu_taylor(data: ResidualData, p: int) -> TaylorData:
    if not 1 <= p <= MAX_ORDER:
        raise DimensionMismatchError(f'Taylor order must lie in [1, {MAX_ORDER}], got {p}')
    n = data.x.size
    gradient = np.zeros(n)
    hessian = np.zeros((n, n))
    third = np.zeros((n, n, n))
    for residual, taylor in data.components():
        if taylor.p < p:
            raise DimensionMismatchError(f'Component Taylor data of order {taylor.p} cannot give order {p}')
        d1 = taylor.gradient
        gradient += residual * d1
        if p >= 2:
            d2 = taylor.derivs[1].to_dense()
            hessian += np.outer(d1, d1) + residual * d2
        if p >= 3:
            mixed = SymTensor.from_dense(np.einsum('i,jk->ijk', d1, d2), symmetrize=True)
            third += 3.0 * mixed.to_dense() + residual * taylor.derivs[2].to_dense()
    return TaylorData.from_dense(mu_value(data), gradient, hessian, third, p=p)


def mu_gradient_at(data: ResidualData, t: float) -> Vector:
    """J^T r at a new target, from cached values and gradients only."""
    gradient = sum((value * taylor.gradient for value, taylor in zip(data.c_values, data.constraints)),
                   np.zeros(data.x.size))
    if data.objective is not None:
        gradient = gradient + (data.objective.value - t) * data.objective.gradient
    return gradient


def rescore_chi_at_new_target(data: ResidualData, t_new: float, feasible: FeasibleSet) -> float:
    if data.objective is None:
        raise StaleCacheError('No cached objective data: cannot rescore against a target')
    return chi(mu_gradient_at(data, t_new), data.x, feasible)


class ResidualMerit(SmoothFunction):
    """mu(., t) as a SmoothFunction; ``target=None`` gives 1/2 ||c||^2 alone.

    Every value call costs one constraint-value evaluation (and one objective
    value when a target is set); every Taylor call costs one derivative set of
    each counted component and refreshes the cache.
    """

    def __init__(self, oracle: EvaluationOracle, target: float | None = None):
        self.oracle = oracle
        self.target = target
        self.dim = oracle.problem.dim
        self._cached: ResidualData | None = None

    @property
    def components(self) -> tuple[str, ...]:
        return ('c',) if self.target is None else ('c', 'f')

    def with_target(self, target: float) -> 'ResidualMerit':
        """Same oracle and cache, new target."""
        merit = ResidualMerit(self.oracle, target)
        merit._cached = self._cached
        return merit

    def eval_value(self, x):
        x = self._as_point(x)
        r = self.oracle.constraint_values(x)
        if self.target is not None:
            r = np.append(r, self.oracle.objective_value(x) - self.target)
        return 0.5 * float(r @ r)

    def eval_taylor(self, x, p):
        x = self._as_point(x)
        constraints = tuple(self.oracle.constraint_taylors(x, p))
        objective = self.oracle.objective_taylor(x, p) if self.target is not None else None
        self._cached = ResidualData(np.array(x), self.target, constraints, objective)
        return mu_taylor(self._cached, p)

    def data_at(self, x) -> ResidualData:
        """Cached data at x with the current target."""
        x = self._as_point(x)
        if self._cached is None or not np.array_equal(self._cached.x, x):
            raise StaleCacheError('No derivative data cached at the requested point')
        if self.target is not None and self._cached.objective is None:
            raise StaleCacheError('Cached data lacks the objective component')
        return self._cached.at_target(self.target)
