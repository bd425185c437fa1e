"""Counted access to a problem's objective and constraints."""
import logging
from typing import Literal

import numpy as np

from models.errors import NonFiniteValueError
from models.problems import Problem, SmoothFunction
from models.schemas import EvalCounters
from models.tensors import TaylorData, Vector

logger = logging.getLogger(__name__)

Which = Literal['objective'] | int


class EvaluationOracle:
    """Routes every evaluation of f and c through one set of counters.

    One call returning all m constraint values counts once, as does one call
    returning the constraint derivative sets at a point.
    """

    def __init__(self, problem: Problem, counters: EvalCounters | None = None):
        self.problem = problem
        self.counters = counters if counters is not None else EvalCounters()

    @classmethod
    def shadow(cls, problem: Problem) -> 'EvaluationOracle':
        """A second oracle with its own counters, for out-of-band checks."""
        return cls(problem, EvalCounters())

    @staticmethod
    def _finite(value: float, label: str) -> float:
        if not np.isfinite(value):
            raise NonFiniteValueError(f'{label} returned a non-finite value: {value}')
        return float(value)

    def eval_value_counted(self, which: Which, x: Vector) -> float:
        if which == 'objective':
            self.counters.f_values += 1
            return self._finite(self.problem.objective.eval_value(x), 'objective')
        self.counters.c_values += 1
        return self._finite(self.problem.constraints[which].eval_value(x), f'constraint {which}')

    def objective_value(self, x: Vector) -> float:
        return self.eval_value_counted('objective', x)

    def constraint_values(self, x: Vector) -> Vector:
        self.counters.c_values += 1
        values = np.array([c.eval_value(x) for c in self.problem.constraints], dtype=float)
        if not np.all(np.isfinite(values)):
            raise NonFiniteValueError(f'constraints returned non-finite values: {values}')
        return values

    def objective_taylor(self, x: Vector, p: int) -> TaylorData:
        self.counters.f_derivative_sets += 1
        return self.problem.objective.eval_taylor(x, p)

    def constraint_taylors(self, x: Vector, p: int) -> list[TaylorData]:
        self.counters.c_derivative_sets += 1
        return [c.eval_taylor(x, p) for c in self.problem.constraints]


class CountedObjective(SmoothFunction):
    """The problem objective seen through an oracle, as ARpCC consumes it."""

    components = ('f',)

    def __init__(self, oracle: EvaluationOracle):
        self.oracle = oracle
        self.dim = oracle.problem.dim

    def eval_value(self, x):
        return self.oracle.objective_value(x)

    def eval_taylor(self, x, p):
        return self.oracle.objective_taylor(x, p)
