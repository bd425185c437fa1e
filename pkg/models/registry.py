"""Built-in test problems with hand-coded derivative tensors up to order three."""
from collections.abc import Callable
from math import exp

import numpy as np

from .errors import UnknownProblemError
from .feasible import FeasibleSet
from .problems import Problem, SmoothFunction
from .tensors import SymTensor, TaylorData, Vector


class LinearFunction(SmoothFunction):
    def __init__(self, coefficients, offset: float = 0.0):
        self.coefficients = np.asarray(coefficients, dtype=float).reshape(-1)
        self.offset = float(offset)
        self.dim = self.coefficients.size

    def eval_value(self, x):
        return float(self.coefficients @ self._as_point(x) + self.offset)

    def eval_taylor(self, x, p):
        return TaylorData.from_dense(self.eval_value(x), self.coefficients, p=p)


class ZeroFunction(LinearFunction):
    def __init__(self, dim: int):
        super().__init__(np.zeros(dim))


class ShiftedSquaredNorm(SmoothFunction):
    """||x||^2 - radius_sq."""

    def __init__(self, dim: int, radius_sq: float):
        self.dim = dim
        self.radius_sq = float(radius_sq)

    def eval_value(self, x):
        x = self._as_point(x)
        return float(x @ x - self.radius_sq)

    def eval_taylor(self, x, p):
        x = self._as_point(x)
        return TaylorData.from_dense(x @ x - self.radius_sq, 2.0 * x, 2.0 * np.eye(self.dim), p=p)


class SeparableQuartic(SmoothFunction):
    """Sum of (x_i - c_i)^4 / 4 + (x_i - c_i)^2 / 2."""

    def __init__(self, center):
        self.center = np.asarray(center, dtype=float).reshape(-1)
        self.dim = self.center.size

    def eval_value(self, x):
        u = self._as_point(x) - self.center
        return float(np.sum(0.25 * u**4 + 0.5 * u**2))

    def eval_taylor(self, x, p):
        u = self._as_point(x) - self.center
        derivs = [SymTensor.from_vector(u**3 + u)]
        if p >= 2:
            derivs.append(SymTensor.diagonal(3.0 * u**2 + 1.0, 2))
        if p >= 3:
            derivs.append(SymTensor.diagonal(6.0 * u, 3))
        return TaylorData(float(np.sum(0.25 * u**4 + 0.5 * u**2)), tuple(derivs[:p]))


class Rosenbrock(SmoothFunction):
    dim = 2

    def eval_value(self, x):
        x1, x2 = self._as_point(x)
        return float((1.0 - x1) ** 2 + 100.0 * (x2 - x1**2) ** 2)

    def eval_taylor(self, x, p):
        x1, x2 = self._as_point(x)
        gradient = [-2.0 * (1.0 - x1) - 400.0 * x1 * (x2 - x1**2), 200.0 * (x2 - x1**2)]
        hessian = [[2.0 - 400.0 * x2 + 1200.0 * x1**2, -400.0 * x1], [-400.0 * x1, 200.0]]
        third = np.zeros((2, 2, 2))
        third[0, 0, 0] = 2400.0 * x1
        third[0, 0, 1] = third[0, 1, 0] = third[1, 0, 0] = -400.0
        return TaylorData.from_dense(self.eval_value(x), gradient, hessian, third, p=p)


class ExpProduct(SmoothFunction):
    """exp(x_1 x_2 ... x_n)."""

    def __init__(self, dim: int):
        self.dim = dim

    def eval_value(self, x):
        return exp(float(np.prod(self._as_point(x))))

    @staticmethod
    def _partial_product(x: Vector, excluded: set[int]) -> float:
        return float(np.prod([x[l] for l in range(x.size) if l not in excluded]))

    def eval_taylor(self, x, p):
        x = self._as_point(x)
        n = self.dim
        value = exp(float(np.prod(x)))
        first = np.array([self._partial_product(x, {i}) for i in range(n)])
        second = np.zeros((n, n))
        third = np.zeros((n, n, n))
        for i in range(n):
            for j in range(n):
                if i != j:
                    second[i, j] = self._partial_product(x, {i, j})
                for k in range(n):
                    if len({i, j, k}) == 3:
                        third[i, j, k] = self._partial_product(x, {i, j, k})
        gradient = value * first
        hessian = value * (np.outer(first, first) + second)
        d3 = value * (
            np.einsum('i,j,k->ijk', first, first, first)
            + np.einsum('ij,k->ijk', second, first)
            + np.einsum('ik,j->ijk', second, first)
            + np.einsum('jk,i->ijk', second, first)
            + third
        )
        return TaylorData.from_dense(value, gradient, hessian, d3, p=p)


class BilinearDifference(SmoothFunction):
    """x_2 x_3 - 5 x_4 x_5 on R^5."""

    dim = 5

    def eval_value(self, x):
        x = self._as_point(x)
        return float(x[1] * x[2] - 5.0 * x[3] * x[4])

    def eval_taylor(self, x, p):
        x = self._as_point(x)
        gradient = [0.0, x[2], x[1], -5.0 * x[4], -5.0 * x[3]]
        hessian = np.zeros((5, 5))
        hessian[1, 2] = hessian[2, 1] = 1.0
        hessian[3, 4] = hessian[4, 3] = -5.0
        return TaylorData.from_dense(self.eval_value(x), gradient, hessian, p=p)


class CubicPair(SmoothFunction):
    """x_1^3 + x_2^3 + 1 on R^5."""

    dim = 5

    def eval_value(self, x):
        x = self._as_point(x)
        return float(x[0] ** 3 + x[1] ** 3 + 1.0)

    def eval_taylor(self, x, p):
        x = self._as_point(x)
        gradient = np.zeros(5)
        gradient[:2] = 3.0 * x[:2] ** 2
        hessian = np.zeros((5, 5))
        hessian[0, 0], hessian[1, 1] = 6.0 * x[0], 6.0 * x[1]
        third = np.zeros((5, 5, 5))
        third[0, 0, 0] = third[1, 1, 1] = 6.0
        return TaylorData.from_dense(self.eval_value(x), gradient, hessian, third, p=p)


QUARTIC_CENTER = (0.5, -0.25, 1.0)


def quartic_bowl() -> Problem:
    return Problem(
        name='quartic-bowl',
        objective=SeparableQuartic(QUARTIC_CENTER),
        feasible=FeasibleSet.whole_space(3),
        x_start=np.array([-2.0, 2.0, -1.5]),
        f_low=0.0,
        lipschitz={3: 6.0},
        description='Separable quartic plus quadratic, unconstrained',
    )


def quartic_box() -> Problem:
    return Problem(
        name='quartic-box',
        objective=SeparableQuartic(QUARTIC_CENTER),
        feasible=FeasibleSet.box(np.full(3, -2.0), np.full(3, 2.0)),
        x_start=np.array([-2.0, 2.0, -1.5]),
        f_low=0.0,
        lipschitz={1: 28.0, 2: 18.0, 3: 6.0},
        description='Separable quartic plus quadratic on the box [-2, 2]^3',
    )


def rosenbrock_box() -> Problem:
    return Problem(
        name='rosenbrock-box',
        objective=Rosenbrock(),
        feasible=FeasibleSet.box([-1.5, -0.5], [0.5, 2.0]),
        x_start=np.array([-1.2, 1.0]),
        f_low=0.0,
        lipschitz={1: 3100.0, 2: 4800.0, 3: 2400.0},
        description='Rosenbrock on a box whose bound x1 <= 0.5 is active at the solution (0.5, 0.25)',
    )


def linear_box() -> Problem:
    return Problem(
        name='linear-box',
        objective=LinearFunction([1.0, -2.0]),
        feasible=FeasibleSet.box([0.0, 0.0], [1.0, 1.0]),
        x_start=np.array([1.0, 0.0]),
        f_low=-2.0,
        lipschitz={1: 0.0, 2: 0.0, 3: 0.0},
        description='Linear objective over the unit box, solved at the vertex (0, 1)',
    )


def circle() -> Problem:
    return Problem(
        name='circle',
        objective=LinearFunction([1.0, 1.0]),
        constraints=(ShiftedSquaredNorm(2, 1.0),),
        feasible=FeasibleSet.whole_space(2),
        x_start=np.array([2.0, 0.0]),
        f_low=-2.0,
        f_up=2.0,
        description='min x1 + x2 subject to x1^2 + x2^2 = 1',
    )


def powell_equality() -> Problem:
    return Problem(
        name='powell-equality',
        objective=ExpProduct(5),
        constraints=(ShiftedSquaredNorm(5, 10.0), BilinearDifference(), CubicPair()),
        feasible=FeasibleSet.whole_space(5),
        x_start=np.array([-2.0, 2.0, 2.0, -1.0, -1.0]),
        f_low=0.0,
        f_up=exp((11.0 / 5.0) ** 2.5),
        description="Powell's exponential problem with three equality constraints",
    )


def infeasible() -> Problem:
    return Problem(
        name='infeasible',
        objective=LinearFunction([1.0]),
        constraints=(ShiftedSquaredNorm(1, -1.0),),
        feasible=FeasibleSet.whole_space(1),
        x_start=np.array([1.0]),
        f_low=-1.0,
        f_up=1.0,
        description='min x subject to x^2 + 1 = 0, which has no feasible point',
    )


PROBLEMS: dict[str, Callable[[], Problem]] = {
    'quartic-bowl': quartic_bowl,
    'quartic-box': quartic_box,
    'rosenbrock-box': rosenbrock_box,
    'linear-box': linear_box,
    'circle': circle,
    'powell-equality': powell_equality,
    'infeasible': infeasible,
}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise UnknownProblemError(name) from None


def list_problems() -> list[Problem]:
    return [factory() for factory in PROBLEMS.values()]
