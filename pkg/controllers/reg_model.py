from dataclasses import dataclass

import numpy as np

from models.tensors import TaylorData, Vector

from .taylor import taylor_gradient, taylor_increment, taylor_value


@dataclass(frozen=True, eq=False)
class ModelState:
    """The regularized model m_k(x_k + s) = T_p(x_k, s) + sigma / (p + 1) ||s||^(p+1)."""

    x_k: Vector
    taylor: TaylorData
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f'Regularization parameter must be positive, got {self.sigma}')

    @property
    def p(self) -> int:
        return self.taylor.p


def model_value(model: ModelState, s: Vector) -> float:
    p = model.p
    return taylor_value(model.taylor, s) + model.sigma / (p + 1) * float(np.linalg.norm(s)) ** (p + 1)


def model_gradient(model: ModelState, s: Vector) -> Vector:
    p = model.p
    return taylor_gradient(model.taylor, s) + model.sigma * float(np.linalg.norm(s)) ** (p - 1) * np.asarray(s)


def model_decrease(model: ModelState, s: Vector) -> float:
    """T_p(x_k, 0) - T_p(x_k, s), the denominator of the acceptance ratio."""
    return -taylor_increment(model.taylor, s)


def model_change(model: ModelState, s: Vector) -> float:
    """m_k(x_k + s) - m_k(x_k), computed without the function value."""
    p = model.p
    return taylor_increment(model.taylor, s) + model.sigma / (p + 1) * float(np.linalg.norm(s)) ** (p + 1)
