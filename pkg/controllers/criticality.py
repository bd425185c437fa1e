from math import sqrt

import numpy as np

from models.errors import InfeasiblePointError
from models.feasible import FeasibleSet
from models.tensors import Vector


def kappa_n(dim: int) -> float:
    """Norm equivalence constant with ||v|| <= kappa_n ||v||_inf."""
    return sqrt(dim)


def chi(g: Vector, x: Vector, feasible: FeasibleSet) -> float:
    value, _ = feasible.chi_linear_min(x, g)
    return abs(value)


def pi(g: Vector, x: Vector, feasible: FeasibleSet) -> float:
    x = np.asarray(x, dtype=float)
    if not feasible.contains(x):
        raise InfeasiblePointError('Criticality is only defined at feasible points')
    return float(np.linalg.norm(feasible.project(x - np.asarray(g, dtype=float)) - x))
