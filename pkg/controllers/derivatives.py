"""Finite-difference verification of hand-coded derivative tensors."""
import logging

import numpy as np

from models.problems import SmoothFunction
from models.schemas import DerivativeReport
from models.tensors import Vector

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-6


def _relative_error(exact: np.ndarray, approx: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(exact), initial=0.0)))
    return float(np.max(np.abs(exact - approx), initial=0.0)) / scale


def derivative_check(function: SmoothFunction, x: Vector, p: int, step: float = 1e-5,
                     tolerance: float = DEFAULT_TOLERANCE) -> DerivativeReport:
    """Compare every order-q tensor with central differences of the order q-1 data.

    Order 1 is checked against values, order q >= 2 against the dense order
    q-1 tensor evaluated at x +- h e_j, which fills the last index j.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    n = x.size
    h = step * max(1.0, float(np.max(np.abs(x))))
    taylor = function.eval_taylor(x, p)
    report = DerivativeReport(tolerance=tolerance)
    for q in range(1, p + 1):
        exact = taylor.derivs[q - 1].to_dense()
        approx = np.zeros_like(exact)
        for j in range(n):
            e = np.zeros(n)
            e[j] = h
            if q == 1:
                approx[j] = (function.eval_value(x + e) - function.eval_value(x - e)) / (2 * h)
            else:
                forward = function.eval_taylor(x + e, q - 1).derivs[q - 2].to_dense()
                backward = function.eval_taylor(x - e, q - 1).derivs[q - 2].to_dense()
                approx[..., j] = (forward - backward) / (2 * h)
        report.errors[q] = _relative_error(exact, approx)
    if report.flagged:
        logger.warning('Derivative check flagged orders %s at x=%s: %s', report.flagged, x, report.errors)
    return report
