"""Projected-gradient minimization of the regularized model over F."""
import logging
from dataclasses import dataclass

import numpy as np

from models.errors import InnerBudgetExceededError, NoDescentError
from models.feasible import FeasibleSet
from models.schemas import SubsolverControls
from models.tensors import Vector

from .criticality import chi
from .reg_model import ModelState, model_change, model_gradient

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-10
CHI_SLACK = 1e-12


@dataclass(frozen=True)
class StepCheck:
    feasible: bool
    model_change: float
    chi_model: float
    step_norm: float
    chi_bound: float

    @property
    def decreases(self) -> bool:
        return self.model_change < 0

    @property
    def criticality_ok(self) -> bool:
        return self.chi_model <= self.chi_bound + CHI_SLACK

    @property
    def satisfied(self) -> bool:
        return self.feasible and self.decreases and self.criticality_ok


def verify_step(model: ModelState, feasible: FeasibleSet, controls: SubsolverControls, s: Vector) -> StepCheck:
    """Recheck the three step conditions independently of the solver that produced s."""
    point = model.x_k + s
    step_norm = float(np.linalg.norm(s))
    inside = feasible.contains(point, FEASIBILITY_TOL)
    return StepCheck(
        feasible=inside,
        model_change=model_change(model, s),
        chi_model=chi(model_gradient(model, s), point, feasible) if inside else float('inf'),
        step_norm=step_norm,
        chi_bound=controls.theta * step_norm ** model.p,
    )


def solve_subproblem(model: ModelState, feasible: FeasibleSet, controls: SubsolverControls) -> Vector:
    """Return s with x_k + s in F, m_k(x_k + s) < m_k(x_k) and chi_m(x_k + s) <= theta ||s||^p.

    Projected gradient steps start from s = 0; each step is backtracked until
    the Armijo condition holds on the model, and the trial step length grows
    again after every accepted step, up to the initial step.
    """
    x_k = model.x_k
    p = model.p
    s = np.zeros_like(x_k)
    change = 0.0
    max_step = controls.initial_step if controls.initial_step is not None else 1.0 / model.sigma
    step = max_step
    decreased = False
    for inner in range(controls.max_inner_iters):
        gradient = model_gradient(model, s)
        point = x_k + s
        if decreased and chi(gradient, point, feasible) <= controls.theta * float(np.linalg.norm(s)) ** p:
            logger.debug('Subproblem solved after %d inner iterations, ||s||=%.3e', inner, np.linalg.norm(s))
            return s
        resolution = 1e-15 * max(1.0, float(np.linalg.norm(point)))
        while True:
            trial = feasible.project(point - step * gradient) - x_k
            displacement = trial - s
            if np.linalg.norm(displacement) <= resolution:
                return _stalled(model, feasible, controls, s, decreased)
            trial_change = model_change(model, trial)
            if trial_change < change and trial_change <= change + controls.armijo_c * float(gradient @ displacement):
                break
            step *= controls.backtrack_factor
        s, change, decreased = trial, trial_change, True
        step = min(max_step, step / controls.backtrack_factor)
    raise InnerBudgetExceededError(
        f'Subproblem not solved within {controls.max_inner_iters} inner iterations')


def _stalled(model: ModelState, feasible: FeasibleSet, controls: SubsolverControls, s: Vector,
             decreased: bool) -> Vector:
    if not decreased:
        raise NoDescentError('No feasible model decrease from s = 0: the iterate is numerically critical')
    if verify_step(model, feasible, controls, s).satisfied:
        return s
    logger.warning('Projected gradient stalled at ||s||=%.3e without meeting the criticality test',
                   np.linalg.norm(s))
    raise NoDescentError('Projected gradient stalled before the step criticality test held')
