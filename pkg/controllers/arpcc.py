"""Adaptive regularization with p-th order models for convexly constrained problems."""
import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from math import log

import numpy as np

from models.errors import NoDescentError
from models.feasible import FeasibleSet
from models.problems import SmoothFunction
from models.schemas import ArpccConfig, ArpccStatus, EvalCounters, IterationOutcome
from models.tensors import Vector

from .criticality import chi, pi
from .reg_model import ModelState, model_decrease
from .subsolver import solve_subproblem, verify_step

logger = logging.getLogger(__name__)

StopPredicate = Callable[[Vector, float, Vector], bool]

DECREASE_GUARD = 1e-15


@dataclass
class IterationRecord:
    k: int
    x_k: Vector
    f_k: float
    sigma_k: float
    sigma_next: float
    chi_k: float
    pi_k: float
    step_norm: float
    model_decrease: float
    model_change: float
    chi_model: float
    trial_feasible: bool
    f_trial: float | None
    rho_k: float | None
    outcome: IterationOutcome
    counters: EvalCounters

    def payload(self) -> dict:
        return {
            'k': self.k,
            'x_k': self.x_k.tolist(),
            'f_k': self.f_k,
            'sigma_k': self.sigma_k,
            'sigma_next': self.sigma_next,
            'chi_k': self.chi_k,
            'pi_k': self.pi_k,
            'step_norm': self.step_norm,
            'model_decrease': self.model_decrease,
            'model_change': self.model_change,
            'chi_model': self.chi_model if np.isfinite(self.chi_model) else None,
            'trial_feasible': self.trial_feasible,
            'f_trial': self.f_trial,
            'rho_k': self.rho_k,
            'outcome': self.outcome.value,
            'evaluated_trial': self.f_trial is not None,
        }


@dataclass
class ArpccResult:
    x_eps: Vector
    f_eps: float
    chi_eps: float
    status: ArpccStatus
    counters: EvalCounters
    sigma_max: float
    trace: list[IterationRecord] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def successful(self) -> int:
        return sum(record.outcome is not IterationOutcome.UNSUCCESSFUL for record in self.trace)


def classify(rho: float | None, cfg: ArpccConfig) -> IterationOutcome:
    if rho is None or rho < cfg.eta1:
        return IterationOutcome.UNSUCCESSFUL
    if rho > cfg.eta2:
        return IterationOutcome.VERY_SUCCESSFUL
    return IterationOutcome.SUCCESSFUL


def sigma_update(sigma: float, rho: float | None, cfg: ArpccConfig) -> float:
    """Shrink fully on very successful, hold on successful, grow by gamma2 otherwise.

    A rho of None marks an iteration declared unsuccessful without evaluating f.
    """
    outcome = classify(rho, cfg)
    if outcome is IterationOutcome.VERY_SUCCESSFUL:
        return max(cfg.sigma_min, cfg.gamma1 * sigma)
    if outcome is IterationOutcome.SUCCESSFUL:
        return sigma
    return cfg.gamma2 * sigma


def kappa_u(gamma1: float, gamma2: float, sigma0: float, sigma_max: float) -> float:
    """Bound on the ratio of total to successful iterations."""
    return (1 + abs(log(gamma1)) / log(gamma2)) + log(sigma_max / sigma0) / log(gamma2)


def kappa_s(p: int, eta1: float, sigma_min: float, kappa_n: float, lipschitz: float, theta: float,
            sigma_max: float) -> float:
    """Constant of the per-successful-iteration decrease bound."""
    return (p + 1) / (eta1 * sigma_min) * (2 * kappa_n * (lipschitz + theta + sigma_max)) ** ((p + 1) / p)


def arpcc_minimize(h: SmoothFunction, feasible: FeasibleSet, cfg: ArpccConfig, x_start: Vector,
                   stop: StopPredicate | None = None, *, check_criticality: bool = True,
                   counters: EvalCounters | None = None, sink=None, label: str = 'convex',
                   lipschitz: float | None = None, f_low: float | None = None) -> ArpccResult:
    """Minimize h over F until chi_h <= epsilon or ``stop`` holds at an accepted iterate.

    Derivatives are evaluated once per accepted iterate; every trial point costs
    one value of h unless the model decrease is too small to form rho, in which
    case the iteration is declared unsuccessful without evaluating h.
    """
    p = cfg.p
    counters = counters if counters is not None else EvalCounters()
    x = feasible.project(x_start)
    segment = sink.open_segment() if sink is not None else 0
    if sink is not None:
        sink.emit(segment, 0, 'run-config', {
            'solver': 'arpcc',
            'label': label,
            'dim': x.size,
            'p': p,
            'sigma0': cfg.sigma0,
            'sigma_min': cfg.sigma_min,
            'gamma1': cfg.gamma1,
            'gamma2': cfg.gamma2,
            'gamma3': cfg.gamma3,
            'eta1': cfg.eta1,
            'eta2': cfg.eta2,
            'theta': cfg.subsolver.theta,
            'epsilon': cfg.epsilon if check_criticality else None,
            'lipschitz': lipschitz,
            'f_low': f_low,
            'components': list(getattr(h, 'components', ())),
            'x0': x.tolist(),
        }, counters)

    f_x = h.eval_value(x)
    taylor = h.eval_taylor(x, p)
    sigma = sigma_max = cfg.sigma0
    trace: list[IterationRecord] = []
    status = None
    while status is None:
        gradient = taylor.gradient
        chi_x = chi(gradient, x, feasible)
        if check_criticality and chi_x <= cfg.epsilon:
            status = ArpccStatus.CRITICALITY_REACHED
            break
        if stop is not None and stop(x, f_x, gradient):
            status = ArpccStatus.CUSTOM_PREDICATE
            break
        pi_x = pi(gradient, x, feasible)
        while True:
            if len(trace) >= cfg.max_outer_iters:
                status = ArpccStatus.BUDGET_EXCEEDED
                break
            model = ModelState(x, taylor, sigma)
            try:
                s = solve_subproblem(model, feasible, cfg.subsolver)
            except NoDescentError as exc:
                logger.warning('Stopping at k=%d with sigma=%.3e: %s', len(trace), sigma, exc)
                status = ArpccStatus.NO_DESCENT
                break
            check = verify_step(model, feasible, cfg.subsolver, s)
            trial = feasible.project(x + s)
            decrease = model_decrease(model, s)
            if decrease <= DECREASE_GUARD * max(1.0, abs(f_x)):
                logger.warning('Model decrease %.3e too small at k=%d; iteration declared unsuccessful',
                               decrease, len(trace))
                f_trial, rho = None, None
            else:
                f_trial = h.eval_value(trial)
                rho = (f_x - f_trial) / decrease
            outcome = classify(rho, cfg)
            sigma_next = sigma_update(sigma, rho, cfg)
            record = IterationRecord(
                k=len(trace), x_k=np.array(x), f_k=f_x, sigma_k=sigma, sigma_next=sigma_next, chi_k=chi_x,
                pi_k=pi_x, step_norm=check.step_norm, model_decrease=decrease, model_change=check.model_change,
                chi_model=check.chi_model, trial_feasible=check.feasible, f_trial=f_trial, rho_k=rho,
                outcome=outcome, counters=counters.snapshot(),
            )
            trace.append(record)
            if sink is not None:
                sink.emit(segment, record.k, 'arpcc-iter', record.payload(), counters)
            logger.debug('k=%d f=%.6e chi=%.3e sigma=%.3e rho=%s %s', record.k, f_x, chi_x, sigma, rho,
                         outcome.value)
            sigma = sigma_next
            sigma_max = max(sigma_max, sigma)
            if outcome is not IterationOutcome.UNSUCCESSFUL:
                x, f_x = trial, f_trial
                taylor = h.eval_taylor(x, p)
                break

    chi_x = chi(taylor.gradient, x, feasible)
    result = ArpccResult(x_eps=x, f_eps=f_x, chi_eps=chi_x, status=status, counters=counters.snapshot(),
                         sigma_max=sigma_max, trace=trace)
    if sink is not None:
        sink.emit(segment, len(trace), 'arpcc-end', {
            'status': status.value,
            'x_eps': x.tolist(),
            'f_eps': f_x,
            'chi_eps': chi_x,
            'iterations': result.iterations,
            'successful': result.successful,
            'sigma_max': sigma_max,
        }, counters)
    logger.info('%s finished with %s after %d iterations (%d successful), chi=%.3e', label, status.value,
                result.iterations, result.successful, chi_x)
    return result
