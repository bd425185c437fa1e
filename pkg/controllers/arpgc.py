"""Two-phase adaptive regularization for equality constraints plus a convex set F.

Phase 1 drives 1/2 ||c||^2 down over F until the constraints are nearly
satisfied or an infeasible critical point is reached. Phase 2 then tracks a
decreasing target t_k for the objective by minimizing
mu(x, t_k) = 1/2 ||(c(x), f(x) - t_k)||^2, and ends with a scaled KKT point.
"""
import logging
from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from models.errors import (
    ConstraintsRequiredError,
    DegenerateMultiplierError,
    InitialTargetError,
    InnerBudgetExceededError,
    TargetBudgetExceededError,
)
from models.feasible import FeasibleSet
from models.problems import Problem
from models.schemas import ArpccStatus, ArpgcConfig, Certificate, CertificateStatus, TargetKind
from models.tensors import Vector

from .arpcc import ArpccResult, arpcc_minimize
from .criticality import chi
from .oracle import EvaluationOracle
from .residual import ResidualData, ResidualMerit, mu_gradient_at, rescore_chi_at_new_target

logger = logging.getLogger(__name__)

DEGENERATE_GAP = 1e-12
CERTIFICATE_SLACK = 1e-12
UNBOUNDED_TARGET_BUDGET = 1_000_000


@dataclass
class PhaseOneResult:
    x1: Vector
    feasible: bool
    data: ResidualData
    inner: ArpccResult


def target_budget(problem: Problem, cfg: ArpgcConfig) -> int:
    if cfg.max_outer_targets is not None:
        return cfg.max_outer_targets
    if problem.f_up is None:
        return UNBOUNDED_TARGET_BUDGET
    p = cfg.inner.p
    return 10 * ceil((problem.f_up - problem.f_low + 1) * cfg.eps_p ** (-(p + 1) / p))


def _require_constraints(problem: Problem):
    if problem.m == 0:
        raise ConstraintsRequiredError(f'Problem {problem.name} has no equality constraints')


def _infeasibility_gradient(data: ResidualData) -> Vector:
    """Gradient of 1/2 ||c||^2 from cached constraint data."""
    return mu_gradient_at(ResidualData(data.x, None, data.constraints), 0.0)


def phase_one(problem: Problem, cfg: ArpgcConfig, x_start: Vector | None = None, *,
              oracle: EvaluationOracle | None = None, sink=None) -> PhaseOneResult:
    """Minimize 1/2 ||c||^2 over F until ||c|| is small or its criticality is small relative to ||c||."""
    _require_constraints(problem)
    oracle = oracle if oracle is not None else EvaluationOracle(problem)
    feasible_set = problem.feasible
    merit = ResidualMerit(oracle)
    threshold = cfg.primal_threshold

    def stop(x, value, gradient):
        c_norm = merit.data_at(x).c_norm
        return c_norm <= threshold or chi(gradient, x, feasible_set) <= cfg.eps_d * c_norm

    start = problem.x_start if x_start is None else x_start
    result = arpcc_minimize(merit, feasible_set, cfg.inner, start, stop, check_criticality=False,
                            counters=oracle.counters, sink=sink, label='phase-1')
    if result.status is ArpccStatus.BUDGET_EXCEEDED:
        raise InnerBudgetExceededError(f'Phase 1 exhausted {cfg.inner.max_outer_iters} iterations')
    data = merit.data_at(result.x_eps)
    feasible = data.c_norm <= threshold
    logger.info('Phase 1 ended with ||c||=%.3e (%s) after %d iterations', data.c_norm,
                'feasible' if feasible else 'infeasible', result.iterations)
    return PhaseOneResult(x1=result.x_eps, feasible=feasible, data=data, inner=result)


def initial_target(f1: float, c_norm1: float, eps_p: float) -> float:
    """t with ||(c, f1 - t)|| = eps_p and t <= f1; also the K_plus target update."""
    if c_norm1 > eps_p:
        raise InitialTargetError(f'||c||={c_norm1:.3e} exceeds eps_p={eps_p:.3e}')
    return f1 - sqrt(eps_p**2 - c_norm1**2)


def recover_multipliers(c_vec, f_val: float, t_val: float) -> Vector:
    if f_val <= t_val:
        raise DegenerateMultiplierError(f'f={f_val!r} does not exceed the target t={t_val!r}')
    return np.asarray(c_vec, dtype=float) / (f_val - t_val)


def _emit(sink, segment, iteration, kind, payload, counters):
    if sink is not None:
        sink.emit(segment, iteration, kind, payload, counters)


def _target_payload(k: int, kind: TargetKind, t_k: float | None, t_next: float, f_next: float, c_norm: float,
                    chi_next: float | None, terminate: bool) -> dict:
    return {
        'k': k,
        'kind': kind.value,
        't_k': t_k,
        't_next': t_next,
        'f_next': f_next,
        'c_norm_next': c_norm,
        'r_norm_at_t_k': None if t_k is None else float(np.hypot(c_norm, f_next - t_k)),
        'r_norm_at_t_next': float(np.hypot(c_norm, f_next - t_next)),
        'chi_mu_at_t_next': chi_next,
        'terminate': terminate,
    }


def _phase_one_certificate(data: ResidualData, feasible_set: FeasibleSet) -> Certificate:
    return Certificate(
        status=CertificateStatus.INFEASIBLE_CRITICAL,
        phase=1,
        x_eps=data.x.tolist(),
        c_norm=data.c_norm,
        chi_infeasibility=chi(_infeasibility_gradient(data), data.x, feasible_set),
        dual_scale=1.0,
    )


def _phase_two_certificate(data: ResidualData, chi_mu: float, cfg: ArpgcConfig,
                           feasible_set: FeasibleSet) -> Certificate:
    x = data.x
    chi_infeasibility = chi(_infeasibility_gradient(data), x, feasible_set)
    common = dict(phase=2, x_eps=x.tolist(), t_eps=data.t, c_norm=data.c_norm,
                  chi_infeasibility=chi_infeasibility, chi_merit=chi_mu, dual_scale=cfg.delta)
    if data.f_value - data.t <= DEGENERATE_GAP:
        logger.info('Phase 2 ended with f(x) = t: reporting an infeasible critical point')
        return Certificate(status=CertificateStatus.INFEASIBLE_CRITICAL, **common)
    y = recover_multipliers(data.c_values, data.f_value, data.t)
    lagrangian_gradient = data.objective.gradient + sum(
        (y_i * taylor.gradient for y_i, taylor in zip(y, data.constraints)), np.zeros(x.size))
    return Certificate(
        status=CertificateStatus.SCALED_KKT,
        y_eps=y.tolist(),
        chi_lagrangian=chi(lagrangian_gradient, x, feasible_set),
        multiplier_scale=float(np.linalg.norm(np.append(y, 1.0))),
        **common,
    )


def phase_two(problem: Problem, cfg: ArpgcConfig, x1: Vector, t1: float, *,
              oracle: EvaluationOracle | None = None, sink=None, segment: int | None = None) -> Certificate:
    """Track decreasing targets from (x1, t1) until the termination conditions hold."""
    _require_constraints(problem)
    oracle = oracle if oracle is not None else EvaluationOracle(problem)
    if sink is not None and segment is None:
        segment = sink.open_segment()
    feasible_set = problem.feasible
    threshold = cfg.primal_threshold
    dual_target = cfg.eps_p * cfg.eps_d
    budget = target_budget(problem, cfg)
    merit = ResidualMerit(oracle, t1)
    x, t = np.asarray(x1, dtype=float), t1

    for k in range(1, budget + 1):
        merit = merit.with_target(t)

        def stop(point, value, gradient, merit=merit, t=t):
            data = merit.data_at(point)
            return (float(np.linalg.norm(data.r)) <= threshold or data.f_value < t
                    or chi(gradient, point, feasible_set) <= dual_target)

        result = arpcc_minimize(merit, feasible_set, cfg.inner, x, stop, check_criticality=False,
                                counters=oracle.counters, sink=sink, label='phase-2')
        if result.status is ArpccStatus.BUDGET_EXCEEDED:
            raise InnerBudgetExceededError(
                f'Phase 2 exhausted {cfg.inner.max_outer_iters} iterations at target {k}')
        data = merit.data_at(result.x_eps)
        r_norm = float(np.linalg.norm(data.r))
        if r_norm <= threshold:
            kind = TargetKind.K_PLUS
            t_next = initial_target(data.f_value, data.c_norm, cfg.eps_p)
        elif data.f_value < t:
            kind = TargetKind.K_MINUS
            t_next = 2.0 * data.f_value - t
        else:
            kind = TargetKind.TERMINAL
            t_next = t
        chi_next = rescore_chi_at_new_target(data, t_next, feasible_set)
        terminate = kind is TargetKind.TERMINAL or chi_next <= dual_target
        _emit(sink, segment, k, 'arpgc-target',
              _target_payload(k, kind, t, t_next, data.f_value, data.c_norm, chi_next, terminate), oracle.counters)
        logger.debug('target %d: %s t=%.9e -> %.9e, ||r||=%.3e chi_mu=%.3e', k, kind.value, t, t_next, r_norm,
                     chi_next)
        x, t = result.x_eps, t_next
        if terminate:
            logger.info('Phase 2 terminated after %d targets', k)
            return _phase_two_certificate(data.at_target(t_next), chi_next, cfg, feasible_set)

    logger.warning('Phase 2 target budget of %d exhausted', budget)
    raise TargetBudgetExceededError(f'No termination within {budget} targets')


def solve_general(problem: Problem, cfg: ArpgcConfig, x_start: Vector | None = None, *,
                  oracle: EvaluationOracle | None = None, sink=None) -> Certificate:
    _require_constraints(problem)
    oracle = oracle if oracle is not None else EvaluationOracle(problem)
    segment = sink.open_segment() if sink is not None else 0
    _emit(sink, segment, 0, 'run-config', {
        'solver': 'arpgc',
        'problem': problem.name,
        'dim': problem.dim,
        'm': problem.m,
        'p': cfg.inner.p,
        'eps_p': cfg.eps_p,
        'eps_d': cfg.eps_d,
        'delta': cfg.delta,
        'beta': cfg.beta,
        'f_low': problem.f_low,
        'f_up': problem.f_up,
    }, oracle.counters)

    first = phase_one(problem, cfg, x_start, oracle=oracle, sink=sink)
    if not first.feasible:
        certificate = _phase_one_certificate(first.data, problem.feasible)
    else:
        f1 = oracle.objective_value(first.x1)
        t1 = initial_target(f1, first.data.c_norm, cfg.eps_p)
        _emit(sink, segment, 0, 'arpgc-target',
              _target_payload(0, TargetKind.INITIAL, None, t1, f1, first.data.c_norm, None, False), oracle.counters)
        certificate = phase_two(problem, cfg, first.x1, t1, oracle=oracle, sink=sink, segment=segment)
    _emit(sink, segment, 0, 'certificate', certificate.model_dump(mode='json'), oracle.counters)
    logger.info('%s: %s certificate with ||c||=%.3e', problem.name, certificate.status.value, certificate.c_norm)
    return certificate


def verify_certificate(problem: Problem, certificate: Certificate, cfg: ArpgcConfig) -> bool:
    """Re-derive the certificate's claims from fresh evaluations on a shadow oracle."""
    shadow = EvaluationOracle.shadow(problem)
    feasible_set = problem.feasible
    x = np.asarray(certificate.x_eps, dtype=float)
    if x.size != problem.dim or not feasible_set.contains(x):
        return False
    constraints = tuple(shadow.constraint_taylors(x, 1))
    data = ResidualData(x, None, constraints)
    c_norm = data.c_norm
    chi_infeasibility = chi(_infeasibility_gradient(data), x, feasible_set)
    threshold = cfg.primal_threshold

    if certificate.status is CertificateStatus.INFEASIBLE_CRITICAL:
        holds = (c_norm >= threshold - CERTIFICATE_SLACK
                 and chi_infeasibility <= certificate.dual_scale * cfg.eps_d * c_norm + CERTIFICATE_SLACK)
    else:
        if certificate.y_eps is None or len(certificate.y_eps) != problem.m:
            return False
        y = np.asarray(certificate.y_eps, dtype=float)
        objective = shadow.objective_taylor(x, 1)
        lagrangian_gradient = objective.gradient + sum(
            (y_i * taylor.gradient for y_i, taylor in zip(y, constraints)), np.zeros(x.size))
        chi_lagrangian = chi(lagrangian_gradient, x, feasible_set)
        scale = float(np.linalg.norm(np.append(y, 1.0)))
        holds = (c_norm <= cfg.eps_p + CERTIFICATE_SLACK
                 and chi_lagrangian <= cfg.delta * cfg.eps_d * scale + CERTIFICATE_SLACK)

    if holds and certificate.phase == 2:
        if certificate.t_eps is None:
            return False
        t = certificate.t_eps
        full = ResidualData(x, t, constraints, shadow.objective_taylor(x, 1))
        r_norm = float(np.linalg.norm(full.r))
        chi_mu = chi(mu_gradient_at(full, t), x, feasible_set)
        holds = (r_norm >= threshold - CERTIFICATE_SLACK
                 and full.f_value >= t - CERTIFICATE_SLACK
                 and chi_mu <= cfg.eps_p * cfg.eps_d + CERTIFICATE_SLACK)
    if not holds:
        logger.warning('Certificate for %s failed verification', problem.name)
    return bool(holds)
