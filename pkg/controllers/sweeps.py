"""Empirical scaling of ARpCC work against the tolerance."""
import logging
from math import log10
from multiprocessing import Pool

import numpy as np

from models.errors import SweepGridError, SweepPointError
from models.registry import get_problem
from models.schemas import ArpccConfig, ArpccStatus, SweepPoint, SweepResult

from .arpcc import arpcc_minimize
from .oracle import CountedObjective, EvaluationOracle

logger = logging.getLogger(__name__)

DEFAULT_GRID = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
SLOPE_SLACK = 0.1
MIN_POINTS = 4
MIN_DECADES = 2.0


def fit_slope(eps_grid, counts) -> float:
    """Least-squares slope of log(count) against log(1/eps); zero counts are read as one."""
    x = np.log(1.0 / np.asarray(eps_grid, dtype=float))
    y = np.log(np.maximum(np.asarray(counts, dtype=float), 1.0))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def validate_grid(eps_grid) -> list[float]:
    grid = [float(eps) for eps in eps_grid]
    if len(grid) < MIN_POINTS:
        raise SweepGridError(f'A sweep needs at least {MIN_POINTS} tolerances, got {len(grid)}')
    if any(not 0 < eps <= 1 for eps in grid):
        raise SweepGridError('Every tolerance must lie in (0, 1]')
    if any(later >= earlier for earlier, later in zip(grid, grid[1:])):
        raise SweepGridError('Tolerances must be strictly decreasing')
    if log10(grid[0] / grid[-1]) < MIN_DECADES - 1e-9:
        raise SweepGridError(f'Tolerances must span at least {MIN_DECADES:g} decades')
    return grid


def _sweep_point(args: tuple[str, dict, float]) -> SweepPoint:
    problem_name, config, epsilon = args
    problem = get_problem(problem_name)
    cfg = ArpccConfig.model_validate({**config, 'epsilon': epsilon})
    oracle = EvaluationOracle(problem)
    result = arpcc_minimize(CountedObjective(oracle), problem.feasible, cfg, problem.start_point(),
                            lipschitz=problem.lipschitz_for(cfg.p), f_low=problem.f_low, label='sweep')
    if result.status is ArpccStatus.BUDGET_EXCEEDED:
        raise SweepPointError(f'{problem_name} did not reach eps={epsilon:g} within {cfg.max_outer_iters} iterations')
    if result.status is ArpccStatus.NO_DESCENT:
        raise SweepPointError(f'{problem_name} stalled at chi={result.chi_eps:.3e} before reaching eps={epsilon:g}')
    return SweepPoint(
        epsilon=epsilon,
        successful_iters=result.successful,
        total_iters=result.iterations,
        f_values=result.counters.f_values,
        derivative_sets=result.counters.f_derivative_sets,
        status=result.status,
    )


def sweep(problem_name: str, p: int, eps_grid=DEFAULT_GRID, *, config: ArpccConfig | None = None,
          max_workers: int = 1) -> SweepResult:
    """Solve at every tolerance of the grid and fit the growth of successful iterations."""
    grid = validate_grid(eps_grid)
    problem = get_problem(problem_name)
    if problem.m:
        raise SweepGridError(f'{problem_name} has equality constraints; sweeps run ARpCC only')
    base = (config or ArpccConfig()).model_dump()
    base['p'] = p
    tasks = [(problem_name, base, eps) for eps in grid]
    if max_workers > 1:
        with Pool(processes=max_workers) as pool:
            points = pool.map(_sweep_point, tasks)
    else:
        points = [_sweep_point(task) for task in tasks]
    slope = fit_slope(grid, [point.successful_iters for point in points])
    bound = (p + 1) / p + SLOPE_SLACK
    logger.info('%s p=%d: slope %.3f against bound %.3f', problem_name, p, slope, bound)
    return SweepResult(problem=problem_name, p=p, points=points, slope=slope, bound=bound,
                       within_bound=slope <= bound)
