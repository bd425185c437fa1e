"""Command-line entry points for the solvers, trace replay and tolerance sweeps."""
import logging
import sys

import click
from dotenv import dotenv_values
from pydantic import ValidationError

from controllers import (
    arpcc_config,
    arpgc_config,
    read_trace,
    replay_check,
    run_convex,
    run_general,
    sweep,
    write_trace,
)
from models import list_problems, settings
from models.errors import SolverError, UnknownProblemError
from models.schemas import ArpccStatus, CertificateStatus

logger = logging.getLogger(__name__)

COMMANDS = ('solve-convex', 'solve-general', 'check-trace', 'sweep', 'list-problems')


def _load_config(path: str) -> dict[str, str]:
    values = dotenv_values(path)
    return {key.strip().lstrip('-').replace('-', '_'): value for key, value in values.items() if value is not None}


def _validation_message(error: ValidationError) -> str:
    return '; '.join(f'{".".join(str(part) for part in err["loc"]) or "config"}: {err["msg"]}'
                     for err in error.errors())


class _SolverErrors:
    """Translate domain and validation failures into click errors."""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is None:
            return False
        if isinstance(exc, ValidationError):
            raise click.UsageError(_validation_message(exc))
        if isinstance(exc, UnknownProblemError):
            raise click.UsageError(str(exc))
        if isinstance(exc, SolverError):
            raise click.ClickException(str(exc))
        return False


def solver_options(func):
    options = [
        click.option('--problem', required=True, help='Registry problem name.'),
        click.option('--p', 'p', type=click.IntRange(1, 3), default=2, show_default=True, help='Model order.'),
        click.option('--sigma0', type=float, default=1.0, show_default=True),
        click.option('--sigma-min', type=float, default=None),
        click.option('--theta', type=float, default=100.0, show_default=True),
        click.option('--gamma1', type=float, default=None),
        click.option('--gamma2', type=float, default=None),
        click.option('--gamma3', type=float, default=None),
        click.option('--eta1', type=float, default=None),
        click.option('--eta2', type=float, default=None),
        click.option('--max-iters', type=int, default=50_000, show_default=True),
        click.option('--seed', type=int, default=None, help='Perturb the default start point.'),
        click.option('--trace-out', type=click.Path(dir_okay=False, writable=True), default=None),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _inner_config(p, eps, sigma0, sigma_min, theta, gamma1, gamma2, gamma3, eta1, eta2, max_iters):
    return arpcc_config(p=p, eps=eps, sigma0=sigma0, theta=theta, max_iters=max_iters, sigma_min=sigma_min,
                        gamma1=gamma1, gamma2=gamma2, gamma3=gamma3, eta1=eta1, eta2=eta2)


@click.group()
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='key=value file mirroring the flags; flags win.')
@click.option('--log-level', default=settings.LOG_LEVEL, show_default=True,
              type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False))
@click.pass_context
def cli(ctx, config_path, log_level):
    logging.basicConfig(level=log_level.upper(), stream=sys.stderr)
    if config_path:
        values = _load_config(config_path)
        ctx.default_map = {command: dict(values) for command in COMMANDS}


@cli.command('solve-convex')
@solver_options
@click.option('--eps', type=float, default=1e-6, show_default=True, help='Criticality tolerance.')
def solve_convex(problem, p, sigma0, sigma_min, theta, gamma1, gamma2, gamma3, eta1, eta2, max_iters, seed,
                 trace_out, eps):
    """Minimize a bound-constrained registry problem with ARpCC."""
    with _SolverErrors():
        cfg = _inner_config(p, eps, sigma0, sigma_min, theta, gamma1, gamma2, gamma3, eta1, eta2, max_iters)
        run = run_convex(problem, cfg, seed=seed)
    result = run.result
    if trace_out:
        write_trace(trace_out, run.sink.records)
    click.echo(f'problem: {problem}  p={p}  eps={eps:g}')
    click.echo(f'status: {result.status.value}')
    click.echo(f'x_eps: {result.x_eps.tolist()}')
    click.echo(f'f(x_eps) = {result.f_eps:.12g}   chi = {result.chi_eps:.3e}')
    click.echo(f'iterations: {result.iterations} ({result.successful} successful)')
    click.echo(f'evaluations: {result.counters.f_values} values, {result.counters.f_derivative_sets} derivative sets')
    click.echo(f'replay: {"passed" if run.replay.passed else "FAILED " + ", ".join(run.replay.failed_checks)}')
    if result.status is not ArpccStatus.CRITICALITY_REACHED or not run.replay.passed:
        sys.exit(1)


@cli.command('solve-general')
@solver_options
@click.option('--eps-p', type=float, default=1e-3, show_default=True, help='Primal tolerance.')
@click.option('--eps-d', type=float, default=1e-3, show_default=True, help='Dual tolerance.')
@click.option('--delta', type=float, default=2.0, show_default=True)
@click.option('--beta', type=float, default=1.0, show_default=True)
def solve_general(problem, p, sigma0, sigma_min, theta, gamma1, gamma2, gamma3, eta1, eta2, max_iters, seed,
                  trace_out, eps_p, eps_d, delta, beta):
    """Solve an equality-constrained registry problem with the two-phase ARpGC driver."""
    with _SolverErrors():
        inner = _inner_config(p, 1.0, sigma0, sigma_min, theta, gamma1, gamma2, gamma3, eta1, eta2, max_iters)
        cfg = arpgc_config(inner, eps_p=eps_p, eps_d=eps_d, delta=delta, beta=beta)
        run = run_general(problem, cfg, seed=seed)
    certificate = run.certificate
    if trace_out:
        write_trace(trace_out, run.sink.records)
    click.echo(f'problem: {problem}  p={p}  eps_p={eps_p:g}  eps_d={eps_d:g}')
    click.echo(f'certificate: {certificate.status.value} (phase {certificate.phase})')
    click.echo(f'x_eps: {certificate.x_eps}')
    click.echo(f'||c|| = {certificate.c_norm:.3e}')
    if certificate.status is CertificateStatus.SCALED_KKT:
        click.echo(f'y_eps: {certificate.y_eps}   chi_lagrangian = {certificate.chi_lagrangian:.3e}')
    else:
        click.echo(f'chi_infeasibility = {certificate.chi_infeasibility:.3e}')
    counters = run.counters
    click.echo(f'evaluations: f {counters.f_values}/{counters.f_derivative_sets}, '
               f'c {counters.c_values}/{counters.c_derivative_sets}')
    click.echo(f'verified: {run.verified}')
    click.echo(f'replay: {"passed" if run.replay.passed else "FAILED " + ", ".join(run.replay.failed_checks)}')
    if not run.verified or not run.replay.passed:
        sys.exit(1)


@cli.command('check-trace')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
def check_trace(path):
    """Replay every invariant recorded in a JSON Lines trace."""
    with _SolverErrors():
        report = replay_check(read_trace(path))
    for warning in report.warnings:
        click.echo(f'warning: {warning}')
    for name, outcome in report.checks.items():
        state = 'pass' if outcome.passed else 'FAIL'
        click.echo(f'{state:4}  {name:24} {outcome.checked} checked')
        for failure in outcome.failures[:5]:
            click.echo(f'      {failure}')
    if not report.passed:
        sys.exit(1)


@cli.command('sweep')
@click.option('--problem', required=True)
@click.option('--p', 'p', type=click.IntRange(1, 3), default=2, show_default=True)
@click.option('--eps-grid', default='1e-2,1e-3,1e-4,1e-5,1e-6', show_default=True,
              help='Comma-separated, strictly decreasing tolerances.')
@click.option('--workers', type=click.IntRange(1), default=1, show_default=True)
def sweep_command(problem, p, eps_grid, workers):
    """Fit how successful iterations grow as the tolerance shrinks."""
    try:
        grid = [float(value) for value in eps_grid.split(',') if value.strip()]
    except ValueError:
        raise click.BadParameter('tolerances must be numbers', param_hint='--eps-grid')
    with _SolverErrors():
        result = sweep(problem, p, grid, max_workers=workers)
    click.echo(f'{"eps":>10} {"successful":>10} {"total":>8} {"values":>8} {"derivs":>8}')
    for point in result.points:
        click.echo(f'{point.epsilon:10.1e} {point.successful_iters:10d} {point.total_iters:8d} '
                   f'{point.f_values:8d} {point.derivative_sets:8d}')
    click.echo(f'slope {result.slope:.4f}  bound {result.bound:.4f}  '
               f'{"within bound" if result.within_bound else "ABOVE BOUND"}')
    if not result.within_bound:
        sys.exit(1)


@cli.command('list-problems')
def list_problems_command():
    """Show the built-in problems."""
    for problem in list_problems():
        upper = '' if problem.f_up is None else f'  f_up={problem.f_up:.6g}'
        click.echo(f'{problem.name:16} n={problem.dim} m={problem.m} {problem.feasible.variant.value:10} '
                   f'f_low={problem.f_low:g}{upper}  {problem.description}')


if __name__ == '__main__':
    cli()
