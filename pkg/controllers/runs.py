"""Solver runs as the CLI and HTTP surfaces launch them: problem, configuration, trace, replay."""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from models.errors import UnexpectedConstraintsError
from models.problems import Problem
from models.registry import get_problem
from models.schemas import ArpccConfig, ArpgcConfig, Certificate, EvalCounters, ReplayReport, SubsolverControls

from .arpcc import ArpccResult, arpcc_minimize
from .arpgc import solve_general, verify_certificate
from .oracle import CountedObjective, EvaluationOracle
from .traces import TraceSink, replay_check, write_trace

logger = logging.getLogger(__name__)


@dataclass
class ConvexRun:
    problem: Problem
    config: ArpccConfig
    result: ArpccResult
    sink: TraceSink
    replay: ReplayReport


@dataclass
class GeneralRun:
    problem: Problem
    config: ArpgcConfig
    certificate: Certificate
    verified: bool
    counters: EvalCounters
    sink: TraceSink
    replay: ReplayReport


def arpcc_config(p: int = 2, eps: float = 1e-6, sigma0: float = 1.0, theta: float = 100.0,
                 max_iters: int = 50_000, **overrides) -> ArpccConfig:
    """Build a validated configuration from flat surface parameters; None leaves the default."""
    fields = {key: value for key, value in overrides.items() if value is not None}
    return ArpccConfig(p=p, epsilon=eps, sigma0=sigma0, max_outer_iters=max_iters,
                       subsolver=SubsolverControls(theta=theta), **fields)


def arpgc_config(inner: ArpccConfig, eps_p: float = 1e-3, eps_d: float = 1e-3, delta: float = 2.0,
                 beta: float = 1.0) -> ArpgcConfig:
    return ArpgcConfig(eps_p=eps_p, eps_d=eps_d, delta=delta, beta=beta, inner=inner)


def run_convex(problem_name: str, cfg: ArpccConfig, seed: int | None = None,
               stream: TextIO | None = None) -> ConvexRun:
    problem = get_problem(problem_name)
    if problem.m:
        raise UnexpectedConstraintsError(f'{problem_name} has equality constraints: use solve-general')
    sink = TraceSink(stream=stream)
    oracle = EvaluationOracle(problem)
    result = arpcc_minimize(CountedObjective(oracle), problem.feasible, cfg, problem.start_point(seed),
                            counters=oracle.counters, sink=sink, label=problem.name,
                            lipschitz=problem.lipschitz_for(cfg.p), f_low=problem.f_low)
    return ConvexRun(problem, cfg, result, sink, replay_check(sink.records))


def run_general(problem_name: str, cfg: ArpgcConfig, seed: int | None = None,
                stream: TextIO | None = None) -> GeneralRun:
    problem = get_problem(problem_name)
    sink = TraceSink(stream=stream)
    oracle = EvaluationOracle(problem)
    certificate = solve_general(problem, cfg, problem.start_point(seed), oracle=oracle, sink=sink)
    verified = verify_certificate(problem, certificate, cfg)
    return GeneralRun(problem, cfg, certificate, verified, oracle.counters.snapshot(), sink,
                      replay_check(sink.records))


def persist_trace(sink: TraceSink, directory: str | None) -> Path | None:
    if not directory:
        return None
    path = Path(directory) / f'{sink.run_id}.jsonl'
    path.parent.mkdir(parents=True, exist_ok=True)
    write_trace(path, sink.records)
    logger.info('Trace written to %s', path)
    return path
