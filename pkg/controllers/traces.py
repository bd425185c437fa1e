"""Trace persistence (JSON Lines) and replay of the per-run invariants."""
import logging
import threading
import uuid
from collections import defaultdict
from collections.abc import Iterable
from math import floor, sqrt
from pathlib import Path
from typing import TextIO

from pydantic import ValidationError

from models.errors import TraceFormatError
from models.schemas import CheckOutcome, EvalCounters, IterationOutcome, ReplayReport, TraceRecord

from .arpcc import DECREASE_GUARD, kappa_s, kappa_u

logger = logging.getLogger(__name__)

CHECK_NAMES = (
    'sub-problem',
    'model-decrease',
    'outcome',
    'sigma-update',
    'monotone-objective',
    'successful-fraction',
    'decrease-vs-criticality',
    'complexity-bound',
    'sigma-bound',
    'counter-replay',
    'target-decrease',
    'target-below-objective',
    'residual-level',
    'approximate-feasibility',
    'outer-count',
    'residual-monotone',
    'termination-conditions',
)

ABS_TOL = 1e-12
RESIDUAL_TOL = 1e-9
SIGMA_REL_TOL = 1e-12
CHI_MODEL_SLACK = 1e-12
COMPONENT_COUNTERS = {'f': ('f_values', 'f_derivative_sets'), 'c': ('c_values', 'c_derivative_sets')}


class TraceSink:
    """Collects the records of one run; optionally streams each one as a JSON line."""

    def __init__(self, run_id: str | None = None, stream: TextIO | None = None):
        self.run_id = run_id or uuid.uuid4().hex
        self.stream = stream
        self.records: list[TraceRecord] = []
        self._segments = 0
        self._lock = threading.Lock()

    def open_segment(self) -> int:
        with self._lock:
            segment = self._segments
            self._segments += 1
            return segment

    def emit(self, segment: int, iteration: int, kind: str, payload: dict, counters: EvalCounters):
        record = TraceRecord(run_id=self.run_id, segment=segment, iteration=iteration, kind=kind,
                             payload=payload, counters=counters.snapshot())
        with self._lock:
            self.records.append(record)
            if self.stream is not None:
                self.stream.write(record.model_dump_json() + '\n')


def dump_records(records: Iterable[TraceRecord]) -> str:
    return ''.join(record.model_dump_json() + '\n' for record in records)


def parse_records(text: str | bytes) -> list[TraceRecord]:
    if isinstance(text, bytes):
        try:
            text = text.decode('utf-8')
        except UnicodeDecodeError as exc:
            raise TraceFormatError(f'Trace is not valid UTF-8: byte {exc.start} cannot be decoded') from exc
    records = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(TraceRecord.model_validate_json(line))
        except ValidationError as exc:
            raise TraceFormatError(f'Malformed trace record on line {number}: {exc.errors()[0]["msg"]}') from exc
    return records


def write_trace(path: str | Path, records: Iterable[TraceRecord]):
    Path(path).write_text(dump_records(records), encoding='utf-8')


def read_trace(path: str | Path) -> list[TraceRecord]:
    return parse_records(Path(path).read_bytes())


class _Checker:
    def __init__(self):
        self.report = ReplayReport(checks={name: CheckOutcome() for name in CHECK_NAMES})

    def check(self, name: str, condition: bool, message: str):
        outcome = self.report.checks[name]
        outcome.checked += 1
        if not condition:
            outcome.passed = False
            outcome.failures.append(message)

    def warn(self, message: str):
        logger.warning(message)
        self.report.warnings.append(message)


def _expected_sigma(sigma: float, rho: float | None, config: dict) -> float:
    if rho is None or rho < config['eta1']:
        return config['gamma2'] * sigma
    if rho > config['eta2']:
        return max(config['sigma_min'], config['gamma1'] * sigma)
    return sigma


def _expected_outcome(rho: float | None, config: dict) -> str:
    if rho is None or rho < config['eta1']:
        return IterationOutcome.UNSUCCESSFUL.value
    if rho > config['eta2']:
        return IterationOutcome.VERY_SUCCESSFUL.value
    return IterationOutcome.SUCCESSFUL.value


def _close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b)) + 1e-300


def _check_iterations(checker: _Checker, segment: int, config: dict, iterations: list[dict]):
    p = config['p']
    theta = config['theta']
    for index, it in enumerate(iterations):
        tag = f'segment {segment} k={it["k"]}'
        chi_model = it['chi_model']
        checker.check('sub-problem',
                      it['trial_feasible'] and it['model_change'] < 0 and chi_model is not None
                      and chi_model <= theta * it['step_norm'] ** p + CHI_MODEL_SLACK,
                      f'{tag}: step violates the subproblem conditions')
        reg = it['sigma_k'] / (p + 1) * it['step_norm'] ** (p + 1)
        checker.check('model-decrease', it['model_decrease'] >= reg - ABS_TOL,
                      f'{tag}: model decrease {it["model_decrease"]!r} below {reg!r}')
        guard = it['model_decrease'] <= DECREASE_GUARD * max(1.0, abs(it['f_k']))
        checker.check('outcome',
                      it['outcome'] == _expected_outcome(it['rho_k'], config) and it['evaluated_trial'] != guard,
                      f'{tag}: outcome {it["outcome"]} inconsistent with rho={it["rho_k"]!r}')
        expected = _expected_sigma(it['sigma_k'], it['rho_k'], config)
        checker.check('sigma-update', _close(it['sigma_next'], expected, SIGMA_REL_TOL),
                      f'{tag}: sigma {it["sigma_k"]!r} -> {it["sigma_next"]!r}, expected {expected!r}')
        if index + 1 < len(iterations):
            following = iterations[index + 1]
            checker.check('sigma-update', _close(following['sigma_k'], it['sigma_next'], SIGMA_REL_TOL),
                          f'{tag}: next iteration starts from sigma {following["sigma_k"]!r}')
            accepted = it['outcome'] != IterationOutcome.UNSUCCESSFUL.value
            next_value = it['f_trial'] if accepted else it['f_k']
            checker.check('monotone-objective', following['f_k'] == next_value,
                          f'{tag}: next iterate value does not match the accepted trial')
        if it['outcome'] != IterationOutcome.UNSUCCESSFUL.value:
            checker.check('monotone-objective', it['f_trial'] < it['f_k'],
                          f'{tag}: accepted trial does not decrease the objective')


def _check_segment(checker: _Checker, segment: int, records: list[TraceRecord]):
    config_record = next((r for r in records if r.kind == 'run-config'), None)
    if config_record is None or config_record.payload.get('solver') != 'arpcc':
        return
    config = config_record.payload
    iterations = [r.payload for r in records if r.kind == 'arpcc-iter']
    end = next((r for r in records if r.kind == 'arpcc-end'), None)
    _check_iterations(checker, segment, config, iterations)
    if end is None:
        checker.warn(f'segment {segment} has no end record; accounting checks skipped')
        return

    p = config['p']
    total = len(iterations)
    successful = [it for it in iterations if it['outcome'] != IterationOutcome.UNSUCCESSFUL.value]
    sigmas = [config['sigma0']] + [it['sigma_k'] for it in iterations] + [it['sigma_next'] for it in iterations]
    sigma_observed = max(sigmas)
    bound_u = kappa_u(config['gamma1'], config['gamma2'], config['sigma0'], sigma_observed)
    checker.check('successful-fraction', total <= bound_u * max(len(successful), 1) + 1,
                  f'segment {segment}: {total} iterations exceed kappa_u={bound_u:.6g} times {len(successful)}')

    if config['label'] == 'phase-2':
        values = [it['f_k'] for it in iterations] + [end.payload['f_eps']]
        residuals = [sqrt(2.0 * max(value, 0.0)) for value in values]
        for before, after in zip(residuals, residuals[1:]):
            checker.check('residual-monotone', after <= before * (1 + ABS_TOL) + ABS_TOL,
                          f'segment {segment}: ||r|| rose from {before!r} to {after!r}')

    start_counts = config_record.counters
    end_counts = end.counters
    deltas = end_counts.minus(start_counts)
    components = config.get('components') or []
    evaluated = sum(1 for it in iterations if it['evaluated_trial'])
    for component, (values_name, sets_name) in COMPONENT_COUNTERS.items():
        expected_values = 1 + evaluated if component in components else 0
        expected_sets = 1 + len(successful) if component in components else 0
        checker.check('counter-replay',
                      deltas[values_name] == expected_values and deltas[sets_name] == expected_sets,
                      f'segment {segment}: {component} counters moved by {deltas[values_name]}/{deltas[sets_name]},'
                      f' expected {expected_values}/{expected_sets}')

    lipschitz = config.get('lipschitz')
    if lipschitz is None:
        return
    guard_trips = any(not it['evaluated_trial'] for it in iterations)
    sigma_cap = max(config['sigma0'], config['gamma3'] * lipschitz * (p + 1) / (p * (1 - config['eta2'])))
    if guard_trips:
        checker.warn(f'segment {segment}: decrease guard tripped; sigma bound not applicable')
    else:
        checker.check('sigma-bound', sigma_observed <= sigma_cap * (1 + SIGMA_REL_TOL),
                      f'segment {segment}: sigma reached {sigma_observed!r} above {sigma_cap!r}')
    constant = kappa_s(p, config['eta1'], config['sigma_min'], sqrt(config['dim']), lipschitz, config['theta'],
                       max(sigma_cap, sigma_observed))
    exponent = (p + 1) / p
    for index, it in enumerate(iterations):
        if it['outcome'] == IterationOutcome.UNSUCCESSFUL.value:
            continue
        chi_next = iterations[index + 1]['chi_k'] if index + 1 < len(iterations) else end.payload['chi_eps']
        decrease = it['f_k'] - it['f_trial']
        checker.check('decrease-vs-criticality', decrease >= chi_next**exponent / constant - ABS_TOL,
                      f'segment {segment} k={it["k"]}: decrease {decrease!r} below the criticality bound')
    epsilon = config.get('epsilon')
    f_low = config.get('f_low')
    if epsilon is not None and f_low is not None and iterations:
        f0 = iterations[0]['f_k']
        allowed = floor(constant * (f0 - f_low) / epsilon**exponent)
        checker.check('complexity-bound', len(successful) <= allowed,
                      f'segment {segment}: {len(successful)} successful iterations exceed {allowed}')


def _check_targets(checker: _Checker, config: dict, targets: list[dict]):
    p = config['p']
    eps_p = config['eps_p']
    exponent = (p + 1) / p
    threshold = eps_p - eps_p**exponent
    dual_target = eps_p * config['eps_d']
    plus = 0
    for target in targets:
        tag = f'target {target["k"]} ({target["kind"]})'
        kind = target['kind']
        t_next = target['t_next']
        f_next = target['f_next']
        if kind in ('K_plus', 'K_minus'):
            checker.check('target-decrease', t_next < target['t_k'], f'{tag}: target did not decrease')
        if kind == 'K_plus':
            plus += 1
            checker.check('target-decrease', target['t_k'] - t_next >= eps_p**exponent - ABS_TOL,
                          f'{tag}: drop {target["t_k"] - t_next!r} below eps_p^((p+1)/p)')
        checker.check('target-below-objective', f_next - t_next >= -ABS_TOL, f'{tag}: f - t = {f_next - t_next!r}')
        if kind in ('initial', 'K_plus'):
            checker.check('residual-level', abs(target['r_norm_at_t_next'] - eps_p) <= RESIDUAL_TOL,
                          f'{tag}: ||r|| = {target["r_norm_at_t_next"]!r}, expected eps_p')
        elif kind == 'K_minus':
            checker.check('residual-level',
                          abs(target['r_norm_at_t_next'] - target['r_norm_at_t_k']) <= RESIDUAL_TOL
                          and target['r_norm_at_t_next'] <= eps_p + RESIDUAL_TOL,
                          f'{tag}: reflected target changed ||r||')
        checker.check('approximate-feasibility',
                      target['c_norm_next'] <= eps_p + RESIDUAL_TOL and f_next - t_next <= eps_p + RESIDUAL_TOL,
                      f'{tag}: ||c||={target["c_norm_next"]!r}, f - t={f_next - t_next!r}')
        if target.get('terminate'):
            checker.check('termination-conditions',
                          target['r_norm_at_t_next'] >= threshold - ABS_TOL and f_next >= t_next - ABS_TOL
                          and target['chi_mu_at_t_next'] <= dual_target + ABS_TOL,
                          f'{tag}: termination conditions do not hold')
    f_up = config.get('f_up')
    if f_up is not None:
        allowed = (f_up - config['f_low'] + 1) * eps_p ** (-exponent)
        checker.check('outer-count', plus <= allowed, f'{plus} target updates exceed {allowed:.6g}')


def replay_check(records: list[TraceRecord]) -> ReplayReport:
    """Re-evaluate every recorded invariant; checks with nothing to inspect pass vacuously."""
    checker = _Checker()
    if not records:
        checker.warn('Empty trace: nothing to check')
        return checker.report
    by_segment: dict[tuple[str, int], list[TraceRecord]] = defaultdict(list)
    for record in records:
        by_segment[(record.run_id, record.segment)].append(record)
    for (run_id, segment), segment_records in by_segment.items():
        _check_segment(checker, segment, segment_records)
        config_record = next((r for r in segment_records if r.kind == 'run-config'), None)
        targets = [r.payload for r in segment_records if r.kind == 'arpgc-target']
        if config_record is not None and config_record.payload.get('solver') == 'arpgc':
            _check_targets(checker, config_record.payload, sorted(targets, key=lambda t: t['k']))
        elif targets:
            checker.warn(f'run {run_id} segment {segment}: target records without a configuration; skipped')
    report = checker.report
    if report.passed:
        logger.info('Replay passed %d checks', sum(c.checked for c in report.checks.values()))
    else:
        logger.warning('Replay failed: %s', ', '.join(report.failed_checks))
    return report


def report_to_json(report: ReplayReport) -> str:
    return report.model_dump_json(indent=2)
