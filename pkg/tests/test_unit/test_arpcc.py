import numpy as np
import pytest

from controllers.arpcc import arpcc_minimize, classify, kappa_s, kappa_u, sigma_update
from controllers.criticality import chi
from controllers.oracle import CountedObjective, EvaluationOracle
from controllers.runs import arpcc_config, run_convex
from models import Problem, SmoothFunction
from models.feasible import FeasibleSet
from models.registry import LinearFunction
from models.schemas import ArpccConfig, ArpccStatus, EvalCounters, IterationOutcome
from models.tensors import TaylorData


class HalfSquare(SmoothFunction):
    dim = 1

    def __init__(self, offset=0.0):
        self.offset = offset

    def eval_value(self, x):
        x = self._as_point(x)
        return self.offset + 0.5 * float(x @ x)

    def eval_taylor(self, x, p):
        x = self._as_point(x)
        return TaylorData.from_dense(self.offset + 0.5 * float(x @ x), x, np.eye(1), p=p)


def half_square_problem(x0, offset=0.0):
    return Problem(name='half-square', objective=HalfSquare(offset), feasible=FeasibleSet.whole_space(1),
                   x_start=np.array([x0]), f_low=offset)


def minimize(problem, cfg):
    oracle = EvaluationOracle(problem)
    result = arpcc_minimize(CountedObjective(oracle), problem.feasible, cfg, problem.x_start,
                            counters=oracle.counters)
    return result, oracle.counters


@pytest.mark.parametrize(('rho', 'outcome'), [
    (0.95, IterationOutcome.VERY_SUCCESSFUL),
    (0.5, IterationOutcome.SUCCESSFUL),
    (0.01, IterationOutcome.SUCCESSFUL),
    (0.005, IterationOutcome.UNSUCCESSFUL),
    (None, IterationOutcome.UNSUCCESSFUL),
])
def test_classify(rho, outcome):
    assert classify(rho, ArpccConfig()) is outcome


def test_sigma_update_examples():
    cfg = ArpccConfig(sigma_min=0.1)
    assert sigma_update(2.0, 0.95, cfg) == pytest.approx(1.0)
    assert sigma_update(2.0, 0.5, cfg) == 2.0
    assert sigma_update(2.0, -1.0, cfg) == pytest.approx(4.0)
    assert sigma_update(2.0, None, cfg) == pytest.approx(4.0)
    assert sigma_update(0.15, 0.99, cfg) == pytest.approx(0.1)


def test_kappa_u_examples():
    assert kappa_u(0.5, 2.0, 1.0, 1.0) == pytest.approx(2.0)
    assert kappa_u(0.5, 2.0, 1.0, 2.0) == pytest.approx(3.0)
    assert kappa_u(1.0, 2.0, 1.0, 2.0) == pytest.approx(2.0)


def test_kappa_s_examples():
    assert kappa_s(1, 1.0, 1.0, 1.0, 0.1, 0.2, 0.2) == pytest.approx(2.0)
    assert kappa_s(1, 2.0, 1.0, 1.0, 0.1, 0.2, 0.2) == pytest.approx(1.0)
    eta1, sigma_min = 0.01, 0.5
    assert kappa_s(2, eta1, sigma_min, 1.0, 0.1, 0.2, 0.2) == pytest.approx(3.0 / (eta1 * sigma_min))


def test_half_square_converges():
    cfg = ArpccConfig(p=2, epsilon=1e-6)
    result, _ = minimize(half_square_problem(4.0), cfg)
    assert result.status is ArpccStatus.CRITICALITY_REACHED
    assert abs(result.x_eps[0]) <= 1e-6
    assert result.chi_eps <= 1e-6


def test_critical_start_costs_one_evaluation_of_each_kind():
    result, counters = minimize(half_square_problem(0.0), ArpccConfig(p=2))
    assert result.status is ArpccStatus.CRITICALITY_REACHED
    assert result.iterations == 0
    np.testing.assert_allclose(result.x_eps, [0.0])
    assert counters == EvalCounters(f_values=1, f_derivative_sets=1)


def test_linear_objective_on_box_reaches_vertex():
    problem = Problem(name='ramp', objective=LinearFunction([1.0]), feasible=FeasibleSet.box([0.0], [1.0]),
                      x_start=np.array([1.0]), f_low=0.0)
    result, _ = minimize(problem, ArpccConfig(p=1, epsilon=1e-8))
    assert result.status is ArpccStatus.CRITICALITY_REACHED
    np.testing.assert_allclose(result.x_eps, [0.0], atol=1e-12)


def test_start_is_projected():
    problem = Problem(name='ramp', objective=LinearFunction([1.0]), feasible=FeasibleSet.box([0.0], [1.0]),
                      x_start=np.array([5.0]), f_low=0.0)
    oracle = EvaluationOracle(problem)
    result = arpcc_minimize(CountedObjective(oracle), problem.feasible, ArpccConfig(p=1, max_outer_iters=1),
                            np.array([5.0]))
    assert result.trace[0].x_k[0] == 1.0


def test_custom_predicate_stops_at_accepted_iterate():
    stops = []

    def stop(x, value, gradient):
        stops.append(value)
        return value < 1.0

    problem = half_square_problem(4.0)
    oracle = EvaluationOracle(problem)
    result = arpcc_minimize(CountedObjective(oracle), problem.feasible, ArpccConfig(p=2), problem.x_start, stop,
                            check_criticality=False)
    assert result.status is ArpccStatus.CUSTOM_PREDICATE
    assert result.f_eps < 1.0
    assert stops[0] == pytest.approx(8.0)


def test_budget_is_reported_as_status():
    result, _ = minimize(half_square_problem(4.0), ArpccConfig(p=1, sigma0=1e6, max_outer_iters=3))
    assert result.status is ArpccStatus.BUDGET_EXCEEDED
    assert result.iterations == 3


def test_large_offset_stops_with_no_descent_status():
    cfg = ArpccConfig(p=1, sigma0=4.0, gamma1=0.9, epsilon=1e-6)
    result, _ = minimize(half_square_problem(1.0, offset=1e8), cfg)
    assert result.status is ArpccStatus.NO_DESCENT
    assert result.chi_eps > cfg.epsilon
    assert result.iterations > 0
    assert any(record.f_trial is None for record in result.trace)
    assert result.f_eps <= 1e8 + 0.5


def test_iteration_records_follow_the_update_rules():
    cfg = ArpccConfig(p=2, epsilon=1e-6)
    result, _ = minimize(half_square_problem(40.0), cfg)
    for record, following in zip(result.trace, result.trace[1:]):
        assert record.sigma_next == pytest.approx(sigma_update(record.sigma_k, record.rho_k, cfg))
        assert following.sigma_k == record.sigma_next
        if record.outcome is IterationOutcome.UNSUCCESSFUL:
            np.testing.assert_array_equal(following.x_k, record.x_k)
        else:
            assert following.f_k == record.f_trial < record.f_k
    assert result.successful <= result.iterations


CONVEX_CASES = [
    (name, p, eps)
    for name in ('quartic-box', 'rosenbrock-box')
    for p in (1, 2, 3)
    for eps in (1e-2, 1e-4, 1e-6)
]


@pytest.mark.parametrize(('name', 'p', 'eps'), CONVEX_CASES)
def test_bound_constrained_registry_problems(name, p, eps):
    run = run_convex(name, arpcc_config(p=p, eps=eps, max_iters=200_000))
    result = run.result
    assert result.status is ArpccStatus.CRITICALITY_REACHED
    gradient = run.problem.objective.eval_taylor(result.x_eps, 1).gradient
    assert chi(gradient, result.x_eps, run.problem.feasible) <= eps + 1e-12
    assert run.replay.passed, run.replay.failed_checks


def test_rosenbrock_box_finds_the_bound_solution():
    run = run_convex('rosenbrock-box', arpcc_config(p=2, eps=1e-6))
    np.testing.assert_allclose(run.result.x_eps, [0.5, 0.25], atol=1e-6)
