import numpy as np
import pytest

from controllers.derivatives import derivative_check
from controllers.oracle import CountedObjective, EvaluationOracle
from models import Problem, SmoothFunction, get_problem, list_problems
from models.errors import DimensionMismatchError, NonFiniteValueError, UnknownProblemError
from models.feasible import FeasibleSet
from models.registry import PROBLEMS, SeparableQuartic
from models.schemas import DerivativeReport
from models.tensors import SymTensor, TaylorData


class CorruptedHessian(SmoothFunction):
    def __init__(self, inner):
        self.inner = inner
        self.dim = inner.dim

    def eval_value(self, x):
        return self.inner.eval_value(x)

    def eval_taylor(self, x, p):
        taylor = self.inner.eval_taylor(x, p)
        if p < 2:
            return taylor
        derivs = list(taylor.derivs)
        bump = np.zeros_like(derivs[1].entries)
        bump[0] = 1e-2
        derivs[1] = SymTensor(2, self.dim, derivs[1].entries + bump)
        return TaylorData(taylor.value, tuple(derivs))


class NotANumber(SmoothFunction):
    dim = 1

    def eval_value(self, x):
        return float('nan')

    def eval_taylor(self, x, p):
        raise AssertionError('not used')


def test_registry_lists_every_problem():
    names = [problem.name for problem in list_problems()]
    assert names == list(PROBLEMS)
    assert {'quartic-box', 'rosenbrock-box', 'circle', 'powell-equality', 'infeasible'} <= set(names)


def test_unknown_problem():
    with pytest.raises(UnknownProblemError):
        get_problem('no-such-problem')


@pytest.mark.parametrize('name', list(PROBLEMS))
def test_registry_derivatives_pass_finite_differences(name):
    problem = get_problem(name)
    functions = [problem.objective, *problem.constraints]
    for seed in range(20):
        x = problem.start_point(seed)
        for function in functions:
            report = derivative_check(function, x, 3)
            assert report.passed, (name, seed, report.errors)


def test_corrupted_hessian_is_flagged():
    function = CorruptedHessian(SeparableQuartic([0.0, 0.0]))
    report = derivative_check(function, np.zeros(2), 3)
    assert report.flagged == [2]
    assert not report.passed
    assert report.model_dump()['flagged'] == [2]


def test_derivative_report_validates_tolerance():
    with pytest.raises(ValueError):
        DerivativeReport(tolerance=0.0)
    assert DerivativeReport(errors={1: 1e-9}).passed


def test_linear_function_has_exact_differences():
    problem = get_problem('linear-box')
    report = derivative_check(problem.objective, np.array([0.3, 0.7]), 3)
    assert max(report.errors.values()) <= 1e-8


def test_start_point_is_seeded_and_feasible():
    problem = get_problem('rosenbrock-box')
    np.testing.assert_allclose(problem.start_point(), [-1.2, 1.0])
    np.testing.assert_allclose(problem.start_point(7), problem.start_point(7))
    for seed in range(10):
        assert problem.feasible.contains(problem.start_point(seed, scale=5.0))


def test_problem_dimensions_are_checked():
    with pytest.raises(DimensionMismatchError):
        Problem(name='bad', objective=SeparableQuartic([0.0, 0.0]), feasible=FeasibleSet.whole_space(3),
                x_start=np.zeros(2), f_low=0.0)
    with pytest.raises(DimensionMismatchError):
        Problem(name='bad', objective=SeparableQuartic([0.0, 0.0]), feasible=FeasibleSet.whole_space(2),
                x_start=np.zeros(3), f_low=0.0)


def test_oracle_counts_each_call_once():
    oracle = EvaluationOracle(get_problem('circle'))
    assert oracle.eval_value_counted(0, np.array([1.0, 0.0])) == pytest.approx(0.0)
    assert oracle.counters.c_values == 1
    np.testing.assert_allclose(oracle.constraint_values(np.array([0.0, 2.0])), [3.0])
    assert oracle.counters.c_values == 2
    oracle.constraint_taylors(np.array([0.0, 2.0]), 2)
    assert oracle.counters.c_derivative_sets == 1
    assert oracle.objective_value(np.array([1.0, 2.0])) == pytest.approx(3.0)
    oracle.objective_taylor(np.array([1.0, 2.0]), 3)
    assert oracle.counters.model_dump() == {
        'f_values': 1, 'f_derivative_sets': 1, 'c_values': 2, 'c_derivative_sets': 1,
    }


def test_shadow_oracle_keeps_its_own_counters():
    problem = get_problem('circle')
    oracle = EvaluationOracle(problem)
    shadow = EvaluationOracle.shadow(problem)
    shadow.objective_value(np.zeros(2))
    assert oracle.counters.f_values == 0
    assert shadow.counters.f_values == 1


def test_counted_objective_routes_through_oracle():
    oracle = EvaluationOracle(get_problem('quartic-box'))
    objective = CountedObjective(oracle)
    objective.eval_value(np.zeros(3))
    objective.eval_taylor(np.zeros(3), 2)
    assert (oracle.counters.f_values, oracle.counters.f_derivative_sets) == (1, 1)


def test_non_finite_values_are_rejected():
    problem = Problem(name='nan', objective=NotANumber(), feasible=FeasibleSet.whole_space(1),
                      x_start=np.zeros(1), f_low=0.0)
    with pytest.raises(NonFiniteValueError):
        EvaluationOracle(problem).objective_value(np.zeros(1))
