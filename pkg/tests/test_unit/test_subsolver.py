import numpy as np
import pytest

from controllers.reg_model import ModelState, model_decrease
from controllers.subsolver import solve_subproblem, verify_step
from models import get_problem
from models.errors import InnerBudgetExceededError, NoDescentError
from models.feasible import FeasibleSet
from models.schemas import SubsolverControls
from models.tensors import SymTensor, TaylorData


def first_order(x, g, sigma):
    return ModelState(np.array([x]), TaylorData(0.0, (SymTensor.from_vector([g]),)), sigma=sigma)


def test_unconstrained_linear_model():
    model = first_order(0.0, 2.0, 1.0)
    controls = SubsolverControls(theta=0.5)
    s = solve_subproblem(model, FeasibleSet.whole_space(1), controls)
    np.testing.assert_allclose(s, [-2.0], atol=1e-8)
    assert verify_step(model, FeasibleSet.whole_space(1), controls, s).satisfied


def test_step_into_half_line():
    half_line = FeasibleSet.box([0.0], [np.inf])
    model = first_order(0.0, -1.0, 1.0)
    s = solve_subproblem(model, half_line, SubsolverControls(theta=0.5))
    np.testing.assert_allclose(s, [1.0], atol=1e-8)


def test_no_descent_at_critical_bound():
    half_line = FeasibleSet.box([0.0], [np.inf])
    with pytest.raises(NoDescentError):
        solve_subproblem(first_order(0.0, 1.0, 1.0), half_line, SubsolverControls(theta=0.5))


@pytest.mark.parametrize('name', ['quartic-box', 'rosenbrock-box', 'quartic-bowl'])
@pytest.mark.parametrize('p', [1, 2, 3])
@pytest.mark.parametrize('sigma', [0.1, 1.0, 50.0])
def test_registry_steps_meet_step_conditions(name, p, sigma):
    problem = get_problem(name)
    x = problem.start_point()
    model = ModelState(x, problem.objective.eval_taylor(x, p), sigma)
    controls = SubsolverControls()
    s = solve_subproblem(model, problem.feasible, controls)
    check = verify_step(model, problem.feasible, controls, s)
    assert check.satisfied
    assert model_decrease(model, s) >= sigma / (p + 1) * check.step_norm ** (p + 1) - 1e-12


def test_inner_budget():
    problem = get_problem('quartic-box')
    x = problem.start_point()
    model = ModelState(x, problem.objective.eval_taylor(x, 2), 1.0)
    with pytest.raises(InnerBudgetExceededError):
        solve_subproblem(model, problem.feasible, SubsolverControls(max_inner_iters=1))
