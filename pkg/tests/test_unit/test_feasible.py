from itertools import product

import numpy as np
import pytest

from controllers.criticality import chi, kappa_n, pi
from models.errors import DimensionMismatchError, InfeasiblePointError
from models.feasible import FeasibleSet, SetVariant


@pytest.fixture
def unit_square():
    return FeasibleSet.box([0.0, 0.0], [2.0, 2.0])


def test_box_projection_and_membership(unit_square):
    np.testing.assert_allclose(unit_square.project([3.0, -1.0]), [2.0, 0.0])
    assert unit_square.contains([2.0, 0.0])
    assert unit_square.contains([2.0 + 1e-11, 0.0])
    assert not unit_square.contains([2.1, 0.0])


def test_whole_space_projection_is_identity():
    space = FeasibleSet.whole_space(3)
    assert space.variant is SetVariant.WHOLE_SPACE
    np.testing.assert_allclose(space.project([1e9, -3.0, 0.5]), [1e9, -3.0, 0.5])


def test_invalid_boxes_rejected():
    with pytest.raises(ValueError):
        FeasibleSet.box([1.0], [0.0])
    with pytest.raises(DimensionMismatchError):
        FeasibleSet.box([0.0, 0.0], [1.0])
    with pytest.raises(DimensionMismatchError):
        FeasibleSet.box([0.0], [1.0]).project([0.0, 1.0])


def test_chi_linear_min_example(unit_square):
    value, d = unit_square.chi_linear_min([0.0, 1.5], [-3.0, 2.0])
    assert value == pytest.approx(-5.0)
    np.testing.assert_allclose(d, [1.0, -1.0])


def test_chi_linear_min_matches_vertex_enumeration(rng):
    for _ in range(500):
        lower = rng.uniform(-2.0, 0.0, 2)
        upper = lower + rng.uniform(0.0, 3.0, 2)
        box = FeasibleSet.box(lower, upper)
        x = rng.uniform(lower, upper)
        g = rng.standard_normal(2)
        lo = np.maximum(lower - x, -1.0)
        hi = np.minimum(upper - x, 1.0)
        best = min(min(float(g @ np.array(corner)), 0.0) for corner in product(*zip(lo, hi)))
        value, d = box.chi_linear_min(x, g)
        assert value == pytest.approx(best, abs=1e-12)
        assert box.contains(x + d)
        assert np.max(np.abs(d)) <= 1.0


def test_projection_is_non_expansive(rng):
    box = FeasibleSet.box([-1.0, 0.0, 2.0], [1.0, 0.5, np.inf])
    for _ in range(1000):
        a, b = rng.normal(scale=3.0, size=(2, 3))
        assert np.linalg.norm(box.project(a) - box.project(b)) <= np.linalg.norm(a - b) + 1e-12


def test_chi_whole_space_is_l1_norm():
    space = FeasibleSet.whole_space(2)
    assert chi(np.array([3.0, -4.0]), np.zeros(2), space) == pytest.approx(7.0)
    assert chi(np.zeros(2), np.zeros(2), space) == 0.0


def test_pi_example():
    box = FeasibleSet.box([0.0], [2.0])
    assert pi(np.array([-1.0]), np.array([1.9]), box) == pytest.approx(0.1)


def test_chi_and_pi_vanish_together(rng):
    box = FeasibleSet.box([-1.0, -1.0, -1.0], [1.0, 1.0, 1.0])
    for _ in range(1000):
        x = rng.choice([-1.0, 0.3, 1.0], size=3)
        g = rng.choice([-1.0, 0.0, 1.0], size=3) * rng.uniform(0.5, 2.0, 3)
        assert (chi(g, x, box) == 0.0) == (pi(g, x, box) == 0.0)


def test_chi_is_positively_homogeneous(rng, unit_square):
    x = np.array([0.5, 2.0])
    g = rng.standard_normal(2)
    assert chi(3.5 * g, x, unit_square) == pytest.approx(3.5 * chi(g, x, unit_square))


def test_criticality_requires_feasible_point(unit_square):
    with pytest.raises(InfeasiblePointError):
        chi(np.ones(2), np.array([3.0, 0.0]), unit_square)
    with pytest.raises(InfeasiblePointError):
        pi(np.ones(2), np.array([3.0, 0.0]), unit_square)


def test_kappa_n():
    assert kappa_n(4) == pytest.approx(2.0)
