import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mofista import (CustomNonsmooth, EvaluationError, ProblemInstance,
                     WeightedL1, Zero, builtin_problem, evaluate_objectives,
                     pareto_leq, pareto_lt, prox_nonsmooth)

finite = st.floats(-1e6, 1e6, allow_nan=False)
vectors = st.lists(finite, min_size=1, max_size=5).map(np.array)
steps = st.floats(1e-6, 1e3)
weights = st.floats(0.0, 10.0)


def test_zero_prox_is_identity():
    v = np.array([3.0, -2.0])
    assert np.array_equal(prox_nonsmooth(Zero(), 1.0, v), v)


def test_l1_prox_soft_threshold_example():
    got = prox_nonsmooth(WeightedL1(1.0), 0.5, np.array([1.2, -0.3]))
    np.testing.assert_allclose(got, [0.7, 0.0], atol=1e-15)


@given(vectors, steps)
def test_l1_weight_zero_reduces_to_identity(v, t):
    assert np.array_equal(prox_nonsmooth(WeightedL1(0.0), t, v), v)


@pytest.mark.parametrize("t", [0.0, -1.0])
def test_prox_rejects_nonpositive_step(t):
    for part in (Zero(), WeightedL1(1.0)):
        with pytest.raises(ValueError):
            prox_nonsmooth(part, t, np.zeros(2))


def test_l1_negative_weight_rejected():
    with pytest.raises(ValueError):
        WeightedL1(-0.5)


def test_l1_prox_beats_grid():
    # g(y) + (1/(2t))(v - y)^2 on a dense 1-D grid never beats the prox point.
    w, t, v = 0.7, 0.4, 1.1
    p = prox_nonsmooth(WeightedL1(w), t, np.array([v]))[0]
    grid = np.linspace(-2.0, 2.0, 40001)
    vals = w * np.abs(grid) + (grid - v) ** 2 / (2.0 * t)
    assert w * abs(p) + (p - v) ** 2 / (2.0 * t) <= vals.min() + 1e-12


@given(vectors, steps, weights)
def test_l1_prox_subgradient_optimality(v, t, w):
    p = prox_nonsmooth(WeightedL1(w), t, v)
    level = t * w
    on = p != 0.0
    np.testing.assert_allclose(v[on] - p[on], level * np.sign(p[on]),
                               atol=1e-9 * (1.0 + level))
    assert np.all(np.abs(v[~on]) <= level * (1.0 + 1e-12) + 1e-15)


@given(vectors, vectors, steps, weights)
def test_prox_firmly_nonexpansive(u, v, t, w):
    k = min(len(u), len(v))
    u, v = u[:k], v[:k]
    part = WeightedL1(w)
    lhs = np.linalg.norm(part.prox(t, u) - part.prox(t, v))
    assert lhs <= np.linalg.norm(u - v) + 1e-9


def test_custom_nonsmooth_delegates():
    # prox of t * (1/2)||.||^2 is v / (1 + t)
    part = CustomNonsmooth(value_fn=lambda x: 0.5 * float(x @ x),
                           prox_fn=lambda t, v: v / (1.0 + t))
    assert part.value(np.array([3.0, 4.0])) == 12.5
    np.testing.assert_allclose(part.prox(1.0, np.array([2.0, -4.0])), [1.0, -2.0])
    with pytest.raises(ValueError):
        part.prox(0.0, np.zeros(1))


def test_evaluate_bk1_origin():
    p, _ = builtin_problem("BK1")
    np.testing.assert_allclose(evaluate_objectives(p, np.zeros(2)), [0.0, 50.0])


def test_evaluate_jos1_with_l1():
    p, _ = builtin_problem("JOS1_l1")
    np.testing.assert_allclose(evaluate_objectives(p, np.array([1.0, -1.0])),
                               [3.0, 7.0])


def test_evaluate_zero_nonsmooth_equals_smooth():
    p, _ = builtin_problem("SP1")
    x = np.array([2.3, 0.4])
    np.testing.assert_array_equal(evaluate_objectives(p, x), p.smooth(x))


def test_evaluate_nonfinite_raises_with_point():
    p = ProblemInstance(n=1, m=1, smooth=lambda x: np.array([np.nan]),
                        smooth_jac=lambda x: np.zeros((1, 1)))
    x = np.array([4.0])
    with pytest.raises(EvaluationError) as err:
        evaluate_objectives(p, x)
    np.testing.assert_array_equal(err.value.x, x)


def test_evaluate_shape_mismatch_raises():
    p = ProblemInstance(n=1, m=2, smooth=lambda x: np.zeros(3),
                        smooth_jac=lambda x: np.zeros((2, 1)))
    with pytest.raises(ValueError):
        evaluate_objectives(p, np.zeros(1))


def test_problem_dims_validated():
    with pytest.raises(ValueError):
        ProblemInstance(n=0, m=1, smooth=lambda x: x, smooth_jac=lambda x: x)


def test_pareto_order_examples():
    assert pareto_leq(np.array([1.0, 2.0]), np.array([1.0, 3.0]))
    assert not pareto_lt(np.array([1.0, 2.0]), np.array([1.0, 3.0]))
    u = np.array([2.0, 5.0])
    assert pareto_leq(u, u) and not pareto_lt(u, u)
    assert pareto_lt(np.zeros(2), np.ones(2))


def test_pareto_order_shape_mismatch():
    with pytest.raises(ValueError):
        pareto_leq(np.zeros(2), np.zeros(3))


@given(vectors, vectors)
def test_strict_implies_weak_order(u, v):
    k = min(len(u), len(v))
    u, v = u[:k], v[:k]
    if pareto_lt(u, v):
        assert pareto_leq(u, v)
    assert not pareto_lt(u, u)
