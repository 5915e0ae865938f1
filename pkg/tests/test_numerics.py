import numpy as np
import pytest

from daeclstm.errors import DimensionError, DomainError, EvaluationError
from daeclstm.numerics import (
    affine,
    finite_diff_gradient,
    gradient_check,
    sigmoid,
    softmax,
    tanh_act,
)


class TestAffine:
    def test_identity(self):
        out = affine(np.eye(2), np.array([3.0, -1.0]), np.zeros(2))
        np.testing.assert_array_equal(out, [3.0, -1.0])

    def test_zero_matrix_returns_bias(self):
        out = affine(np.zeros((2, 2)), np.array([9.0, -4.0]), np.array([5.0, 7.0]))
        np.testing.assert_array_equal(out, [5.0, 7.0])

    def test_hand_evaluation(self):
        W = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = affine(W, np.array([1.0, 1.0]), np.array([1.0, 0.0]))
        np.testing.assert_allclose(out, [4.0, 7.0], atol=1e-15)

    def test_shape_mismatch_names_operands(self):
        with pytest.raises(DimensionError, match="columns"):
            affine(np.eye(2), np.ones(3), np.zeros(2))
        with pytest.raises(DimensionError, match="rows"):
            affine(np.eye(2), np.ones(2), np.zeros(3))

    def test_linearity(self):
        rng = np.random.default_rng(3)
        W = rng.normal(size=(4, 5))
        x, y = rng.normal(size=5), rng.normal(size=5)
        a, b = 0.7, -2.3
        lhs = affine(W, a * x + b * y, np.zeros(4))
        rhs = a * affine(W, x, np.zeros(4)) + b * affine(W, y, np.zeros(4))
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)


class TestActivations:
    def test_sigmoid_zero(self):
        assert sigmoid(np.array([0.0]))[0] == 0.5

    def test_sigmoid_saturation(self):
        assert abs(sigmoid(np.array([30.0]))[0] - 1.0) < 1e-9
        assert sigmoid(np.array([-800.0]))[0] == 0.0  # no overflow warning

    def test_sigmoid_symmetry(self):
        z = np.array([1.7])
        assert abs(sigmoid(z)[0] + sigmoid(-z)[0] - 1.0) < 1e-15

    def test_tanh_odd(self):
        assert tanh_act(np.array([0.0]))[0] == 0.0
        z = np.array([0.9])
        assert tanh_act(-z)[0] == -tanh_act(z)[0]

    def test_tanh_saturation(self):
        assert abs(tanh_act(np.array([20.0]))[0] - 1.0) < 1e-9

    def test_open_ranges(self):
        rng = np.random.default_rng(8)
        z = rng.normal(scale=5.0, size=200)
        s = sigmoid(z)
        t = tanh_act(z)
        assert np.all((s > 0) & (s < 1))
        assert np.all((t > -1) & (t < 1))


class TestSoftmax:
    def test_uniform_on_constant(self):
        for c in (0.0, -3.5, 12.0):
            np.testing.assert_allclose(softmax(np.full(3, c)), np.full(3, 1 / 3), atol=1e-15)

    def test_hand_evaluation(self):
        out = softmax(np.array([0.0, np.log(2.0)]))
        np.testing.assert_allclose(out, [1 / 3, 2 / 3], atol=1e-15)

    def test_shift_invariance(self):
        s = np.array([0.3, -1.2])
        np.testing.assert_allclose(softmax(s + 100.0), softmax(s), atol=1e-12)

    def test_probability_vector_random_lengths(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            n = int(rng.integers(1, 65))
            w = softmax(rng.normal(scale=10.0, size=n))
            assert np.all(w >= 0)
            assert abs(w.sum() - 1.0) < 1e-12

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            softmax(np.array([]))


class TestFiniteDiff:
    def test_quadratic(self):
        params = {"p": np.array([3.0])}
        g = finite_diff_gradient(lambda d: float(d["p"][0] ** 2), params, eps=1e-5)
        assert abs(g["p"][0] - 6.0) < 1e-8
        assert params["p"][0] == 3.0  # restored

    def test_constant_function(self):
        params = {"a": np.ones((2, 2)), "b": np.zeros(3)}
        g = finite_diff_gradient(lambda d: 4.2, params, eps=1e-5)
        for arr in g.values():
            np.testing.assert_array_equal(arr, np.zeros_like(arr))

    def test_nonfinite_rejected(self):
        params = {"p": np.array([0.0])}
        with pytest.raises(EvaluationError):
            finite_diff_gradient(lambda d: float("nan"), params, eps=1e-5)

    def test_bad_eps(self):
        with pytest.raises(DomainError):
            finite_diff_gradient(lambda d: 0.0, {"p": np.zeros(1)}, eps=0.0)


class TestGradientCheck:
    def test_identical_bundles(self):
        b = {"w": np.array([1.0, -2.0])}
        assert gradient_check(b, {"w": b["w"].copy()}) == 0.0

    def test_hand_ratio(self):
        err = gradient_check({"p": np.array([2.0])}, {"p": np.array([1.0])})
        assert err == pytest.approx(0.5)

    def test_floor_bounds_tiny_values(self):
        err = gradient_check({"p": np.array([0.0])}, {"p": np.array([1e-9])})
        assert err <= 0.1

    def test_name_mismatch(self):
        with pytest.raises(DimensionError, match="names differ"):
            gradient_check({"a": np.zeros(1)}, {"b": np.zeros(1)})

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError, match="shape"):
            gradient_check({"a": np.zeros(1)}, {"a": np.zeros(2)})
