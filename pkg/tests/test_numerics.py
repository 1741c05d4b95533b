"""
Parallel-Channel Bounds - Numerics Unit Tests

Unit tests for the log-domain helpers, the quadrature rules and the
solvers (fixed point, box search, bisection).

Run with: pytest tests/test_numerics.py
"""

import math

import numpy as np
import pytest

from src.core.errors import BadBracketError, NoConvergenceError, NonFiniteError
from src.numerics.logmath import (
    LOG_ZERO,
    binary_entropy,
    db_to_linear,
    linear_to_db,
    log_binomial,
    log_convolve,
    log_sum_exp,
    scaled_entropy,
)
from src.numerics.quadrature import composite_legendre, legendre_interval
from src.numerics.solvers import bisect, fixed_point, maximize_box


class TestLogMath:
    """Unit tests for log-domain arithmetic"""

    def test_log_binomial(self):
        """Test ln C(n, k) on valid and out-of-range arguments"""
        assert log_binomial(6, 3) == pytest.approx(math.log(20.0))
        assert log_binomial(5, 0) == pytest.approx(0.0)
        assert log_binomial(5, 7) == LOG_ZERO
        assert log_binomial(5, -1) == LOG_ZERO

    def test_log_binomial_broadcasts(self):
        """Test elementwise evaluation over an array of k"""
        values = np.exp(log_binomial(4, np.arange(5)))
        np.testing.assert_allclose(values, [1, 4, 6, 4, 1], rtol=1e-12)

    def test_log_sum_exp(self):
        """Test max-shifted log-sum-exp and the empty sum"""
        assert log_sum_exp([0.0, 0.0]) == pytest.approx(math.log(2.0))
        assert log_sum_exp([1000.0, 1000.0]) == pytest.approx(1000.0 + math.log(2.0))
        assert log_sum_exp([]) == LOG_ZERO
        assert log_sum_exp([LOG_ZERO, LOG_ZERO]) == LOG_ZERO

    def test_binary_entropy(self):
        """Test natural-base entropy endpoints and midpoint"""
        assert binary_entropy(0.0) == pytest.approx(0.0)
        assert binary_entropy(1.0) == pytest.approx(0.0)
        assert binary_entropy(0.5) == pytest.approx(math.log(2.0))

    def test_scaled_entropy_zero_scale(self):
        """Test that a zero scale contributes nothing"""
        assert scaled_entropy(0.0, 0.0) == pytest.approx(0.0)
        assert scaled_entropy(1.0, 0.5) == pytest.approx(math.log(2.0))

    def test_db_round_trip(self):
        """Test dB conversion at a known point"""
        assert db_to_linear(10.0) == pytest.approx(10.0)
        assert linear_to_db(100.0) == pytest.approx(20.0)

    def test_log_convolve(self):
        """Test polynomial product in the log domain: (1+x)^2 = 1 + 2x + x^2"""
        one_plus_x = np.array([0.0, 0.0])
        product = np.exp(log_convolve(one_plus_x, one_plus_x))
        np.testing.assert_allclose(product, [1.0, 2.0, 1.0], rtol=1e-12)


class TestQuadrature:
    """Unit tests for the Gauss-Legendre rules"""

    def test_legendre_interval_polynomial(self):
        """Test exact integration of x^3 on [0, 2]"""
        nodes, weights = legendre_interval(0.0, 2.0, 4)
        assert float(np.dot(weights, nodes ** 3)) == pytest.approx(4.0, rel=1e-12)

    def test_composite_rule_gaussian_mass(self):
        """Test that a shifted unit-variance density integrates to one"""
        beta = math.sqrt(2.0)
        rule = composite_legendre(beta + 12.0, nodes_per_panel=32)
        density = np.exp(-0.5 * (rule.nodes - beta) ** 2) / math.sqrt(2.0 * math.pi)
        assert rule.integrate(density) == pytest.approx(1.0, abs=1e-12)
        assert np.all(rule.weights > 0)


class TestSolvers:
    """Unit tests for fixed point, box search and bisection"""

    def test_fixed_point_scalar(self):
        """Test convergence of x -> x/2 + 1 to 2"""
        assert fixed_point(lambda x: x / 2.0 + 1.0, 0.0) == pytest.approx(2.0, abs=1e-9)

    def test_fixed_point_array(self):
        """Test elementwise convergence on an array"""
        result = fixed_point(lambda x: x / 2.0 + np.array([1.0, 2.0]), np.zeros(2))
        np.testing.assert_allclose(result, [2.0, 4.0], atol=1e-9)

    def test_fixed_point_no_convergence(self):
        """Test that a divergent map raises with the last iterate attached"""
        with pytest.raises(NoConvergenceError) as info:
            fixed_point(lambda x: 2.0 * x + 1.0, 1.0, max_iter=20, damping=1.0)
        assert info.value.last is not None

    def test_maximize_box_quadratic(self):
        """Test the maximum of -(x-0.3)^2 - (y-0.3)^2 on the unit square"""
        def objective(points):
            return -np.sum((points - 0.3) ** 2, axis=1)

        result = maximize_box(objective, [[0.0, 1.0], [0.0, 1.0]], coarse=11, refine_rounds=4,
                              vectorized=True)
        np.testing.assert_allclose(result.argmax, [0.3, 0.3], atol=1e-3)
        assert result.max == pytest.approx(0.0, abs=1e-6)

    def test_maximize_box_tie_keeps_lower_corner(self):
        """Test that a constant objective returns the lexicographically smallest point"""
        result = maximize_box(lambda p: 1.0, [[0.0, 1.0], [2.0, 3.0]], coarse=5, refine_rounds=2)
        np.testing.assert_allclose(result.argmax, [0.0, 2.0])

    def test_maximize_box_all_infeasible(self):
        """Test that an everywhere non-finite objective raises"""
        with pytest.raises(NonFiniteError):
            maximize_box(lambda p: math.nan, [[0.0, 1.0]], coarse=5, refine_rounds=0)

    def test_maximize_box_rejects_empty_box(self):
        """Test validation of an inverted box"""
        with pytest.raises(ValueError):
            maximize_box(lambda p: 0.0, [[1.0, 0.0]])

    def test_bisect(self):
        """Test the smallest x with x >= 0.7"""
        value = bisect(lambda x: x >= 0.7, 0.0, 1.0, 1e-9)
        assert value == pytest.approx(0.7, abs=1e-8)
        assert value >= 0.7

    def test_bisect_bad_bracket(self):
        """Test both bracket failures"""
        with pytest.raises(BadBracketError):
            bisect(lambda x: True, 0.0, 1.0, 1e-6)
        with pytest.raises(BadBracketError):
            bisect(lambda x: False, 0.0, 1.0, 1e-6)
