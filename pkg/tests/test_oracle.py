import numpy as np
import pytest

from onesided.core import FunctionModel, WeightedSpace
from onesided.errors import ConfigurationError
from onesided.oracle import best_onesided, best_twosided, grid_weights, oracle_grid

identity = FunctionModel(lambda x: x)
kink = FunctionModel(lambda x: np.abs(x - 0.5))
cubic = FunctionModel(lambda x: 1 - 2 * x + 3 * x**3)
sin10 = FunctionModel(lambda x: np.sin(10 * x))


def test_weights_integrate_polynomials():
    v, _ = grid_weights(WeightedSpace(), 128, 4)
    _, x = oracle_grid(128)
    assert np.all(v > 0)
    assert v.sum() == pytest.approx(1.0, abs=1e-13)
    assert v @ x**7 == pytest.approx(1 / 8, abs=1e-13)


def test_weights_for_inverse_sqrt_weight():
    space = WeightedSpace(1.0, lambda x: x**-0.5)
    v, _ = grid_weights(space, 256, 4)
    _, x = oracle_grid(256)
    # int_0^1 x^(1/2) x^2 dx = 2/7
    assert v @ x**2 == pytest.approx(2 / 7, abs=1e-9)


def test_polynomial_target_has_zero_error():
    one = best_onesided(cubic, 3, grid_n=128)
    two = best_twosided(cubic, 3, grid_n=128)
    assert abs(one.value) <= 1e-8 and abs(two.value) <= 1e-8
    x = np.linspace(0, 1, 101)
    np.testing.assert_allclose(one.lower(x), cubic(x), atol=1e-8)
    np.testing.assert_allclose(one.upper(x), cubic(x), atol=1e-8)


def test_constant_two_sided_of_identity():
    # the best L1 constant is the median, leaving int |x - 1/2| = 1/4
    assert best_twosided(identity, 0, grid_n=1024).value == pytest.approx(0.25, abs=1e-6)
    # interior Chebyshev nodes miss the endpoints by O(1 / n^2)
    one = best_onesided(identity, 0, grid_n=256).value
    assert 1.0 - 1e-4 <= one <= 1.0 + 1e-12


def test_grid_refinement_is_stable():
    coarse = best_onesided(kink, 1, grid_n=256).value
    fine = best_onesided(kink, 1, grid_n=512).value
    assert fine == pytest.approx(coarse, rel=0.05)


def test_values_decrease_with_degree():
    vals = [best_onesided(sin10, k, grid_n=256).value for k in (2, 4, 8, 12)]
    assert all(b <= a + 1e-10 for a, b in zip(vals, vals[1:]))


def test_one_sided_constraints_hold_on_grid():
    res = best_onesided(sin10, 6, grid_n=256)
    _, x = oracle_grid(256)
    assert np.all(res.lower(x) <= sin10(x) + 1e-9)
    assert np.all(sin10(x) <= res.upper(x) + 1e-9)
    assert best_twosided(sin10, 6, grid_n=256).value <= res.value + 1e-8


def test_argument_checks():
    with pytest.raises(NotImplementedError):
        best_onesided(identity, 2, WeightedSpace(p=2.0))
    with pytest.raises(ValueError):
        best_twosided(identity, 10, grid_n=8)
    with pytest.raises(ConfigurationError):
        grid_weights(WeightedSpace(1.0, lambda x: x - 0.5), 64, 2)
