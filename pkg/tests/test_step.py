import math

import numpy as np
import pytest

from onesided.core import Polynomial, WeightedSpace
from onesided.errors import DomainError
from onesided.step import (
    REFLECTED,
    STANDARD,
    SandwichPair,
    build_step_sandwich,
    kernel_pair,
    step_gap_bound,
    reflect_pair,
    reflected_step,
    sandwich_gap,
    step,
)


def dense_margins(pair, factor=10):
    x = np.linspace(-1, 1, factor * 2000 + 1)
    ml, mu = pair.margins(x)
    return ml.min(), mu.min()


def test_step_values():
    assert step(-0.5) == 0.0
    assert step(0.0) == 0.0
    assert step(0.5) == 1.0
    assert reflected_step(0.0) == 1.0
    with pytest.raises(DomainError):
        step(1.5)


def test_degree_zero_is_constant_pair():
    pair = build_step_sandwich(0)
    assert pair.lower.coeffs.tolist() == [0.0]
    assert pair.upper.coeffs.tolist() == [1.0]
    assert pair.gap == 2.0
    assert sandwich_gap(pair, WeightedSpace(p=1.0)) == pytest.approx(2.0, abs=1e-14)


def test_degree_two_within_bound():
    pair = build_step_sandwich(2)
    assert 0 < pair.gap <= math.pi**2
    assert min(dense_margins(pair)) >= -1e-12


def test_degree_sixteen_bound_and_nesting():
    g16 = build_step_sandwich(16).gap
    g8 = build_step_sandwich(8).gap
    assert g16 <= 4 * math.pi**2 / 18
    assert g16 <= g8


@pytest.mark.parametrize("k", [3, 7, 12, 25])
def test_one_sidedness_on_independent_grid(k):
    pair = build_step_sandwich(k)
    # a grid unrelated to the certification grid, including both sides of 0
    x = np.concatenate([np.linspace(-1, 1, 33337), [-1e-9, 1e-9, 1e-12]])
    ml, mu = pair.margins(x)
    assert ml.min() >= -1e-12 and mu.min() >= -1e-12
    jl, ju = pair.jump_margins()
    assert jl >= 0 and ju >= 0


def test_gap_matches_recomputation():
    pair = build_step_sandwich(10)
    # exact Chebyshev integral of the difference is an independent route
    assert sandwich_gap(pair) == pytest.approx((pair.upper - pair.lower).integral(), abs=1e-10)
    assert pair.gap == pytest.approx((pair.upper - pair.lower).integral(), abs=1e-10)


def test_equal_pair_has_zero_gap():
    p = Polynomial([0.2, 0.1])
    pair = SandwichPair(p, p, 1)
    assert sandwich_gap(pair) == 0.0


def test_gap_nonincreasing_small_degrees():
    gaps = [build_step_sandwich(k).gap for k in range(2, 13)]
    assert all(b <= a for a, b in zip(gaps, gaps[1:]))


def test_reflection():
    const = build_step_sandwich(0)
    r = reflect_pair(const)
    assert r.orientation == REFLECTED
    assert r.lower(0.3) == 0.0 and r.upper(-0.3) == 1.0
    pair = build_step_sandwich(9)
    rp = reflect_pair(pair)
    assert abs((rp.upper - rp.lower).integral() - (pair.upper - pair.lower).integral()) <= 1e-14
    assert rp.gap == pair.gap
    assert min(dense_margins(rp)) >= -1e-12
    with pytest.raises(ValueError):
        reflect_pair(rp)


def test_kernel_pair_is_reflected_and_cached():
    assert kernel_pair(4) is kernel_pair(4)
    assert kernel_pair(4).orientation == REFLECTED
    assert build_step_sandwich(4, orientation=REFLECTED).orientation == REFLECTED
    assert build_step_sandwich(4).orientation == STANDARD


def test_argument_checks():
    with pytest.raises(ValueError):
        build_step_sandwich(-1)
    with pytest.raises(ValueError):
        build_step_sandwich(10, cert_nodes=100)
    with pytest.raises(ValueError):
        build_step_sandwich(3, safety=-1.0)


def test_step_gap_bound_values():
    assert step_gap_bound(2) == pytest.approx(math.pi**2)
    assert step_gap_bound(16) == pytest.approx(4 * math.pi**2 / 18)
