"""Polynomial minorant/majorant pairs for the unit step on [-1, 1].

The pair is found by two linear programs over Chebyshev coefficients:
minimize the integral of (upper - step), resp. (step - lower), subject to the
one-sided constraint on a Chebyshev grid.  The solution is then checked on a
uniform grid ten times denser; dense points that still violate the
constraint are added back to the LP (cutting planes) until the pair
certifies.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .core import DEFAULT_QUAD, Polynomial, WeightedSpace, quad_integrate, weighted_norm
from .errors import CertificationError, DomainError
from .lp import solve_lp

STANDARD = "standard"
REFLECTED = "reflected"
DEFAULT_SAFETY = 1e-6
MIN_CERT_NODES = 2000


def step(x):
    """0 on [-1, 0], 1 on (0, 1]."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -1) or np.any(x > 1) or np.any(np.isnan(x)):
        raise DomainError("step is defined on [-1, 1] only")
    out = (x > 0).astype(float)
    return float(out) if out.ndim == 0 else out


def reflected_step(x):
    """1 on [-1, 0], 0 on (0, 1]: the kernel that reproduces rho(x) from rho'."""
    return 1.0 - step(x)


def step_gap_bound(k):
    """Upper bound 4 pi^2 / (k + 2) on the L1 gap of the step sandwich."""
    return 4.0 * math.pi**2 / (k + 2)


@dataclass(frozen=True)
class SandwichPair:
    lower: Polynomial
    upper: Polynomial
    degree: int
    orientation: str = STANDARD
    gap: float = 0.0
    margin_grid: int = 0
    min_margin: float = 0.0
    safety: float = 0.0

    def target(self, x):
        return step(x) if self.orientation == STANDARD else reflected_step(x)

    def margins(self, x):
        """Pointwise (target - lower, upper - target)."""
        t = self.target(x)
        return t - self.lower(x), self.upper(x) - t

    def jump_margins(self):
        """One-sided limits at 0: both branches must be respected by continuity."""
        lo0, hi0 = float(self.lower(0.0)), float(self.upper(0.0))
        return 0.0 - lo0, hi0 - 1.0


def _moments(k):
    j = np.arange(k + 1, dtype=float)
    with np.errstate(divide="ignore"):
        m = np.where(j % 2 == 0, 2.0 / (1.0 - j**2), 0.0)
    return m


def _local_minima(margin):
    left = np.concatenate([[np.inf], margin[:-1]])
    right = np.concatenate([margin[1:], [np.inf]])
    return (margin <= left) & (margin <= right)


def _solve_side(k, sign, target_fn, nodes, dense, safety, max_rounds):
    """sign=+1 builds a majorant, sign=-1 a minorant of target_fn."""
    mom = _moments(k)
    jump_value = 1.0 if sign > 0 else 0.0
    x = np.asarray(nodes, dtype=float)
    dense_target = target_fn(dense)
    for _ in range(max_rounds):
        v = cheb.chebvander(x, k)
        v0 = cheb.chebvander(np.array([0.0]), k)
        rhs = np.concatenate([target_fn(x), [jump_value]])
        # sign * (V c - target) >= safety  <=>  -sign * V c <= -sign * target - safety
        a = -sign * np.vstack([v, v0])
        b = -sign * rhs - safety
        coeffs, _ = solve_lp(sign * mom, a, b)
        margin = sign * (cheb.chebval(dense, coeffs) - dense_target)
        bad = (margin < 0) & _local_minima(margin)
        if not np.any(bad):
            return coeffs, float(np.min(margin))
        x = np.unique(np.concatenate([x, dense[bad]]))
    return None, float(np.min(margin))


def build_step_sandwich(k, cert_nodes=None, safety=DEFAULT_SAFETY, *, orientation=STANDARD,
                        max_rounds=30, retries=3):
    """Certified pair lower <= step <= upper of degree k.

    ``cert_nodes`` Chebyshev points carry the LP constraints (default
    max(20 k, 2000), shared by all k <= 100 so that feasible sets nest);
    certification uses 10 * cert_nodes + 1 uniform points plus the one-sided
    limits at the jump.  Since every degree k - 1 pair is also a degree k
    pair, the result never has a larger gap than the degree k - 1 result.
    """
    if k < 0:
        raise ValueError("degree must be nonnegative")
    if cert_nodes is None:
        cert_nodes = max(20 * k, MIN_CERT_NODES)
    if cert_nodes < 20 * k:
        raise ValueError(f"cert_nodes must be >= 20k = {20 * k}")
    if safety < 0:
        raise ValueError("safety must be nonnegative")
    pair = _build(k, cert_nodes, float(safety), max_rounds, retries)
    return pair if orientation == STANDARD else reflect_pair(pair)


@lru_cache(maxsize=256)
def _build(k, cert_nodes, safety, max_rounds, retries):
    if k == 0:
        return SandwichPair(
            Polynomial.constant(0.0), Polynomial.constant(1.0), 0, STANDARD, 2.0, 0, 0.0, 0.0
        )
    nodes = np.concatenate([cheb.chebpts1(cert_nodes), [0.0]])
    dense = np.linspace(-1.0, 1.0, 10 * cert_nodes + 1)
    s = safety
    for _ in range(retries + 1):
        up, mu = _solve_side(k, +1, step, nodes, dense, s, max_rounds)
        lo, ml = _solve_side(k, -1, step, nodes, dense, s, max_rounds)
        if up is not None and lo is not None:
            break
        s = 10 * s if s > 0 else 1e-9
    else:
        raise CertificationError(
            f"degree {k}: dense-grid margin {min(mu, ml):.3e} after {retries} safety increases"
        )

    lower, upper = Polynomial(lo), Polynomial(up)
    gap = quad_integrate(lambda t: upper(t) - lower(t), -1.0, 1.0, DEFAULT_QUAD)
    pair = SandwichPair(lower, upper, k, STANDARD, gap, dense.size, min(mu, ml), s)
    jl, ju = pair.jump_margins()
    if min(jl, ju) < 0:
        raise CertificationError(f"degree {k}: jump limits violated ({jl:.3e}, {ju:.3e})")
    if k >= 2:
        prev = _build(k - 1, cert_nodes, safety, max_rounds, retries)
        if prev.gap < pair.gap:
            pad = lambda p: Polynomial(np.concatenate([p.coeffs, [0.0]]))
            pair = SandwichPair(pad(prev.lower), pad(prev.upper), k, STANDARD, prev.gap,
                                prev.margin_grid, prev.min_margin, prev.safety)
    return pair


def reflect_pair(pair):
    """Turn a sandwich of step into one of 1 - step: (1 - upper, 1 - lower)."""
    if pair.orientation != STANDARD:
        raise ValueError("pair is already reflected")
    return SandwichPair(
        lower=1.0 - pair.upper,
        upper=1.0 - pair.lower,
        degree=pair.degree,
        orientation=REFLECTED,
        gap=pair.gap,
        margin_grid=pair.margin_grid,
        min_margin=pair.min_margin,
        safety=pair.safety,
    )


def sandwich_gap(pair, space=WeightedSpace()):
    """Weighted L_p norm of upper - lower over [-1, 1]."""
    return weighted_norm(lambda t: pair.upper(t) - pair.lower(t), space, interval=(-1.0, 1.0))


@lru_cache(maxsize=128)
def kernel_pair(k):
    """Reflected, certified pair of degree k with default settings (cached)."""
    return reflect_pair(build_step_sandwich(k))
