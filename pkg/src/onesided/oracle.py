"""Grid-relaxed degrees of best (one-sided) L_{1,beta} approximation by direct LP.

Both programs discretize int f / beta with the interpolatory rule on the
Chebyshev grid: weights v solve sum_i v_i T_j(u_i) = mu_j (j < n) where mu_j
are the weighted moments of T_j.  Moments of degree <= k come from the same
composite rule as ``weighted_norm``, so the one-sided objective of any
degree-k pair equals its computed gap norm to rounding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .core import Polynomial, QuadConfig, WeightedSpace, quad_nodes
from .errors import ConfigurationError, EvaluationError
from .lp import solve_lp

DEFAULT_GRID = 512


@dataclass(frozen=True)
class OracleResult:
    lower: Polynomial
    upper: Polynomial | None
    value: float
    grid_n: int
    p: float = 1.0
    kind: str = "onesided"


def oracle_grid(grid_n):
    """Chebyshev points of the first kind mapped to [0, 1], ascending."""
    u = np.sort(cheb.chebpts1(grid_n))
    return u, 0.5 * (u + 1.0)


def _moments(space, count, rule):
    x, w = quad_nodes(0.0, 1.0, rule)
    inv_beta = 1.0 / space.beta(x)
    return cheb.chebvander(2.0 * x - 1.0, count - 1).T @ (w * inv_beta)


def _angle_moments(space, count):
    # x = (1 + cos th) / 2 turns T_j into cos(j th) and the Jacobian sin(th)/2
    # tames algebraic endpoint behaviour of 1 / beta
    th, w = quad_nodes(0.0, np.pi, QuadConfig(panels=max(64, count // 2), nodes=16))
    x = 0.5 * (1.0 + np.cos(th))
    g = w * 0.5 * np.sin(th) / space.beta(np.clip(x, 1e-300, 1.0))
    return np.cos(np.outer(np.arange(count), th)) @ g


def grid_weights(space, grid_n, k):
    if space.weight is None:
        j = np.arange(grid_n, dtype=float)
        with np.errstate(divide="ignore"):
            mu = np.where(j % 2 == 0, 1.0 / (1.0 - j**2), 0.0)
    else:
        mu = _angle_moments(space, grid_n)
    mu[: k + 1] = _moments(space, k + 1, space.quad)
    u, _ = oracle_grid(grid_n)
    scale = np.full(grid_n, 2.0 / grid_n)
    scale[0] = 1.0 / grid_n
    v = cheb.chebvander(u, grid_n - 1) @ (scale * mu)
    if np.any(v <= 0):
        raise ConfigurationError("interpolatory weights are not positive for this weight function")
    return v, mu[: k + 1]


def _setup(rho, k, space, grid_n):
    if space.p != 1.0:
        raise NotImplementedError("the LP oracle supports p = 1 only")
    if grid_n <= k + 1:
        raise ValueError("grid_n must exceed k + 1")
    u, x = oracle_grid(grid_n)
    r = rho(x)
    beta = space.beta(x)
    if not np.all(np.isfinite(r / beta)):
        raise EvaluationError("rho / beta is not finite on the oracle grid")
    v, mu = grid_weights(space, grid_n, k)
    return cheb.chebvander(u, k), r, v, mu


def best_onesided(rho, k, space=WeightedSpace(), grid_n=DEFAULT_GRID):
    """min int (q - P) / beta subject to P <= rho <= q at the grid nodes."""
    vand, r, _, mu = _setup(rho, k, space, grid_n)
    up, _ = solve_lp(mu, -vand, -r)
    lo, _ = solve_lp(-mu, vand, r)
    value = float(mu @ (up - lo))
    return OracleResult(Polynomial(lo, (0.0, 1.0)), Polynomial(up, (0.0, 1.0)), value, grid_n)


def best_twosided(rho, k, space=WeightedSpace(), grid_n=DEFAULT_GRID):
    """min sum_i v_i |rho_i - P_i| / beta_i via positive/negative splitting."""
    vand, r, v, _ = _setup(rho, k, space, grid_n)
    n = grid_n
    eye = np.eye(n)
    a = np.block([[vand, -eye], [-vand, -eye]])
    b = np.concatenate([r, -r])
    cost = np.concatenate([np.zeros(k + 1), v])
    bounds = [(None, None)] * (k + 1) + [(0.0, None)] * n
    z, _ = solve_lp(cost, a, b, bounds=bounds)
    c = z[: k + 1]
    value = float(v @ np.abs(r - vand @ c))
    return OracleResult(Polynomial(c, (0.0, 1.0)), None, value, grid_n, kind="twosided")
