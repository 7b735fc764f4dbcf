"""Sandwich operators M_k / N_k, the smoothers G_y / H_y and their composites.

Everything lives on X = [0, 1]; kernels are step-sandwich polynomials on
[-1, 1] evaluated at t - x.  The kernel must sandwich the *reflected* step
(1 on [-1, 0], 0 on (0, 1]) because only then

    rho(0) + int_0^1 K(t - x) rho'(t) dt = rho(x).
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq

from .core import DEFAULT_QUAD, FunctionModel, Polynomial, WeightedSpace, gauss_legendre, quad_nodes, weighted_norm
from .errors import EvaluationError
from .moduli import ModulusConfig, averaged_modulus, local_modulus
from .step import REFLECTED, kernel_pair

FD_STEP = 1e-6
SMOOTHER_CELLS = 2048
_ROOT_SCAN = 4097


def split_derivative(rho, h=FD_STEP):
    """Positive and negative parts (max(rho', 0), max(-rho', 0)) as callables."""
    if rho.deriv is not None:
        d = rho.derivative
    else:
        def d(x):
            x = np.clip(np.asarray(x, dtype=float), h, 1.0 - h)
            v = (rho(x + h) - rho(x - h)) / (2.0 * h)
            if not np.all(np.isfinite(v)):
                raise EvaluationError("non-finite difference quotient")
            return v

    return (lambda x: np.maximum(d(x), 0.0)), (lambda x: np.maximum(-d(x), 0.0))


def _derivative_roots(d, breaks, n=_ROOT_SCAN):
    """Sign changes of d on [0, 1], refined with Brent's method."""
    x = np.unique(np.concatenate([np.linspace(0.0, 1.0, n), breaks]))
    v = d(x)
    roots = []
    for i in np.flatnonzero(v[:-1] * v[1:] < 0):
        roots.append(brentq(lambda t: float(d(np.array([t]))[0]), x[i], x[i + 1], xtol=1e-15))
    return roots


def _check_pair(pair):
    if pair.orientation != REFLECTED:
        raise ValueError("sandwich operators need the reflected step pair (see reflect_pair)")


def _kernel_integral(pair, kind, t, w, dplus, dminus, x):
    """sum_t w [K1(t - x) d+(t)] - sum_t w [K2(t - x) d-(t)] for every x.

    kind='lower' uses (K1, K2) = (lower, upper); 'upper' swaps them.
    """
    k1, k2 = (pair.lower, pair.upper) if kind == "lower" else (pair.upper, pair.lower)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.size)
    wp, wm = w * dplus, w * dminus
    use_p, use_m = np.flatnonzero(wp != 0), np.flatnonzero(wm != 0)
    for i, xi in enumerate(x):
        acc = 0.0
        if use_p.size:
            acc += float(np.dot(wp[use_p], k1(t[use_p] - xi)))
        if use_m.size:
            acc -= float(np.dot(wm[use_m], k2(t[use_m] - xi)))
        out[i] = acc
    return out


@dataclass(frozen=True)
class _DerivativeData:
    """Quadrature of the kernel integrals: nodes t, weights w, d+(t), d-(t), f(0)."""

    t: np.ndarray
    w: np.ndarray
    dplus: np.ndarray
    dminus: np.ndarray
    f0: float


def _function_derivative_data(rho, quad=DEFAULT_QUAD):
    if any(rho.singular_endpoints):
        raise ValueError("M_k / N_k need rho(0) finite and rho' integrable")
    plus, minus = split_derivative(rho)
    d = lambda x: plus(x) - minus(x)
    breaks = tuple(rho.breakpoints)
    breaks += tuple(_derivative_roots(d, np.asarray(breaks, dtype=float)))
    t, w = quad_nodes(0.0, 1.0, quad, breaks)
    return _DerivativeData(t, w, plus(t), minus(t), float(rho(0.0)))


def _apply(data, pair, kind, x):
    return data.f0 + _kernel_integral(pair, kind, data.t, data.w, data.dplus, data.dminus, x)


def _materialize(data, pair, kind):
    return Polynomial.interpolate(lambda x: _apply(data, pair, kind, x), pair.degree, (0.0, 1.0))


def lower_op_M(rho, pair, x):
    """M_k(rho, x) = rho(0) + int lower(t-x) rho'_+ - int upper(t-x) rho'_-."""
    _check_pair(pair)
    out = _apply(_function_derivative_data(rho), pair, "lower", x)
    return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


def upper_op_N(rho, pair, x):
    """N_k(rho, x) = rho(0) + int upper(t-x) rho'_+ - int lower(t-x) rho'_-."""
    _check_pair(pair)
    out = _apply(_function_derivative_data(rho), pair, "upper", x)
    return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


def sandwich_lower(rho, pair):
    """M_k(rho) as a degree-k polynomial on [0, 1]."""
    _check_pair(pair)
    return _materialize(_function_derivative_data(rho), pair, "lower")


def sandwich_upper(rho, pair):
    _check_pair(pair)
    return _materialize(_function_derivative_data(rho), pair, "upper")


def _check_y(y):
    if not 0.0 < y < 1.0:
        raise ValueError(f"y must lie in (0, 1), got {y}")


def _first_order(cfg):
    return cfg if cfg.k == 1 else cfg.with_order(1)


def _smoother_direct(rho, y, cfg, x, sign, quad):
    _check_y(y)
    cfg = _first_order(cfg)
    x = np.asarray(x, dtype=float)
    t, w = quad_nodes(0.0, 1.0, quad)
    s = (1.0 - y) * x.reshape(-1, 1) + y * t[None, :]
    g = rho(s) + sign * local_modulus(rho, s, y, cfg)
    out = g @ w
    return float(out[0]) if x.ndim == 0 else out.reshape(x.shape)


def smooth_lower_G(rho, y, cfg=ModulusConfig(), x=0.0, quad=DEFAULT_QUAD):
    """G_y(rho, x) = int_0^1 [rho(s) - omega_1(rho, s, y)] dt, s = (1-y) x + y t, by quadrature."""
    return _smoother_direct(rho, y, cfg, x, -1.0, quad)


def smooth_upper_H(rho, y, cfg=ModulusConfig(), x=0.0, quad=DEFAULT_QUAD):
    return _smoother_direct(rho, y, cfg, x, +1.0, quad)


@dataclass(frozen=True, eq=False)
class Smoother:
    """G_y (sign=-1) or H_y (sign=+1) built from sampled rho -/+ omega_1.

    With g the piecewise-linear interpolant of rho + sign*omega on a uniform
    grid of ``cells`` cells, the smoother is the Steklov mean

        S(x) = (1/y) int_a^{a+y} g,  a = (1-y) x,

    so S'(x) = ((1-y)/y) (g(a+y) - g(a)) exactly and S(x) - S(0) equals the
    integral of S' to rounding.
    """

    y: float
    sign: float
    grid: np.ndarray
    values: np.ndarray
    cumulative: np.ndarray = field(repr=False)
    name: str = ""

    @classmethod
    def build(cls, rho, y, cfg=ModulusConfig(), sign=-1.0, cells=SMOOTHER_CELLS):
        _check_y(y)
        s = np.linspace(0.0, 1.0, cells + 1)
        g = rho(s) + sign * local_modulus(rho, s, y, _first_order(cfg))
        h = 1.0 / cells
        cum = np.concatenate([[0.0], np.cumsum(0.5 * h * (g[1:] + g[:-1]))])
        for arr in (s, g, cum):
            arr.setflags(write=False)
        kind = "G" if sign < 0 else "H"
        return cls(float(y), float(sign), s, g, cum, f"{kind}_{y:g}({rho.name})")

    @property
    def cells(self):
        return self.grid.size - 1

    def antiderivative(self, s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
        n = self.cells
        j = np.minimum((s * n).astype(int), n - 1)
        tau = s - self.grid[j]
        g0, g1 = self.values[j], self.values[j + 1]
        return self.cumulative[j] + g0 * tau + (g1 - g0) * tau * tau * (0.5 * n)

    def interp(self, s):
        return np.interp(s, self.grid, self.values)

    def __call__(self, x):
        a = (1.0 - self.y) * np.asarray(x, dtype=float)
        return (self.antiderivative(a + self.y) - self.antiderivative(a)) / self.y

    def derivative(self, x):
        a = (1.0 - self.y) * np.asarray(x, dtype=float)
        return (1.0 - self.y) / self.y * (self.interp(a + self.y) - self.interp(a))

    def kinks(self):
        """Points of [0, 1] where the derivative is not smooth."""
        y, c = self.y, 1.0 - self.y
        left = self.grid[self.grid <= c] / c
        right = (self.grid[self.grid >= y] - y) / c
        return np.unique(np.clip(np.concatenate([[0.0, 1.0], left, right]), 0.0, 1.0))

    def as_function(self):
        return FunctionModel(eval=self.__call__, deriv=self.derivative, name=self.name)

    def derivative_data(self, degree):
        """Exact Gauss data for int K(t - x) S'_pm(t) dt with K of ``degree``.

        S' is linear between kinks; splitting also at its zeros makes S'_+ and
        S'_- linear on every piece, so ceil((degree + 2) / 2) Gauss nodes
        integrate kernel times derivative exactly.
        """
        b = self.kinks()
        d = self.derivative(b)
        cross = np.flatnonzero(d[:-1] * d[1:] < 0)
        roots = b[cross] - d[cross] * (b[cross + 1] - b[cross]) / (d[cross + 1] - d[cross])
        b = np.unique(np.concatenate([b, roots]))
        b = b[np.concatenate([[True], np.diff(b) > 0])]
        gx, gw = gauss_legendre(max(1, math.ceil((degree + 2) / 2)))
        half = 0.5 * np.diff(b)
        mid = 0.5 * (b[1:] + b[:-1])
        t = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        w = (half[:, None] * gw[None, :]).ravel()
        dt = self.derivative(t)
        return _DerivativeData(t, w, np.maximum(dt, 0.0), np.maximum(-dt, 0.0), float(self(0.0)))


def _composite(smoother, k, kind):
    pair = kernel_pair(k)
    data = smoother.derivative_data(pair.degree)
    return _materialize(data, pair, kind)


def composite_lower_L(rho, k, y, cfg=ModulusConfig(), smoother=None):
    """L_{k,y}(rho) = M_k(G_y(rho)) as a degree-k polynomial on [0, 1]."""
    g = smoother if smoother is not None else Smoother.build(rho, y, cfg, -1.0)
    return _composite(g, k, "lower")


def composite_upper_J(rho, k, y, cfg=ModulusConfig(), smoother=None):
    """J_{k,y}(rho) = N_k(H_y(rho))."""
    h = smoother if smoother is not None else Smoother.build(rho, y, cfg, +1.0)
    return _composite(h, k, "upper")


def auto_pair_AB(rho, k, cfg=ModulusConfig()):
    """(A_k, B_k) = (L_{k,1/k}(rho), J_{k,1/k}(rho))."""
    if k < 2:
        raise ValueError("A_k, B_k need k >= 2")
    y = 1.0 / k
    return composite_lower_L(rho, k, y, cfg), composite_upper_J(rho, k, y, cfg)


def smoother_constant(y, p):
    """C_1(y, p) = 2 / (1 - y)^(1/p)."""
    return 2.0 / (1.0 - y) ** (1.0 / p)


@dataclass(frozen=True)
class OperatorOutput:
    value: object
    kind: str
    params: dict
    provenance: str


@dataclass(frozen=True)
class Approximation:
    """Full pipeline output for one (rho, k, y)."""

    k: int
    y: float
    smoother_lower: OperatorOutput
    smoother_upper: OperatorOutput
    lower: OperatorOutput
    upper: OperatorOutput
    step_gap: float
    gap_norm: float
    tau: float
    bound: float
    constant_bound: float


def approximate(rho, k, y=None, cfg=ModulusConfig(), space=WeightedSpace()):
    """Run the pipeline and report ||upper - lower|| against the error bounds.

    ``bound`` is 2 (C_1(y, p) + 3 C_k / y) tau_1(rho, y) with the certified
    step gap C_k; ``constant_bound`` replaces C_k by 4 pi^2 / (k + 2) and C_1 by 4.
    """
    y = 1.0 / k if y is None else y
    pair = kernel_pair(k)
    g = Smoother.build(rho, y, cfg, -1.0)
    h = Smoother.build(rho, y, cfg, +1.0)
    lower = composite_lower_L(rho, k, y, cfg, smoother=g)
    upper = composite_upper_J(rho, k, y, cfg, smoother=h)
    params = {"k": k, "y": y}
    gap_norm = weighted_norm(lambda x: upper(x) - lower(x), space)
    tau = averaged_modulus(rho, y, _first_order(cfg), space)
    bound = 2.0 * (smoother_constant(y, space.p) + 3.0 * pair.gap / y) * tau
    capped = 2.0 * (4.0 + 12.0 * k * math.pi**2 / (k + 2)) * tau
    return Approximation(
        k=k,
        y=y,
        smoother_lower=OperatorOutput(g, "lower", params, "G_y"),
        smoother_upper=OperatorOutput(h, "upper", params, "H_y"),
        lower=OperatorOutput(lower, "lower", params, "L_{k,y} = M_k(G_y)"),
        upper=OperatorOutput(upper, "upper", params, "J_{k,y} = N_k(H_y)"),
        step_gap=pair.gap,
        gap_norm=gap_norm,
        tau=tau,
        bound=bound,
        constant_bound=capped,
    )
