"""Polynomials, composite Gauss quadrature and weighted L_p norms on X = [0, 1]."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .errors import ConfigurationError, DomainError, EvaluationError

_DOMAIN_SLOP = 1e-12


def _as_array(x):
    return np.asarray(x, dtype=float)


def _first_bad(x, v):
    bad = ~np.isfinite(v)
    i = int(np.flatnonzero(bad.ravel())[0])
    xb = np.broadcast_to(x, v.shape).ravel()[i]
    return xb, v.ravel()[i]


@dataclass(frozen=True)
class Polynomial:
    """Algebraic polynomial stored by its Chebyshev coefficients on ``domain``.

    Evaluation maps ``domain`` affinely onto [-1, 1] and runs Clenshaw's
    recurrence, which stays well conditioned up to degree ~100.
    """

    coeffs: np.ndarray
    domain: tuple[float, float] = (-1.0, 1.0)
    basis_kind: str = "chebyshev"

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, ndmin=1)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError("coeffs must be finite")
        a, b = (float(v) for v in self.domain)
        if not a < b:
            raise ValueError(f"degenerate domain [{a}, {b}]")
        if self.basis_kind != "chebyshev":
            raise ValueError(f"unsupported basis {self.basis_kind!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "domain", (a, b))

    @classmethod
    def constant(cls, value, domain=(-1.0, 1.0)):
        return cls(np.array([float(value)]), domain)

    @classmethod
    def interpolate(cls, f, degree, domain=(0.0, 1.0)):
        """Interpolate ``f`` at the ``degree + 1`` Chebyshev points of ``domain``.

        ``f`` is called once with the whole node array.
        """
        a, b = domain
        nodes = cheb.chebpts1(degree + 1)
        values = _as_array(f(0.5 * (b - a) * nodes + 0.5 * (a + b)))
        if not np.all(np.isfinite(values)):
            xb, vb = _first_bad(0.5 * (b - a) * nodes + 0.5 * (a + b), values)
            raise EvaluationError(f"non-finite value {vb} at interpolation node x={xb!r}")
        coeffs = cheb.chebfit(nodes, values, degree)
        return cls(coeffs, (a, b))

    @property
    def degree(self):
        return self.coeffs.size - 1

    def to_reference(self, x):
        a, b = self.domain
        return (2.0 * _as_array(x) - (a + b)) / (b - a)

    def __call__(self, x):
        x = _as_array(x)
        a, b = self.domain
        slop = _DOMAIN_SLOP * (b - a)
        if np.any(x < a - slop) or np.any(x > b + slop) or np.any(np.isnan(x)):
            raise DomainError(f"evaluation point outside [{a}, {b}]")
        u = np.clip(self.to_reference(x), -1.0, 1.0)
        return cheb.chebval(u, self.coeffs)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.domain != self.domain:
                raise ValueError("polynomials live on different domains")
            return other.coeffs
        return np.array([float(other)])

    def __add__(self, other):
        return Polynomial(cheb.chebadd(self.coeffs, self._coerce(other)), self.domain)

    __radd__ = __add__

    def __sub__(self, other):
        return Polynomial(cheb.chebsub(self.coeffs, self._coerce(other)), self.domain)

    def __rsub__(self, other):
        return Polynomial(cheb.chebsub(self._coerce(other), self.coeffs), self.domain)

    def __neg__(self):
        return Polynomial(-self.coeffs, self.domain)

    def __mul__(self, scalar):
        if isinstance(scalar, Polynomial):
            return NotImplemented
        return Polynomial(float(scalar) * self.coeffs, self.domain)

    __rmul__ = __mul__

    def integral(self):
        """Exact integral over the whole domain."""
        a, b = self.domain
        anti = cheb.chebint(self.coeffs)
        return 0.5 * (b - a) * float(cheb.chebval(1.0, anti) - cheb.chebval(-1.0, anti))

    def derivative(self):
        a, b = self.domain
        if self.degree == 0:
            return Polynomial.constant(0.0, self.domain)
        return Polynomial(cheb.chebder(self.coeffs) * (2.0 / (b - a)), self.domain)


def eval_poly(poly, x):
    return poly(x)


@dataclass(frozen=True)
class QuadConfig:
    panels: int = 64
    nodes: int = 16
    eps: float = 1e-9

    def __post_init__(self):
        if self.panels < 1 or self.nodes < 1:
            raise ConfigurationError("panels and nodes must be positive")
        if not 0 < self.eps < 1e-3:
            raise ConfigurationError("eps must lie in (0, 1e-3)")

    @property
    def exactness_degree(self):
        return 2 * self.nodes - 1


DEFAULT_QUAD = QuadConfig()


@lru_cache(maxsize=None)
def gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_edges(a, b, panels, breaks=()):
    edges = np.linspace(a, b, panels + 1)
    inner = [float(t) for t in breaks if a < t < b]
    if inner:
        edges = np.unique(np.concatenate([edges, inner]))
    return edges


def quad_nodes(a, b, quad=DEFAULT_QUAD, breaks=()):
    """Nodes and weights of the composite rule on [a, b], panels split at ``breaks``."""
    a, b = float(a), float(b)
    if a > b:
        raise DomainError(f"reversed interval [{a}, {b}]")
    if a == b:
        return np.zeros(0), np.zeros(0)
    edges = panel_edges(a, b, quad.panels, breaks)
    gx, gw = gauss_legendre(quad.nodes)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    return x, w


def quad_integrate(f, a, b, quad=DEFAULT_QUAD, breaks=()):
    x, w = quad_nodes(a, b, quad, breaks)
    if x.size == 0:
        return 0.0
    v = _as_array(f(x))
    if not np.all(np.isfinite(v)):
        xb, vb = _first_bad(x, v)
        raise EvaluationError(f"integrand is {vb} at node x={xb!r}")
    return float(np.dot(w, v))


@dataclass(frozen=True)
class FunctionModel:
    """A target function on X = [0, 1].

    Requests exactly at a flagged singular endpoint are moved inward by
    ``eps``; every returned value is checked for finiteness.
    """

    eval: Callable
    deriv: Callable | None = None
    singular_endpoints: tuple[bool, bool] = (False, False)
    domination: float | None = None
    breakpoints: tuple[float, ...] = ()
    eps: float = 1e-9
    name: str = ""

    def clamp(self, x):
        x = _as_array(x)
        left, right = self.singular_endpoints
        if left:
            x = np.where(x <= 0.0, self.eps, x)
        if right:
            x = np.where(x >= 1.0, 1.0 - self.eps, x)
        return x

    def __call__(self, x):
        x = self.clamp(x)
        v = np.broadcast_to(_as_array(self.eval(x)), x.shape).astype(float)
        if not np.all(np.isfinite(v)):
            xb, vb = _first_bad(x, v)
            raise EvaluationError(f"{self.name or 'function'} is {vb} at x={xb!r}")
        return v

    def derivative(self, x):
        if self.deriv is None:
            raise EvaluationError("no analytic derivative")
        x = self.clamp(x)
        v = np.broadcast_to(_as_array(self.deriv(x)), x.shape).astype(float)
        if not np.all(np.isfinite(v)):
            xb, vb = _first_bad(x, v)
            raise EvaluationError(f"derivative is {vb} at x={xb!r}")
        return v

    def affine(self, scale=1.0, shift=0.0, name=None):
        """Return ``scale * f + shift``."""
        f, d = self.eval, self.deriv
        return FunctionModel(
            eval=lambda x: scale * f(x) + shift,
            deriv=None if d is None else (lambda x: scale * d(x)),
            singular_endpoints=self.singular_endpoints,
            domination=None,
            breakpoints=self.breakpoints,
            eps=self.eps,
            name=name or f"{scale}*{self.name}+{shift}",
        )

    def domination_holds(self, beta, x):
        """Check |f| <= M * beta at the sample nodes ``x`` (True if no M declared)."""
        if self.domination is None:
            return True
        x = self.clamp(x)
        return bool(np.all(np.abs(self(x)) <= self.domination * _as_array(beta(x)) * (1 + 1e-12)))


def as_function(f):
    if isinstance(f, (FunctionModel, Polynomial)):
        return f
    if callable(f):
        return FunctionModel(eval=f)
    raise TypeError(f"cannot evaluate {type(f).__name__}")


def _unit_weight(x):
    return np.ones_like(_as_array(x))


@dataclass(frozen=True)
class WeightedSpace:
    """The space L_{p,beta}(X); ``weight=None`` means beta = 1."""

    p: float = 1.0
    weight: Callable | None = None
    quad: QuadConfig = field(default_factory=QuadConfig)

    def __post_init__(self):
        if not (np.isfinite(self.p) and self.p >= 1.0):
            raise ConfigurationError(f"exponent p={self.p} must satisfy 1 <= p < inf")

    def beta(self, x):
        if self.weight is None:
            return _unit_weight(x)
        return np.broadcast_to(_as_array(self.weight(_as_array(x))), np.shape(x)).astype(float)

    def with_weight(self, weight):
        return WeightedSpace(self.p, weight, self.quad)

    def with_p(self, p):
        return WeightedSpace(p, self.weight, self.quad)


def weighted_norm(f, space, interval=(0.0, 1.0), breaks=()):
    """(integral of |f / beta|^p)^(1/p) over ``interval``."""
    f = as_function(f)
    a, b = interval
    x, w = quad_nodes(a, b, space.quad, tuple(breaks) + tuple(getattr(f, "breakpoints", ())))
    beta = space.beta(x)
    if np.any(~np.isfinite(beta)) or np.any(beta <= 0):
        i = int(np.flatnonzero(~(np.isfinite(beta) & (beta > 0)))[0])
        raise ConfigurationError(f"weight is {beta[i]} at node x={x[i]!r}")
    fv = _as_array(f(x))
    r = np.abs(fv / beta)
    if space.p != 1.0:
        r = r**space.p
    if not np.all(np.isfinite(r)):
        xb, vb = _first_bad(x, r)
        raise EvaluationError(f"|f/beta|^p is {vb} at node x={xb!r}")
    total = float(np.dot(w, r))
    return total if space.p == 1.0 else total ** (1.0 / space.p)
