"""Finite differences, the local modulus omega_k and the averaged modulus tau_k."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .core import WeightedSpace, weighted_norm
from .errors import DomainError

_SLOP = 1e-12
_CHUNK = 4096


@dataclass(frozen=True)
class ModulusConfig:
    k: int = 1
    window_samples: int = 33
    step_samples: int = 33

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("order k must be >= 1")
        if self.window_samples < 3 or self.step_samples < 3:
            raise ValueError("need at least 3 samples per window")

    def with_order(self, k):
        return ModulusConfig(k, self.window_samples, self.step_samples)


def _difference_weights(k):
    return np.array([(-1) ** (r + k) * comb(k, r) for r in range(k + 1)], dtype=float)


def finite_difference(rho, x, h, k):
    """k-th forward difference sum_r (-1)^(r+k) C(k,r) rho(x + r h)."""
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    r = np.arange(k + 1)
    pts = x[..., None] + r * h[..., None]
    if np.any(pts < -_SLOP) or np.any(pts > 1 + _SLOP):
        raise DomainError("difference stencil leaves X = [0, 1]")
    vals = rho(np.clip(pts, 0.0, 1.0))
    return vals @ _difference_weights(k)


@lru_cache(maxsize=64)
def _stencil(k, m, n):
    """Lattice fractions and gather indices for all admissible (t, h) pairs.

    Anchors t = lo + w a/(m-1), steps h = w b/(k (n-1)), a/(m-1) + b/(n-1) <= 1,
    so every stencil point lo + w * frac lies in the window.  Fractions are
    kept as integers over a common denominator so that shared points are
    evaluated once.
    """
    a, b = np.meshgrid(np.arange(m), np.arange(n), indexing="ij")
    keep = a * (n - 1) + b * (m - 1) <= (m - 1) * (n - 1)
    a, b = a[keep], b[keep]
    r = np.arange(k + 1)
    num = a[:, None] * k * (n - 1) + r[None, :] * b[:, None] * (m - 1)
    den = k * (m - 1) * (n - 1)
    uniq, inv = np.unique(num, return_inverse=True)
    frac = uniq / den
    frac.setflags(write=False)
    inv = inv.reshape(num.shape)
    inv.setflags(write=False)
    return frac, inv


def _window(x, delta, k):
    lo = np.maximum(x - 0.5 * k * delta, 0.0)
    hi = np.minimum(x + 0.5 * k * delta, 1.0)
    return lo, hi


def local_modulus(rho, x, delta, cfg=ModulusConfig()):
    """Discretized sup of |Delta_h^k rho(t)| with t, t + k h in [x - k delta/2, x + k delta/2] & X."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xs = np.atleast_1d(x).ravel()
    frac, inv = _stencil(cfg.k, cfg.window_samples, cfg.step_samples)
    weights = _difference_weights(cfg.k)
    out = np.empty(xs.size)
    step = max(1, _CHUNK * 64 // frac.size)
    for s in range(0, xs.size, step):
        lo, hi = _window(xs[s : s + step], delta, cfg.k)
        pts = np.minimum(lo[:, None] + (hi - lo)[:, None] * frac[None, :], hi[:, None])
        vals = rho(pts)
        diffs = vals[:, inv] @ weights
        out[s : s + step] = np.max(np.abs(diffs), axis=1)
    return float(out[0]) if scalar else out.reshape(x.shape)


def averaged_modulus(rho, delta, cfg=ModulusConfig(), space=WeightedSpace()):
    """tau_k(rho, delta)_{p,beta}: the weighted L_p norm of x -> omega_k(rho, x, delta)."""
    return weighted_norm(lambda x: local_modulus(rho, x, delta, cfg), space)
