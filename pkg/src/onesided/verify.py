"""Numerical checks of the sandwich inequalities and error bounds.

Every check returns a ``VerificationReport``; nothing here raises on a failed
inequality.  ``run_theorem_suite`` walks a list of test functions and degrees
in a fixed order so that repeated runs produce identical output.
"""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, fields
import io
import json
import math

import numpy as np

from .core import WeightedSpace, weighted_norm
from .errors import OneSidedError
from .moduli import ModulusConfig, averaged_modulus
from .operators import (
    Smoother,
    composite_lower_L,
    composite_upper_J,
    sandwich_lower,
    sandwich_upper,
    smoother_constant,
)
from .oracle import DEFAULT_GRID, best_onesided, best_twosided
from .step import build_step_sandwich, kernel_pair, step_gap_bound

CHECK_GRID = 1001
SANDWICH_TOL = 1e-8
BOUND_SLACK = 0.05
KERNEL_SLACK = 1e-6
ORACLE_TOL = 1e-8
DEGENERATE_TOL = 1e-10
SCHEMA = 1


@dataclass(frozen=True)
class VerificationReport:
    check_id: str
    function_id: str
    k: int | None
    y: float | None
    p: float | None
    lhs: float
    rhs: float
    ratio: float | None
    min_margin: float | None
    passed: bool
    grid_n: int
    error: str = ""


def _params(params):
    params = params or {}
    return params.get("k"), params.get("y"), params.get("p")


def check_grid(model, grid_n=CHECK_GRID):
    """Uniform grid on [0, 1] without flagged singular endpoints."""
    x = np.linspace(0.0, 1.0, grid_n)
    left, right = getattr(model, "singular_endpoints", (False, False))
    return x[int(left): grid_n - int(right)]


def check_chain(chain, x, tol=SANDWICH_TOL, *, check_id, function_id, params=None):
    """chain[0] <= chain[1] <= ... on x, each step up to ``tol``.

    lhs / rhs hold the smallest first and last link margins, min_margin the
    smallest over all links.
    """
    k, y, p = _params(params)
    try:
        values = [np.asarray(f(x), dtype=float) for f in chain]
        if not all(np.all(np.isfinite(v)) for v in values):
            raise ArithmeticError("non-finite value on the check grid")
    except (OneSidedError, ArithmeticError, ValueError) as exc:
        return VerificationReport(check_id, function_id, k, y, p, math.nan, math.nan, None, None,
                                  False, len(x), f"{type(exc).__name__}: {exc}")
    margins = [float(np.min(b - a)) for a, b in zip(values, values[1:])]
    worst = min(margins)
    return VerificationReport(check_id, function_id, k, y, p, margins[0], margins[-1], None,
                              worst, worst >= -tol, len(x))


def check_sandwich(lower, rho, upper, grid_n=CHECK_GRID, tol=SANDWICH_TOL, *, check_id="sandwich",
                   function_id="", params=None):
    """lower <= rho <= upper on a uniform grid (singular endpoints skipped)."""
    return check_chain([lower, rho, upper], check_grid(rho, grid_n), tol,
                       check_id=check_id, function_id=function_id, params=params)


def check_bound(lhs, constant, modulus, slack=BOUND_SLACK, tol=DEGENERATE_TOL, *, check_id="bound",
                function_id="", params=None, grid_n=CHECK_GRID):
    """lhs <= (1 + slack) * constant * modulus.

    With a vanishing right side the bound is degenerate and only lhs <= tol
    passes.
    """
    if not (np.isfinite(constant) and constant > 0):
        raise ValueError("constant must be positive and finite")
    k, y, p = _params(params)
    rhs = constant * modulus
    if not (np.isfinite(lhs) and np.isfinite(rhs)):
        return VerificationReport(check_id, function_id, k, y, p, lhs, rhs, None, None, False,
                                  grid_n, "non-finite operand")
    if rhs <= 0.0:
        ok = lhs <= tol
        return VerificationReport(check_id, function_id, k, y, p, lhs, rhs, 0.0 if ok else math.inf,
                                  None, ok, grid_n, "" if ok else "degenerate bound: modulus is zero")
    ratio = lhs / rhs
    return VerificationReport(check_id, function_id, k, y, p, lhs, rhs, ratio, None,
                              ratio <= 1.0 + slack, grid_n)


def check_leq(lhs, rhs, tol, *, check_id, function_id="", params=None, grid_n=0):
    k, y, p = _params(params)
    ratio = lhs / rhs if rhs > 0 else None
    return VerificationReport(check_id, function_id, k, y, p, lhs, rhs, ratio, rhs - lhs,
                              bool(lhs <= rhs + tol), grid_n)


# -- individual checks, reused by the acceptance tests ----------------------


def step_checks(k, dense=20001):
    pair = build_step_sandwich(k)
    x = np.concatenate([np.linspace(-1.0, 1.0, dense), [0.0]])
    ml, mu = pair.margins(x)
    jl, ju = pair.jump_margins()
    params = {"k": k, "p": 1.0}
    worst = float(min(ml.min(), mu.min(), jl, ju))
    one_sided = VerificationReport("step-onesided", "step", k, None, 1.0, float(ml.min()),
                                   float(mu.min()), None, worst, worst >= -1e-12, x.size)
    gap = check_bound(pair.gap, step_gap_bound(k), 1.0, slack=0.0, check_id="step-gap",
                      function_id="step", params=params, grid_n=pair.margin_grid)
    return [one_sided, gap]


def _norm(f, space, rho):
    return weighted_norm(f, space, breaks=rho.breakpoints)


def smoother_checks(tf, y, space, cfg=ModulusConfig(), grid_n=CHECK_GRID, g=None, h=None, k=None):
    """Sandwich, derivative and error bounds for the smoothers at one y."""
    rho = tf.model
    g = g or Smoother.build(rho, y, cfg, -1.0)
    h = h or Smoother.build(rho, y, cfg, +1.0)
    params = {"k": k, "y": y, "p": space.p}
    tau = averaged_modulus(rho, y, ModulusConfig(1, cfg.window_samples, cfg.step_samples), space)
    out = [check_sandwich(g, rho, h, grid_n, check_id="smoother-sandwich", function_id=tf.id,
                          params=params)]
    dnorm = max(weighted_norm(g.derivative, space), weighted_norm(h.derivative, space))
    out.append(check_bound(dnorm, 3.0 / y, tau, check_id="smoother-derivative", function_id=tf.id,
                           params=params, grid_n=grid_n))
    c1 = smoother_constant(y, space.p)
    for name, s in (("G", g), ("H", h)):
        err = _norm(lambda x: rho(x) - s(x), space, rho)
        out.append(check_bound(err, c1, tau, check_id=f"smoother-bound-{name}", function_id=tf.id,
                               params=params, grid_n=grid_n))
    return out, tau


def kernel_checks(tf, k, space, grid_n=CHECK_GRID):
    """M_k, N_k sandwich and the derivative bound; needs an integrable rho'."""
    rho = tf.model
    pair = kernel_pair(k)
    m, n = sandwich_lower(rho, pair), sandwich_upper(rho, pair)
    params = {"k": k, "p": space.p}
    out = [check_sandwich(m, rho, n, grid_n, check_id="kernel-sandwich", function_id=tf.id,
                          params=params)]
    dnorm = _norm(rho.derivative, space, rho)
    for name, poly in (("M", m), ("N", n)):
        err = _norm(lambda x: rho(x) - poly(x), space, rho)
        out.append(check_bound(err, pair.gap, dnorm, slack=KERNEL_SLACK,
                               check_id=f"kernel-bound-{name}", function_id=tf.id,
                               params=params, grid_n=grid_n))
    return out


def composite_checks(tf, k, space, cfg=ModulusConfig(), grid_n=CHECK_GRID, oracle_grid=DEFAULT_GRID):
    """Chain, bounds and oracle comparisons for L, J at y = 1 / k."""
    rho = tf.model
    y = 1.0 / k
    g = Smoother.build(rho, y, cfg, -1.0)
    h = Smoother.build(rho, y, cfg, +1.0)
    out, tau = smoother_checks(tf, y, space, cfg, grid_n, g, h, k)
    low = composite_lower_L(rho, k, y, cfg, smoother=g)
    up = composite_upper_J(rho, k, y, cfg, smoother=h)
    params = {"k": k, "y": y, "p": space.p}
    x = check_grid(rho, grid_n)
    out.append(check_chain([low, g, rho, h, up], x, check_id="composite-chain", function_id=tf.id,
                           params=params))
    gap = kernel_pair(k).gap
    c1 = smoother_constant(y, space.p)
    c42 = c1 + 3.0 * gap / y
    for name, poly in (("L", low), ("J", up)):
        err = _norm(lambda x: rho(x) - poly(x), space, rho)
        out.append(check_bound(err, c42, tau, check_id=f"composite-bound-{name}", function_id=tf.id,
                               params=params, grid_n=grid_n))
    width = weighted_norm(lambda x: up(x) - low(x), space)
    out.append(check_bound(width, 2.0 * c42, tau, check_id="width-bound", function_id=tf.id,
                           params=params, grid_n=grid_n))
    c7 = 2.0 * (4.0 + 12.0 * k * math.pi**2 / (k + 2))
    out.append(check_bound(width, c7, tau, check_id="width-constant", function_id=tf.id,
                           params=params, grid_n=grid_n))
    if space.p == 1.0:
        try:
            one = best_onesided(rho, k, space, oracle_grid)
            two = best_twosided(rho, k, space, oracle_grid)
        except OneSidedError as exc:
            out.append(VerificationReport("oracle-dominance", tf.id, k, y, 1.0, math.nan, width,
                                          None, None, False, oracle_grid, f"{type(exc).__name__}: {exc}"))
        else:
            out.append(check_leq(one.value, width, ORACLE_TOL, check_id="oracle-dominance",
                                 function_id=tf.id, params=params, grid_n=oracle_grid))
            out.append(check_leq(two.value, one.value, ORACLE_TOL, check_id="oracle-ordering",
                                 function_id=tf.id, params=params, grid_n=oracle_grid))
    return out


def run_theorem_suite(functions, k_values, space=WeightedSpace(), cfg=ModulusConfig(),
                      grid_n=CHECK_GRID, oracle_grid=DEFAULT_GRID):
    """All checks for every (function, k), in a deterministic order.

    Each function is measured in ``space`` with its own weight when it has
    one.  M_k/N_k checks are skipped for functions without an integrable
    derivative.
    """
    k_values = sorted(set(int(k) for k in k_values))
    if any(k < 2 for k in k_values):
        raise ValueError("suite degrees must be >= 2")
    reports = []
    for k in k_values:
        reports.extend(step_checks(k))
    for tf in functions:
        sp = space.with_weight(tf.weight)
        for k in k_values:
            if tf.absolutely_continuous:
                reports.extend(kernel_checks(tf, k, sp, grid_n))
            reports.extend(composite_checks(tf, k, sp, cfg, grid_n, oracle_grid))
    reports.sort(key=lambda r: (r.check_id, r.function_id, -1 if r.k is None else r.k))
    return reports


# -- serialization ----------------------------------------------------------

FIELDS = [f.name for f in fields(VerificationReport)]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def reports_to_csv(reports):
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in reports:
        w.writerow([_fmt(getattr(r, name)) for name in FIELDS])
    return buf.getvalue()


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def reports_to_json(reports):
    rows = [{k: _json_safe(v) for k, v in asdict(r).items()} for r in reports]
    return json.dumps({"schema": SCHEMA, "reports": rows}, indent=2, sort_keys=True) + "\n"


def summary(reports):
    failed = [r for r in reports if not r.passed]
    return len(reports), len(failed)
