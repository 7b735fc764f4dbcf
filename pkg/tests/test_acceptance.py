"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from onesided.core import WeightedSpace, weighted_norm
from onesided.functions import FUNCTIONS, default_suite
from onesided.moduli import ModulusConfig, averaged_modulus
from onesided.operators import Smoother, auto_pair_AB
from onesided.step import build_step_sandwich, step_gap_bound
from onesided.verify import (
    check_bound,
    check_chain,
    check_grid,
    composite_checks,
    kernel_checks,
    smoother_checks,
)

SUITE_K = (2, 4, 8, 16)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return emit


def test_criterion_1_step_sandwich(report):
    t0 = time.perf_counter()
    worst_margin, worst_ratio = math.inf, 0.0
    for k in range(2, 41):
        pair = build_step_sandwich(k)
        x = np.linspace(-1.0, 1.0, pair.margin_grid)  # 10x the LP grid, contains 0
        ml, mu = pair.margins(x)
        worst_margin = min(worst_margin, ml.min(), mu.min(), *pair.jump_margins())
        worst_ratio = max(worst_ratio, pair.gap / step_gap_bound(k))
    elapsed = time.perf_counter() - t0
    ok = worst_margin >= -1e-12 and worst_ratio <= 1.0 and elapsed <= 60.0
    report(1, ok, f"min margin {worst_margin:.3e}, max gap/bound {worst_ratio:.4f}, {elapsed:.1f}s")


def test_criterion_2_tau_identity(report):
    t0 = time.perf_counter()
    rho = FUNCTIONS["identity"].model
    errs = [abs(averaged_modulus(rho, d, ModulusConfig(1), WeightedSpace()) - (d - d * d / 4))
            for d in (0.05, 0.1, 0.2)]
    elapsed = time.perf_counter() - t0
    ok = max(errs) <= 5e-3 and elapsed <= 5.0
    report(2, ok, f"max abs error {max(errs):.2e}, {elapsed:.2f}s")


def test_criterion_3_sandwich_chain(report):
    t0 = time.perf_counter()
    failures, count = [], 0
    for tf in default_suite():
        rho = tf.model
        x = check_grid(rho, 1001)
        for k in SUITE_K:
            y = 1.0 / k
            g = Smoother.build(rho, y, sign=-1.0)
            h = Smoother.build(rho, y, sign=+1.0)
            a, b = auto_pair_AB(rho, k)
            checks = [
                check_chain([a, g, rho, h, b], x, 1e-8, check_id="chain", function_id=tf.id),
                check_chain([a, rho, b], x, 1e-8, check_id="AB", function_id=tf.id),
            ]
            if tf.absolutely_continuous:
                checks.append(next(r for r in kernel_checks(tf, k, WeightedSpace())
                                   if r.check_id == "kernel-sandwich"))
            count += len(checks)
            failures += [(tf.id, k, r.check_id, r.min_margin) for r in checks if not r.passed]
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed <= 300.0
    report(3, ok, f"{count} orderings checked, {len(failures)} failures {failures[:3]}, {elapsed:.1f}s")


def test_criterion_4_kernel_bound(report):
    worst, failures = 0.0, []
    for tf in default_suite():
        if not tf.absolutely_continuous:
            continue
        for k in range(2, 17):
            for r in kernel_checks(tf, k, WeightedSpace()):
                if r.check_id.startswith("kernel-bound"):
                    worst = max(worst, r.ratio or 0.0)
                    if not r.passed:
                        failures.append((tf.id, k, r.check_id))
    report(4, not failures, f"max ratio {worst:.4f}, failures {failures[:3]}")


def test_criterion_5_smoother_bound(report):
    worst, failures = 0.0, []
    for tf in default_suite():
        for p in (1.0, 2.0):
            space = WeightedSpace(p, tf.weight)
            for y in (1 / 4, 1 / 8, 1 / 16):
                reps, _ = smoother_checks(tf, y, space)
                for r in reps:
                    if r.check_id.startswith("smoother-bound"):
                        worst = max(worst, r.ratio or 0.0)
                        if not r.passed:
                            failures.append((tf.id, p, y, r.check_id))
    report(5, not failures, f"max ratio {worst:.4f}, failures {failures[:3]}")


def test_criterion_6_oracle(report):
    failures, n = [], 0
    for tf in default_suite():
        space = WeightedSpace(1.0, tf.weight)
        for k in SUITE_K:
            for r in composite_checks(tf, k, space):
                if r.check_id.startswith("oracle"):
                    n += 1
                    if not r.passed:
                        failures.append((tf.id, k, r.check_id, r.lhs, r.rhs))
    ok = not failures and n == 2 * len(SUITE_K) * len(default_suite())
    report(6, ok, f"{n} comparisons, failures {failures[:3]}")


def test_criterion_7_convergence(report):
    lines, ok = [], True
    for fid in ("identity", "exp"):
        rho = FUNCTIONS[fid].model
        widths = []
        for k in (4, 8, 16, 32):
            a, b = auto_pair_AB(rho, k)
            w = weighted_norm(lambda x: b(x) - a(x), WeightedSpace())
            tau = averaged_modulus(rho, 1.0 / k, ModulusConfig(1), WeightedSpace())
            cap = 2 * (4 + 12 * k * math.pi**2 / (k + 2))
            r = check_bound(w, cap, tau, slack=0.0)
            ok &= r.passed
            widths.append(w)
        mono = all(b <= a for a, b in zip(widths, widths[1:]))
        ok &= mono
        lines.append(f"{fid}: " + " ".join(f"{w:.4g}" for w in widths))
    report(7, ok, "; ".join(lines))


def test_criterion_8_determinism(report, tmp_path):
    outs = []
    for i in range(2):
        dest = tmp_path / f"run{i}.csv"
        subprocess.run([sys.executable, "-m", "onesided.cli", "verify", "--suite", "default",
                        "--out", str(dest)], check=True, capture_output=True)
        outs.append(dest.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    report(8, ok, f"{len(outs[0])} bytes, identical={outs[0] == outs[1]}")
