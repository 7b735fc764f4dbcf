"""Command line entry point: ``onesided <command> [options]``."""
from __future__ import annotations

import argparse
from dataclasses import asdict, dataclass, field
import json
import logging
import sys

import numpy as np

from .core import QuadConfig, WeightedSpace
from .errors import OneSidedError
from .functions import FUNCTIONS, ExpressionError, default_suite, resolve_function, resolve_weight
from .moduli import ModulusConfig, averaged_modulus
from .operators import approximate
from .oracle import DEFAULT_GRID, best_onesided, best_twosided
from .step import build_step_sandwich, step_gap_bound
from . import verify

log = logging.getLogger("onesided")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    """Resolved options of one invocation; round-trips through a plain dict."""

    command: str
    fn: str | None = None
    expr: str | None = None
    singular: str = "none"
    weight: str = "one"
    k: list = field(default_factory=list)
    y: float | None = None
    p: float = 1.0
    delta: list = field(default_factory=list)
    grid_n: int = DEFAULT_GRID
    panels: int = 64
    nodes: int = 16
    suite: str | None = None
    out: str | None = None
    format: str = "csv"
    seed: int = 0

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    def space(self, weight=None):
        w = weight if weight is not None else resolve_weight(self.weight)[0]
        return WeightedSpace(self.p, w, QuadConfig(self.panels, self.nodes))


def parse_k(text):
    """'8', '2,4,8' or '2:16' (inclusive) or '2:16:2'."""
    try:
        if ":" in text:
            parts = [int(t) for t in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            lo, hi = parts[0], parts[1]
            stride = parts[2] if len(parts) == 3 else 1
            if stride <= 0:
                raise ValueError
            values = list(range(lo, hi + 1, stride))
        else:
            values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad degree list {text!r}") from None
    if not values or min(values) < 0:
        raise argparse.ArgumentTypeError(f"bad degree list {text!r}")
    return values


def parse_floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fn", choices=sorted(FUNCTIONS), help="built-in test function")
    common.add_argument("--expr", help="target as an expression in x, e.g. 'abs(x-0.3)'")
    common.add_argument("--singular", choices=["none", "left", "right", "both"], default="none",
                        help="endpoints where --expr is unbounded")
    common.add_argument("--weight", default=None, help="'one', 'inv-sqrt' or an expression in x")
    common.add_argument("--k", type=parse_k, default=None, help="degree(s): 8, 2,4,8 or 2:16")
    common.add_argument("--y", type=float, default=None)
    common.add_argument("--p", type=float, default=1.0)
    common.add_argument("--delta", type=parse_floats, default=None)
    common.add_argument("--grid-n", type=int, default=DEFAULT_GRID)
    common.add_argument("--panels", type=int, default=64)
    common.add_argument("--nodes", type=int, default=16)
    common.add_argument("--suite", choices=["default"], default=None)
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--seed", type=int, default=0, help="recorded for reproducibility; runs are deterministic")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="onesided", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("tau", parents=[common], help="averaged modulus tau_k(rho, delta)")
    sub.add_parser("sandwich-step", parents=[common], help="step sandwich gaps per degree")
    sub.add_parser("approximate", parents=[common], help="one-sided pair L, J and its bounds")
    sub.add_parser("oracle", parents=[common], help="LP values of best one- and two-sided approximation")
    sub.add_parser("verify", parents=[common], help="run the inequality checks")
    return parser


def _config(ns):
    return RunConfig(
        command=ns.command, fn=ns.fn, expr=ns.expr, singular=ns.singular,
        weight=ns.weight or "one", k=ns.k or [], y=ns.y, p=ns.p, delta=ns.delta or [],
        grid_n=ns.grid_n, panels=ns.panels, nodes=ns.nodes, suite=ns.suite, out=ns.out,
        format=ns.format, seed=ns.seed,
    )


def _target(cfg):
    if cfg.fn is None and cfg.expr is None:
        raise ValueError("give --fn or --expr")
    if cfg.fn is not None and cfg.expr is not None:
        raise ValueError("--fn and --expr are exclusive")
    tf = resolve_function(cfg.fn, cfg.expr, cfg.singular)
    weight = tf.weight if cfg.weight == "one" and tf.weight is not None else resolve_weight(cfg.weight)[0]
    return tf, cfg.space(weight)


def _rows_out(header, rows, cfg):
    if cfg.format == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    lines = [",".join(header)]
    lines += [",".join(verify._fmt(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def cmd_tau(cfg):
    tf, space = _target(cfg)
    if not cfg.delta:
        raise ValueError("tau needs --delta")
    orders = cfg.k or [1]
    rows = []
    for k in orders:
        if k < 1:
            raise ValueError("modulus order must be >= 1")
        for d in cfg.delta:
            rows.append([k, d, averaged_modulus(tf.model, d, ModulusConfig(k), space)])
    return _rows_out(["k", "delta", "tau"], rows, cfg), EXIT_OK


def cmd_sandwich_step(cfg):
    if not cfg.k:
        raise ValueError("sandwich-step needs --k")
    rows = []
    for k in cfg.k:
        pair = build_step_sandwich(k)
        rows.append([k, pair.gap, step_gap_bound(k)])
    return _rows_out(["k", "gap", "bound"], rows, cfg), EXIT_OK


def cmd_approximate(cfg):
    tf, space = _target(cfg)
    if not cfg.k:
        raise ValueError("approximate needs --k")
    rows = []
    for k in cfg.k:
        if k < 1:
            raise ValueError("approximate needs k >= 1")
        a = approximate(tf.model, k, cfg.y, space=space)
        rows.append([k, a.y, space.p, a.step_gap, a.gap_norm, a.tau, a.bound, a.constant_bound])
    header = ["k", "y", "p", "step_gap", "width", "tau", "bound", "constant_bound"]
    return _rows_out(header, rows, cfg), EXIT_OK


def cmd_oracle(cfg):
    tf, space = _target(cfg)
    if not cfg.k:
        raise ValueError("oracle needs --k")
    rows = []
    for k in cfg.k:
        one = best_onesided(tf.model, k, space, cfg.grid_n)
        two = best_twosided(tf.model, k, space, cfg.grid_n)
        rows.append([k, cfg.grid_n, one.value, two.value])
    return _rows_out(["k", "grid_n", "onesided", "twosided"], rows, cfg), EXIT_OK


def cmd_verify(cfg):
    if cfg.suite == "default" or (cfg.fn is None and cfg.expr is None):
        functions = default_suite()
        base = cfg.space(None) if cfg.weight == "one" else cfg.space()
    else:
        tf, base = _target(cfg)
        functions = [tf]
    ks = cfg.k or [2, 4, 8, 16]
    reports = verify.run_theorem_suite(functions, ks, base, oracle_grid=cfg.grid_n)
    text = verify.reports_to_json(reports) if cfg.format == "json" else verify.reports_to_csv(reports)
    total, failed = verify.summary(reports)
    print(f"{total - failed}/{total} checks passed", file=sys.stderr)
    return text, EXIT_FAILED if failed else EXIT_OK


COMMANDS = {
    "tau": cmd_tau,
    "sandwich-step": cmd_sandwich_step,
    "approximate": cmd_approximate,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = _config(ns)
    np.random.seed(cfg.seed)
    try:
        text, code = COMMANDS[cfg.command](cfg)
    except (ValueError, KeyError, ExpressionError, NotImplementedError) as exc:
        print(f"onesided: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OneSidedError as exc:
        print(f"onesided: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
