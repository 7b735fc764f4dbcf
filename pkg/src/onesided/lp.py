"""Thin wrapper over scipy's HiGHS linear-programming backend."""
import numpy as np
from scipy.optimize import linprog

from .errors import SolverError


def solve_lp(cost, a_ub, b_ub, bounds=(None, None)):
    """Minimize cost @ z subject to a_ub @ z <= b_ub; returns (z, objective)."""
    res = linprog(
        np.asarray(cost, dtype=float),
        A_ub=np.asarray(a_ub, dtype=float),
        b_ub=np.asarray(b_ub, dtype=float),
        bounds=bounds,
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise SolverError(f"LP failed (status {res.status}): {res.message}")
    return res.x, float(res.fun)
