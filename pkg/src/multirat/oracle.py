"""Exact small-instance solver: exhaustive association search + LP bandwidth stage.

Enumerates every association matrix satisfying the per-point UE caps and the
per-UE link cap, solving the bandwidth assignment exactly for each.  Without
rate floors the bandwidth optimum is closed form (each point hands its whole
budget to its best-efficiency member), which the enumeration kernel exploits;
with rate floors enforced each candidate goes through the simplex.  Intended
for desk-scale instances; the candidate budget guard refuses anything larger.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import _kernels
from ._kernels._pure import _row_masks
from .errors import BudgetExceeded, InfeasibleProblem
from .radio import (Assignment, SinrTable, SolverReport, empty_assignment,
                    sum_rate, success_probability)
from .scenario import Scenario
from .simplex import solve_lp_max

ENUMERATION_BUDGET = 10**7


def winner_takes_all_bandwidth(a: Assignment, t: SinrTable, s: Scenario) -> Assignment:
    """Closed-form bandwidth optimum without rate floors.

    Every point gives its full budget to its best-efficiency member (ties to
    the lower UE id); everyone else gets zero.
    """
    out = a.copy()
    out.y[:] = 0.0
    n_ue = a.x.shape[0]
    for j, sp in enumerate(s.sps):
        best = -1
        for i in range(n_ue):
            if a.x[i, j] and (best < 0 or t.rate_coeff[i, j] > t.rate_coeff[best, j]):
                best = i
        if best >= 0:
            out.y[best, j] = sp.bandwidth_hz
    return out


def optimal_bandwidth_for_association(a: Assignment, t: SinrTable, s: Scenario,
                                      enforce_qos: bool = False):
    """Exact bandwidth split for a fixed association, via the simplex.

    Returns (Assignment, objective) or None when the rate floors cannot all
    be met.  Variables are the active links in row-major (UE, point) order.
    """
    n_ue, n_sp = a.x.shape
    links = [(i, j) for i in range(n_ue) for j in range(n_sp) if a.x[i, j]]
    if enforce_qos:
        for ue in s.ues:
            if ue.min_rate_bps > 0 and not any(i == ue.id for i, _ in links):
                return None  # floor without any link
    if not links:
        out = a.copy()
        out.y[:] = 0.0
        return out, 0.0

    c = np.array([t.rate_coeff[i, j] for i, j in links])
    rows_ub, b_ub = [], []
    for j, sp in enumerate(s.sps):
        idx = [k for k, (_, jj) in enumerate(links) if jj == j]
        if idx:
            row = np.zeros(len(links))
            row[idx] = 1.0
            rows_ub.append(row)
            b_ub.append(sp.bandwidth_hz)
    rows_lb, b_lb = [], []
    if enforce_qos:
        for ue in s.ues:
            if ue.min_rate_bps <= 0:
                continue
            idx = [k for k, (i, _) in enumerate(links) if i == ue.id]
            if idx:
                row = np.zeros(len(links))
                row[idx] = c[idx]
                rows_lb.append(row)
                b_lb.append(ue.min_rate_bps)
    sol = solve_lp_max(c, np.array(rows_ub), np.array(b_ub),
                       np.array(rows_lb) if rows_lb else None,
                       np.array(b_lb) if rows_lb else None)
    if sol is None:
        return None
    out = a.copy()
    out.y[:] = 0.0
    for k, (i, j) in enumerate(links):
        out.y[i, j] = sol.x[k]
    return out, sol.objective


def association_count(n_sp: int, j_ue: int, n_ue: int) -> int:
    """Upper bound on enumerated associations (caps ignored)."""
    per_ue = sum(math.comb(n_sp, k) for k in range(min(j_ue, n_sp) + 1))
    return per_ue**n_ue


def _qos_enumeration(t: SinrTable, s: Scenario, j_ue: int):
    """Cap-pruned recursive enumeration with a simplex solve per candidate."""
    n_ue, n_sp = t.gamma.shape
    masks = _row_masks(n_sp, j_ue)
    counts = [0] * n_sp
    caps = [sp.ue_cap for sp in s.sps]
    x = np.zeros((n_ue, n_sp), dtype=np.uint8)
    best: list = [None, -1.0, 0]  # assignment, objective, leaves

    def descend(i: int) -> None:
        if i == n_ue:
            best[2] += 1
            a = Assignment(x=x.copy(), y=np.zeros((n_ue, n_sp)))
            res = optimal_bandwidth_for_association(a, t, s, enforce_qos=True)
            if res is not None and res[1] > best[1]:
                best[0], best[1] = res[0], res[1]
            return
        for bits in masks:
            if any(counts[p] + 1 > caps[p] for p in bits):
                continue
            for p in bits:
                counts[p] += 1
                x[i, p] = 1
            descend(i + 1)
            for p in bits:
                counts[p] -= 1
                x[i, p] = 0

    descend(0)
    return best


def solve_exact(t: SinrTable, s: Scenario, multi_conn: int | None = None,
                enforce_qos: bool = False,
                budget: int = ENUMERATION_BUDGET) -> tuple[Assignment, SolverReport]:
    """Optimal association + bandwidth for one instance.

    Raises BudgetExceeded before enumerating more than ``budget`` candidate
    associations, and InfeasibleProblem when enforce_qos is set and no
    candidate satisfies every rate floor.  Among equal optima the
    lexicographically smallest flattened association wins, independent of
    enumeration order.
    """
    n_ue, n_sp = t.gamma.shape
    j_ue = s.config.multi_conn if multi_conn is None else multi_conn
    total = association_count(n_sp, j_ue, n_ue)
    if total > budget:
        raise BudgetExceeded(
            f"{total} candidate associations exceed the budget of {budget}")

    t0 = time.perf_counter()
    if enforce_qos:
        found, objective, leaves = _qos_enumeration(t, s, j_ue)
        if found is None:
            raise InfeasibleProblem("no association satisfies every rate floor")
        a = found
    else:
        coeff = np.ascontiguousarray(t.rate_coeff, dtype=np.float64)
        w = np.array([sp.bandwidth_hz for sp in s.sps], dtype=np.float64)
        cap = np.array([sp.ue_cap for sp in s.sps], dtype=np.int64)
        objective, x_flat, leaves = _kernels.enumerate_best(coeff, w, cap, j_ue)
        a = empty_assignment(n_ue, n_sp)
        a.x[:] = np.array(x_flat, dtype=np.uint8).reshape(n_ue, n_sp)
        a = winner_takes_all_bandwidth(a, t, s)
    wall = time.perf_counter() - t0

    report = SolverReport(solver="oracle",
                          sum_rate_bps=sum_rate(a, t),
                          success_prob=success_probability(a, t, s),
                          iterations=int(leaves),
                          wall_time_s=wall)
    return a, report
