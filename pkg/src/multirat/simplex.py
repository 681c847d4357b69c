"""Dense two-phase simplex for small bandwidth-allocation programs.

Maximizes c@x subject to a_ub@x <= b_ub, a_lb@x >= b_lb, x >= 0.  Built for
problems with a few dozen variables at most: explicit tableau, Bland's rule
(no cycling), artificial variables for the lower-bound rows.  Returns None on
infeasibility; unboundedness raises, since every program built here is capped
by the bandwidth budgets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL = 1e-9


@dataclass
class LpSolution:
    x: np.ndarray
    objective: float


def _pivot(t: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    for r in range(t.shape[0]):
        if r != row and t[r, col] != 0.0:
            t[r] -= t[r, col] * t[row]
    basis[row] = col


def _iterate(t: np.ndarray, basis: np.ndarray, cost: np.ndarray,
             allowed: np.ndarray, tol: float) -> bool:
    """Run simplex pivots to optimality. False means unbounded."""
    m = t.shape[0]
    while True:
        red = cost - cost[basis] @ t[:, :-1] if m else cost.copy()
        enter = -1
        for j in range(cost.size):  # Bland: first improving column
            if allowed[j] and red[j] > tol:
                enter = j
                break
        if enter < 0:
            return True
        leave = -1
        best = 0.0
        for r in range(m):
            a = t[r, enter]
            if a > tol:
                ratio = t[r, -1] / a
                if leave < 0 or ratio < best - tol or (
                        ratio <= best + tol and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave < 0:
            return False
        _pivot(t, basis, leave, enter)


def solve_lp_max(c, a_ub=None, b_ub=None, a_lb=None, b_lb=None,
                 *, tol: float = TOL) -> LpSolution | None:
    c = np.atleast_1d(np.asarray(c, dtype=np.float64))
    n = c.size
    a_ub = np.zeros((0, n)) if a_ub is None else np.asarray(a_ub, np.float64).reshape(-1, n)
    b_ub = np.zeros(0) if b_ub is None else np.atleast_1d(np.asarray(b_ub, np.float64))
    a_lb = np.zeros((0, n)) if a_lb is None else np.asarray(a_lb, np.float64).reshape(-1, n)
    b_lb = np.zeros(0) if b_lb is None else np.atleast_1d(np.asarray(b_lb, np.float64))
    if (b_ub < 0).any() or (b_lb < 0).any():
        raise ValueError("right-hand sides must be nonnegative")

    m_ub, m_lb = a_ub.shape[0], a_lb.shape[0]
    m = m_ub + m_lb
    art0 = n + m_ub + m_lb  # first artificial column
    width = art0 + m_lb
    t = np.zeros((m, width + 1))
    basis = np.zeros(m, dtype=np.int64)
    for r in range(m_ub):
        t[r, :n] = a_ub[r]
        t[r, n + r] = 1.0  # slack
        t[r, -1] = b_ub[r]
        basis[r] = n + r
    for k in range(m_lb):
        r = m_ub + k
        t[r, :n] = a_lb[k]
        t[r, n + m_ub + k] = -1.0  # surplus
        t[r, art0 + k] = 1.0
        t[r, -1] = b_lb[k]
        basis[r] = art0 + k

    if m_lb:
        cost1 = np.zeros(width)
        cost1[art0:] = -1.0
        if not _iterate(t, basis, cost1, np.ones(width, dtype=bool), tol):
            raise RuntimeError("phase-1 objective cannot be unbounded")
        scale = max(1.0, float(np.abs(t[:, -1]).max()) if m else 1.0,
                    float(np.abs(b_lb).max()))
        infeas = sum(float(t[r, -1]) for r in range(m) if basis[r] >= art0)
        if infeas > tol * scale:
            return None
        for r in range(m):  # drive zero-level artificials out of the basis
            if basis[r] >= art0:
                for j in range(art0):
                    if abs(t[r, j]) > tol:
                        _pivot(t, basis, r, j)
                        break

    cost2 = np.zeros(width)
    cost2[:n] = c
    allowed = np.ones(width, dtype=bool)
    allowed[art0:] = False
    if not _iterate(t, basis, cost2, allowed, tol):
        raise RuntimeError("LP is unbounded")

    x = np.zeros(n)
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = t[r, -1]
    return LpSolution(x=x, objective=float(c @ x))
