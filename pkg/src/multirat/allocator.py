"""Association and bandwidth solvers: two-phase heuristic and round-robin baseline.

Stage one associates each UE greedily with its strongest service points under
the capacity caps and splits each point's bandwidth across its members in
proportion to their SINR.  Stage two sweeps every served UE, re-scoring its
association against the admissible alternatives and committing the best move,
until the sum rate settles.  The baseline keeps the stage-one association and
splits bandwidth equally instead.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .radio import (Assignment, SinrTable, SolverReport, empty_assignment,
                    sum_rate, success_probability)
from .scenario import Scenario


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the two-phase heuristic.

    zeta=0 scores candidate moves purely by sum-rate gain; zeta=1 prefers
    moves that meet the moving UE's rate floor, breaking ties by gain.
    lm_frac truncates each UE's candidate list to ceil(lm_frac * J) points.
    epsilon_bps stops the sweeps once the absolute sum-rate change between
    consecutive sweeps falls below it.
    """

    zeta: int = 0
    lm_frac: float = 1.0
    epsilon_bps: float = 1e3  # 0.001 Mbit/s
    max_iters: int = 100

    def __post_init__(self):
        if self.zeta not in (0, 1):
            raise ValueError(f"zeta must be 0 or 1, got {self.zeta}")
        if not 0.0 < self.lm_frac <= 1.0:
            raise ValueError(f"lm_frac must be in (0, 1], got {self.lm_frac}")
        if self.epsilon_bps <= 0 or self.max_iters < 1:
            raise ValueError("epsilon_bps must be positive and max_iters >= 1")


@dataclass
class RefinementTrace:
    """Per-sweep running sum rates from the refinement stage."""

    sum_rate_bps: list[float] = field(default_factory=list)
    converged: bool = False
    initial_sum_rate_bps: float = 0.0

    @property
    def iterations(self) -> int:
        return len(self.sum_rate_bps)


def _solver_arrays(s: Scenario, t: SinrTable):
    gamma = np.ascontiguousarray(t.gamma, dtype=np.float64)
    coeff = np.ascontiguousarray(t.rate_coeff, dtype=np.float64)
    w = np.array([sp.bandwidth_hz for sp in s.sps], dtype=np.float64)
    cap = np.array([sp.ue_cap for sp in s.sps], dtype=np.int64)
    r_min = np.array([ue.min_rate_bps for ue in s.ues], dtype=np.float64)
    return gamma, coeff, w, cap, r_min


def initial_association(t: SinrTable, s: Scenario) -> Assignment:
    """Greedy stage-one association; bandwidth left zeroed.

    UEs in ascending id order take their strongest-SINR points (ties to the
    lower id) whose caps still have room, up to multi_conn links each.  A UE
    may end with fewer links, or none, when capacity runs out.
    """
    n_ue, n_sp = t.gamma.shape
    a = empty_assignment(n_ue, n_sp)
    cap = [sp.ue_cap for sp in s.sps]
    served = [0] * n_sp
    for i in range(n_ue):
        order = np.argsort(-t.gamma[i, :], kind="stable")
        taken = 0
        for j in order:
            if taken == s.config.multi_conn:
                break
            j = int(j)
            if served[j] < cap[j]:
                a.x[i, j] = 1
                served[j] += 1
                taken += 1
    return a


def proportional_bandwidth(a: Assignment, t: SinrTable, s: Scenario) -> Assignment:
    """Split every point's bandwidth over its members proportionally to SINR.

    Returns a new Assignment; members of point j receive
    W_j * gamma_ij / sum of member gammas, which sums to W_j up to rounding.
    """
    out = a.copy()
    n_ue, n_sp = a.x.shape
    for j, sp in enumerate(s.sps):
        den = 0.0
        for k in range(n_ue):
            if out.x[k, j]:
                den += t.gamma[k, j]
        for k in range(n_ue):
            if out.x[k, j]:
                out.y[k, j] = sp.bandwidth_hz * t.gamma[k, j] / den
            else:
                out.y[k, j] = 0.0
    return out


def candidate_count(lm_frac: float, n_sp: int) -> int:
    return math.ceil(lm_frac * n_sp)


def sp_selection_for_ue(i: int, j: int, a: Assignment, t: SinrTable,
                        s: Scenario, cfg: SolverConfig) -> Assignment:
    """Re-score UE i's link to point j against the admissible alternatives.

    Returns a new Assignment holding the committed choice (possibly
    unchanged).  Requires x[i, j] set and y consistent with x.
    """
    if not a.x[i, j]:
        raise ValueError(f"UE {i} is not associated with service point {j}")
    gamma, coeff, w, cap, r_min = _solver_arrays(s, t)
    out = a.copy()
    out.x = np.ascontiguousarray(out.x, dtype=np.uint8)
    out.y = np.ascontiguousarray(out.y, dtype=np.float64)
    _kernels.select_step(gamma, coeff, w, cap, r_min, out.x, out.y, i, j,
                         cfg.zeta, candidate_count(cfg.lm_frac, len(s.sps)))
    return out


def refine_assignment(a: Assignment, t: SinrTable, s: Scenario,
                      cfg: SolverConfig) -> tuple[Assignment, RefinementTrace]:
    """Run selection sweeps until the sum-rate change drops below epsilon.

    Sweeps visit points in ascending id, members in ascending UE id (the
    member list is snapshotted per point).  Returns the refined assignment
    and the per-sweep trace.
    """
    gamma, coeff, w, cap, r_min = _solver_arrays(s, t)
    out = a.copy()
    out.x = np.ascontiguousarray(out.x, dtype=np.uint8)
    out.y = np.ascontiguousarray(out.y, dtype=np.float64)
    trace_vals, converged, s_init = _kernels.refine(
        gamma, coeff, w, cap, r_min, out.x, out.y, cfg.zeta,
        candidate_count(cfg.lm_frac, len(s.sps)), cfg.epsilon_bps, cfg.max_iters)
    trace = RefinementTrace(sum_rate_bps=[float(v) for v in trace_vals],
                            converged=bool(converged),
                            initial_sum_rate_bps=float(s_init))
    return out, trace


def solve_heuristic(t: SinrTable, s: Scenario,
                    cfg: SolverConfig | None = None
                    ) -> tuple[Assignment, SolverReport, RefinementTrace]:
    """Two-phase solve: greedy association + proportional split, then sweeps."""
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    a = proportional_bandwidth(initial_association(t, s), t, s)
    a, trace = refine_assignment(a, t, s, cfg)
    wall = time.perf_counter() - t0
    report = SolverReport(solver="heuristic",
                          sum_rate_bps=sum_rate(a, t),
                          success_prob=success_probability(a, t, s),
                          iterations=trace.iterations,
                          wall_time_s=wall,
                          converged=trace.converged)
    return a, report, trace


def round_robin_baseline(t: SinrTable, s: Scenario) -> tuple[Assignment, SolverReport]:
    """Stage-one association with an equal bandwidth split per point."""
    t0 = time.perf_counter()
    a = initial_association(t, s)
    n_ue = a.x.shape[0]
    for j, sp in enumerate(s.sps):
        members = [k for k in range(n_ue) if a.x[k, j]]
        if members:
            share = sp.bandwidth_hz / len(members)
            for k in members:
                a.y[k, j] = share
    wall = time.perf_counter() - t0
    report = SolverReport(solver="baseline",
                          sum_rate_bps=sum_rate(a, t),
                          success_prob=success_probability(a, t, s),
                          iterations=0,
                          wall_time_s=wall)
    return a, report
