"""Transmit powers, SINR, rates, and assignment bookkeeping.

Power allocation is uniform: each service point splits its budget evenly over
its serving capacity, each jammer over the UE population, so per-stream powers
do not depend on who is actually associated.  SINR at UE i from service point
j counts interference from every other same-band service point (worst case,
all active) plus every jammer plus thermal noise; the two bands never
interfere with each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import CsiSnapshot
from .scenario import NR5G, Scenario


@dataclass(frozen=True)
class PowerPlan:
    """Per-stream transmit powers (W): one entry per service point / jammer."""

    sp_stream_w: np.ndarray   # (J,)
    jammer_stream_w: np.ndarray  # (L,)


def uniform_power_plan(s: Scenario) -> PowerPlan:
    """Split each service point's budget over its UE capacity, jammers over all UEs."""
    sp = np.array([p.max_power_w / p.ue_cap for p in s.sps], dtype=np.float64)
    n_ue = max(len(s.ues), 1)
    jam = np.array([j.max_power_w / n_ue for j in s.jammers], dtype=np.float64)
    return PowerPlan(sp_stream_w=sp, jammer_stream_w=jam)


@dataclass
class SinrTable:
    """Per-link SINR and the spectral efficiency log2(1 + SINR) derived from it."""

    gamma: np.ndarray       # (U, J) linear SINR, > 0
    rate_coeff: np.ndarray  # (U, J) bits/s/Hz


def sinr_table(snap: CsiSnapshot, plan: PowerPlan, s: Scenario) -> SinrTable:
    """Build the UE x SP SINR matrix for one fading snapshot."""
    n_ue, n_sp = snap.sp_gain.shape
    rx = plan.sp_stream_w[np.newaxis, :] * snap.sp_gain  # (U, J) received stream powers
    jam = (plan.jammer_stream_w[np.newaxis, :] * snap.jam_gain).sum(axis=1) \
        if snap.jam_gain.size else np.zeros(n_ue)
    is_nr = np.array([sp.rat == NR5G for sp in s.sps], dtype=bool)
    gamma = np.empty((n_ue, n_sp), dtype=np.float64)
    for band in (is_nr, ~is_nr):
        if not band.any():
            continue
        band_total = rx[:, band].sum(axis=1)  # (U,)
        # interference from the rest of the band: total minus own received power
        interf = band_total[:, np.newaxis] - rx[:, band]
        gamma[:, band] = rx[:, band] / (interf + (jam + s.config.noise_power_w)[:, np.newaxis])
    return SinrTable(gamma=gamma, rate_coeff=np.log2(1.0 + gamma))


@dataclass
class Assignment:
    """Association matrix x (0/1) and bandwidth split y (Hz), both (U, J)."""

    x: np.ndarray  # uint8
    y: np.ndarray  # float64

    def copy(self) -> "Assignment":
        return Assignment(x=self.x.copy(), y=self.y.copy())

    def sp_members(self, j: int) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.x[:, j])]

    def ue_links(self, i: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.x[i, :])]


def empty_assignment(n_ue: int, n_sp: int) -> Assignment:
    return Assignment(x=np.zeros((n_ue, n_sp), dtype=np.uint8),
                      y=np.zeros((n_ue, n_sp), dtype=np.float64))


def ue_rate(i: int, a: Assignment, t: SinrTable) -> float:
    """Rate of UE i in bits/s: sum of bandwidth times spectral efficiency."""
    r = 0.0
    for j in range(a.x.shape[1]):
        if a.x[i, j]:
            r += a.y[i, j] * t.rate_coeff[i, j]
    return float(r)


def sum_rate(a: Assignment, t: SinrTable) -> float:
    """Network sum rate in bits/s."""
    s = 0.0
    for i in range(a.x.shape[0]):
        s += ue_rate(i, a, t)
    return s


def success_probability(a: Assignment, t: SinrTable, s: Scenario) -> float:
    """Fraction of UEs whose rate meets their floor (1.0 for zero UEs)."""
    if not s.ues:
        return 1.0
    ok = sum(1 for ue in s.ues if ue_rate(ue.id, a, t) >= ue.min_rate_bps)
    return ok / len(s.ues)


@dataclass(frozen=True)
class Violation:
    """One broken constraint: kind, offending index, and the overshoot."""

    kind: str   # "sp_bandwidth" | "sp_capacity" | "ue_multi_conn"
    index: int
    amount: float


# Proportional splits hit the budget only to within rounding, so the
# bandwidth check carries a relative slack; 1 Hz on 100 MHz still trips it.
BANDWIDTH_REL_TOL = 1e-9


def validate_assignment(a: Assignment, s: Scenario) -> list[Violation]:
    """Check per-SP bandwidth budgets, per-SP UE caps and per-UE link caps.

    Empty list iff the assignment is feasible.  Rate floors are reported
    separately by qos_slack (they are soft targets, not hard feasibility).
    """
    out: list[Violation] = []
    n_ue, n_sp = a.x.shape
    for j, sp in enumerate(s.sps):
        used = float((a.y[:, j] * (a.x[:, j] != 0)).sum())
        if used > sp.bandwidth_hz * (1.0 + BANDWIDTH_REL_TOL):
            out.append(Violation("sp_bandwidth", j, used - sp.bandwidth_hz))
        served = int((a.x[:, j] != 0).sum())
        if served > sp.ue_cap:
            out.append(Violation("sp_capacity", j, served - sp.ue_cap))
    cap = s.config.multi_conn
    for i in range(n_ue):
        links = int((a.x[i, :] != 0).sum())
        if links > cap:
            out.append(Violation("ue_multi_conn", i, links - cap))
    if (a.y < 0).any():
        for i, j in zip(*np.nonzero(a.y < 0)):
            out.append(Violation("sp_bandwidth", int(j), float(a.y[i, j])))
    return out


@dataclass(frozen=True)
class QosSlack:
    ue: int
    rate_bps: float
    required_bps: float

    @property
    def slack_bps(self) -> float:
        return self.rate_bps - self.required_bps


def qos_slack(a: Assignment, t: SinrTable, s: Scenario) -> list[QosSlack]:
    """Per-UE achieved rate against its floor (negative slack = unmet)."""
    return [QosSlack(ue.id, ue_rate(ue.id, a, t), ue.min_rate_bps) for ue in s.ues]


@dataclass
class SolverReport:
    """Outcome metrics attached to a solve."""

    solver: str
    sum_rate_bps: float
    success_prob: float
    iterations: int
    wall_time_s: float
    converged: bool = True
