"""Seeded experiment sweeps: instance generation, solver runs, CSV emission.

A sweep walks the cartesian product of instance axes (UE count, per-UE link
cap) and, per instance, the solver-config axes (zeta, candidate fraction).
Replications derive child seeds from (master_seed, instance index, rep) with
a SeedSequence hash chain, so every solver and every solver config sees the
same instances: comparisons are paired by construction, and reruns of the
same spec reproduce the rows byte for byte (with timing capture off).
Baseline and oracle runs ignore zeta/lm; their rows repeat the coordinate so
the schema stays uniform.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .allocator import SolverConfig, round_robin_baseline, solve_heuristic
from .channel import ChannelParams, build_csi_snapshot
from .errors import BudgetExceeded
from .oracle import solve_exact
from .radio import sinr_table, uniform_power_plan, validate_assignment
from .scenario import (JAMMER_DEFAULT, NR_DEFAULT, WIFI_DEFAULT, ScenarioConfig,
                       generate)

log = logging.getLogger(__name__)

CSV_HEADER = "sweep_U,sweep_Jue,zeta,lm,solver,seed,sum_rate_bps,success_prob,iterations,wall_time_s,feasible"

SOLVERS = ("heuristic", "baseline", "oracle")


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: base scenario knobs plus axes, solvers and replication."""

    base: ScenarioConfig = ScenarioConfig()
    channel: ChannelParams = ChannelParams()
    users: tuple[int, ...] = (40,)
    multi_conn: tuple[int, ...] = (1,)
    zeta: tuple[int, ...] = (0,)
    lm: tuple[float, ...] = (1.0,)
    solvers: tuple[str, ...] = ("heuristic", "baseline")
    reps: int = 1
    master_seed: int = 0
    epsilon_bps: float = 1e3
    max_iters: int = 100
    record_timing: bool = True
    oracle_budget: int = 10**7


@dataclass(frozen=True)
class ResultRow:
    sweep_u: int
    sweep_jue: int
    zeta: int
    lm: float
    solver: str
    seed: int
    sum_rate_bps: float
    success_prob: float
    iterations: int
    wall_time_s: float
    feasible: bool
    rep: int = 0  # replication index; not part of the CSV schema


def child_seeds(master_seed: int, instance_index: int, rep: int) -> tuple[int, int]:
    """Deterministic (scenario seed, channel seed) for one replication."""
    ss = np.random.SeedSequence((master_seed, instance_index, rep))
    a, b = ss.generate_state(2, dtype=np.uint64)
    return int(a), int(b)


def measure_runtime(fn, *args, **kwargs):
    """(result, wall seconds) for one call."""
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def run_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Execute the sweep and return one row per solver run.

    Oracle runs refused by the enumeration budget are logged and skipped;
    every returned row passed the feasibility validator.
    """
    for name in spec.solvers:
        if name not in SOLVERS:
            raise ValueError(f"unknown solver {name!r}")
    rows: list[ResultRow] = []
    instances = list(itertools.product(spec.users, spec.multi_conn))
    for inst_idx, (n_ue, j_ue) in enumerate(instances):
        for rep in range(spec.reps):
            scen_seed, chan_seed = child_seeds(spec.master_seed, inst_idx, rep)
            cfg = replace(spec.base, num_ue=n_ue, multi_conn=j_ue,
                          rng_seed=scen_seed)
            s = generate(cfg)
            snap = build_csi_snapshot(s, spec.channel, chan_seed)
            table = sinr_table(snap, uniform_power_plan(s), s)
            for z, lm in itertools.product(spec.zeta, spec.lm):
                for solver in spec.solvers:
                    if solver == "heuristic":
                        scfg = SolverConfig(zeta=z, lm_frac=lm,
                                            epsilon_bps=spec.epsilon_bps,
                                            max_iters=spec.max_iters)
                        (a, rep_out, _), wall = measure_runtime(
                            solve_heuristic, table, s, scfg)
                        iters = rep_out.iterations
                    elif solver == "baseline":
                        (a, rep_out), wall = measure_runtime(
                            round_robin_baseline, table, s)
                        iters = 0
                    else:
                        try:
                            (a, rep_out), wall = measure_runtime(
                                solve_exact, table, s, j_ue,
                                enforce_qos=False, budget=spec.oracle_budget)
                        except BudgetExceeded as exc:
                            log.warning(
                                "skipping oracle at U=%d Jue=%d rep %d: %s",
                                n_ue, j_ue, rep, exc)
                            continue
                        iters = rep_out.iterations
                    violations = validate_assignment(a, s)
                    if violations:
                        raise AssertionError(
                            f"{solver} produced an infeasible assignment: {violations}")
                    rows.append(ResultRow(
                        sweep_u=n_ue, sweep_jue=j_ue, zeta=z, lm=lm,
                        solver=solver, seed=scen_seed,
                        sum_rate_bps=rep_out.sum_rate_bps,
                        success_prob=rep_out.success_prob,
                        iterations=iters,
                        wall_time_s=wall if spec.record_timing else 0.0,
                        feasible=True, rep=rep))
    order = {name: k for k, name in enumerate(SOLVERS)}
    rows.sort(key=lambda r: (spec.users.index(r.sweep_u),
                             spec.multi_conn.index(r.sweep_jue),
                             spec.zeta.index(r.zeta), spec.lm.index(r.lm),
                             r.rep, order[r.solver]))
    return rows


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(float(v))  # plain float repr round-trips exactly
    return str(v)


def emit_csv(rows: list[ResultRow], sink) -> None:
    """Write rows under the fixed header; floats keep full precision."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join(_fmt(v) for v in (
            r.sweep_u, r.sweep_jue, r.zeta, r.lm, r.solver, r.seed,
            r.sum_rate_bps, r.success_prob, r.iterations, r.wall_time_s,
            r.feasible)))
    text = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _sample_std(vals: list[float]) -> float:
    if len(vals) < 2:
        return 0.0
    mean = sum(vals) / len(vals)
    return (sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)) ** 0.5


def emit_plot_data(rows: list[ResultRow], group_by: tuple[str, ...], sink) -> None:
    """Aggregate rows into per-group mean and sample-stddev series per solver.

    group_by names ResultRow fields (e.g. ("sweep_u",)).  One output line per
    (group, solver), ordered by group then solver name.
    """
    groups: dict = {}
    for r in rows:
        key = tuple(getattr(r, g) for g in group_by) + (r.solver,)
        groups.setdefault(key, []).append(r)
    header = list(group_by) + ["solver", "n",
                               "sum_rate_bps_mean", "sum_rate_bps_std",
                               "success_prob_mean", "success_prob_std",
                               "wall_time_s_mean", "wall_time_s_std"]
    lines = [",".join(header)]
    for key in sorted(groups):
        rs = groups[key]
        cells = [_fmt(k) for k in key] + [str(len(rs))]
        for metric in ("sum_rate_bps", "success_prob", "wall_time_s"):
            vals = [float(getattr(r, metric)) for r in rs]
            cells.append(repr(sum(vals) / len(vals)))
            cells.append(repr(_sample_std(vals)))
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# -- presets ------------------------------------------------------------------

DESK_NR = replace(NR_DEFAULT, ue_cap=2)
DESK_WIFI = replace(WIFI_DEFAULT, ue_cap=1)

DESK_BASE = ScenarioConfig(num_bs=2, num_ap=2, num_ue=4, num_jammers=1,
                           nr_profile=DESK_NR, wifi_profile=DESK_WIFI,
                           jammer_profile=JAMMER_DEFAULT)


def desk_spec(**overrides) -> ExperimentSpec:
    """Small paired sweep: 4 service points, one jammer, all three solvers."""
    defaults = dict(base=DESK_BASE, channel=ChannelParams(),
                    users=(2, 3, 4, 5, 6), multi_conn=(1,),
                    solvers=("heuristic", "baseline", "oracle"), reps=3)
    defaults.update(overrides)
    return ExperimentSpec(**defaults)


def full_spec(**overrides) -> ExperimentSpec:
    """Full-size sweep; exhaustive search excluded (budget-infeasible)."""
    defaults = dict(base=ScenarioConfig(), channel=ChannelParams(),
                    users=(20, 40, 60, 80, 100), multi_conn=(1,),
                    solvers=("heuristic", "baseline"), reps=3)
    defaults.update(overrides)
    return ExperimentSpec(**defaults)


PRESETS = {"desk": desk_spec, "full": full_spec}
