"""Command-line front end: generate scenarios, solve single instances, run sweeps."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from .allocator import SolverConfig, round_robin_baseline, solve_heuristic
from .channel import ChannelParams, build_csi_snapshot
from .harness import (PRESETS, ExperimentSpec, emit_csv, emit_plot_data,
                      run_experiment)
from .oracle import solve_exact
from .radio import sinr_table, uniform_power_plan
from .scenario import ScenarioConfig, generate, save_scenario

log = logging.getLogger(__name__)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="master RNG seed")
    p.add_argument("--users", type=int, default=None, help="number of UEs")
    p.add_argument("--bs", type=int, default=None, help="number of 5G-NR points")
    p.add_argument("--ap", type=int, default=None, help="number of WiFi-6 points")
    p.add_argument("--jammers", type=int, default=None, help="number of jammers")
    p.add_argument("--multi-conn", type=int, default=None,
                   help="max service points per UE")


def _scenario_config(args, base: ScenarioConfig) -> ScenarioConfig:
    updates = {}
    for flag, fieldname in (("users", "num_ue"), ("bs", "num_bs"),
                            ("ap", "num_ap"), ("jammers", "num_jammers"),
                            ("multi_conn", "multi_conn")):
        v = getattr(args, flag)
        if v is not None:
            updates[fieldname] = v
    return replace(base, rng_seed=args.seed, **updates)


def _cmd_generate(args) -> int:
    cfg = _scenario_config(args, ScenarioConfig())
    s = generate(cfg)
    if args.out:
        save_scenario(s, args.out)
        log.info("wrote %s", args.out)
    else:
        save_scenario(s, sys.stdout)
        sys.stdout.write("\n")
    return 0


def _cmd_solve(args) -> int:
    cfg = _scenario_config(args, ScenarioConfig())
    s = generate(cfg)
    snap = build_csi_snapshot(s, ChannelParams(), args.seed)
    table = sinr_table(snap, uniform_power_plan(s), s)
    if args.solver == "heuristic":
        scfg = SolverConfig(zeta=args.zeta, lm_frac=args.lm,
                            epsilon_bps=args.epsilon * 1e6)
        _, report, _ = solve_heuristic(table, s, scfg)
    elif args.solver == "baseline":
        _, report = round_robin_baseline(table, s)
    else:
        _, report = solve_exact(table, s)
    doc = {"solver": report.solver, "seed": args.seed,
           "sum_rate_bps": report.sum_rate_bps,
           "success_prob": report.success_prob,
           "iterations": report.iterations,
           "wall_time_s": report.wall_time_s,
           "converged": report.converged}
    text = json.dumps(doc, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_sweep(args) -> int:
    if args.preset:
        spec = PRESETS[args.preset]()
    else:
        spec = ExperimentSpec()
    updates = {"master_seed": args.seed, "reps": args.reps,
               "record_timing": not args.no_timing,
               "epsilon_bps": args.epsilon * 1e6}
    if args.users is not None:
        updates["users"] = args.users
    if args.multi_conn is not None:
        updates["multi_conn"] = args.multi_conn
    if args.zeta is not None:
        updates["zeta"] = args.zeta
    if args.lm is not None:
        updates["lm"] = args.lm
    if args.solver is not None:
        updates["solvers"] = tuple(args.solver.split(","))
    base_updates = {}
    for flag, fieldname in (("bs", "num_bs"), ("ap", "num_ap"),
                            ("jammers", "num_jammers")):
        v = getattr(args, flag)
        if v is not None:
            base_updates[fieldname] = v
    if base_updates:
        updates["base"] = replace(spec.base, **base_updates)
    spec = replace(spec, **updates)
    rows = run_experiment(spec)
    if args.out:
        emit_csv(rows, args.out)
        log.info("wrote %d rows to %s", len(rows), args.out)
    else:
        emit_csv(rows, sys.stdout)
    if args.plot_out:
        emit_plot_data(rows, ("sweep_u",), args.plot_out)
        log.info("wrote plot data to %s", args.plot_out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="multirat",
                                description="Multi-RAT downlink simulator and solvers")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="draw a random scenario and write it as JSON")
    _add_scenario_flags(g)
    g.add_argument("--out", default=None, help="output path (default stdout)")
    g.set_defaults(fn=_cmd_generate)

    sv = sub.add_parser("solve", help="solve one instance with one solver")
    _add_scenario_flags(sv)
    sv.add_argument("--solver", choices=("heuristic", "baseline", "oracle"),
                    default="heuristic")
    sv.add_argument("--zeta", type=int, choices=(0, 1), default=0)
    sv.add_argument("--lm", type=float, default=1.0,
                    help="candidate-list fraction in (0, 1]")
    sv.add_argument("--epsilon", type=float, default=0.001,
                    help="sweep-convergence threshold in Mbit/s")
    sv.add_argument("--out", default=None, help="report path (default stdout)")
    sv.set_defaults(fn=_cmd_solve)

    sw = sub.add_parser("sweep", help="run a full experiment sweep to CSV")
    sw.add_argument("--preset", choices=tuple(PRESETS), default=None)
    sw.add_argument("--seed", type=int, default=0, help="master seed")
    sw.add_argument("--reps", type=int, default=3, help="replications per point")
    sw.add_argument("--users", type=_int_list, default=None,
                    help="comma-separated UE counts")
    sw.add_argument("--bs", type=int, default=None)
    sw.add_argument("--ap", type=int, default=None)
    sw.add_argument("--jammers", type=int, default=None)
    sw.add_argument("--multi-conn", type=_int_list, default=None,
                    help="comma-separated per-UE link caps")
    sw.add_argument("--zeta", type=_int_list, default=None,
                    help="comma-separated zeta values (0/1)")
    sw.add_argument("--lm", type=_float_list, default=None,
                    help="comma-separated candidate fractions")
    sw.add_argument("--solver", default=None,
                    help="comma-separated solvers (heuristic,baseline,oracle)")
    sw.add_argument("--epsilon", type=float, default=0.001,
                    help="sweep-convergence threshold in Mbit/s")
    sw.add_argument("--no-timing", action="store_true",
                    help="write wall_time_s as 0.0 for byte-stable output")
    sw.add_argument("--out", default=None, help="CSV path (default stdout)")
    sw.add_argument("--plot-out", default=None,
                    help="optional aggregated per-U plot data CSV")
    sw.set_defaults(fn=_cmd_sweep)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
