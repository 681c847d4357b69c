"""Compare the compiled solver kernels against the pure-Python reference.

Times the refinement sweep at full scale (40 service points, 100 UEs) and
the exhaustive association search at small scale (4 points, 8 UEs), checks
that both backends return bit-identical results, and prints the speedups.

Run from the repository root after an editable install:

    python benchmarks/bench_backends.py [--reps N]
"""

import argparse
import statistics
import time
from dataclasses import replace

import numpy as np

from multirat._kernels import _pure
from multirat.allocator import initial_association, proportional_bandwidth
from multirat.channel import ChannelParams, build_csi_snapshot
from multirat.radio import sinr_table, uniform_power_plan
from multirat.scenario import ScenarioConfig, generate

try:
    from multirat._kernels import _core
except ImportError:
    _core = None


def build_refine_inputs(n_ue, num_bs, num_ap, seed):
    cfg = ScenarioConfig(num_bs=num_bs, num_ap=num_ap, num_ue=n_ue,
                         num_jammers=10, rng_seed=seed)
    s = generate(cfg)
    snap = build_csi_snapshot(s, ChannelParams(), seed + 1)
    t = sinr_table(snap, uniform_power_plan(s), s)
    a = proportional_bandwidth(initial_association(t, s), t, s)
    gamma = np.ascontiguousarray(t.gamma)
    coeff = np.ascontiguousarray(t.rate_coeff)
    w = np.array([sp.bandwidth_hz for sp in s.sps])
    cap = np.array([sp.ue_cap for sp in s.sps], dtype=np.int64)
    r_min = np.array([ue.min_rate_bps for ue in s.ues])
    return gamma, coeff, w, cap, r_min, a


def time_call(fn, reps):
    walls = []
    out = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        walls.append(time.perf_counter() - t0)
    return statistics.median(walls), out


def bench_refine(mod, args, reps):
    gamma, coeff, w, cap, r_min, a = args

    def run():
        x = a.x.copy()
        y = a.y.copy()
        trace = mod.refine(gamma, coeff, w, cap, r_min, x, y,
                           0, gamma.shape[1], 1e3, 100)
        return trace, x, y

    return time_call(run, reps)


def bench_enumerate(mod, args, reps):
    _, coeff, w, cap, _, _ = args
    return time_call(lambda: mod.enumerate_best(coeff, w, cap, 1), reps)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=9,
                    help="timing repetitions per backend (median reported)")
    opts = ap.parse_args()

    if _core is None:
        print("compiled extension not importable; nothing to compare")
        return

    big = build_refine_inputs(100, 20, 20, seed=1)
    small = build_refine_inputs(8, 2, 2, seed=2)

    rows = []
    for label, bench, args in (
            ("refine 40x100", bench_refine, big),
            ("refine 4x8", bench_refine, small),
            ("enumerate 4x8", bench_enumerate, small)):
        t_pure, out_pure = bench(_pure, args, opts.reps)
        t_core, out_core = bench(_core, args, opts.reps)
        if bench is bench_refine:
            (tr_p, x_p, y_p), (tr_c, x_c, y_c) = out_pure, out_core
            same = (list(tr_p[0]) == list(tr_c[0]) and tr_p[1:] == tr_c[1:]
                    and (x_p == x_c).all() and (y_p == y_c).all())
        else:
            same = (out_pure[0] == out_core[0]
                    and list(out_pure[1]) == list(out_core[1])
                    and out_pure[2] == out_core[2])
        rows.append((label, t_pure, t_core, same))

    print(f"{'kernel':<16} {'pure':>12} {'compiled':>12} {'speedup':>9}  identical")
    for label, t_pure, t_core, same in rows:
        print(f"{label:<16} {1e3 * t_pure:>10.3f}ms {1e3 * t_core:>10.3f}ms "
              f"{t_pure / t_core:>8.1f}x  {same}")
    if not all(r[3] for r in rows):
        raise SystemExit("backend outputs differ")


if __name__ == "__main__":
    main()
