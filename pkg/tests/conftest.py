"""Shared builders for hand-constructed micro instances.

Solver tests want exact control over the SINR matrix and the per-SP budgets,
so these helpers assemble Scenario/SinrTable pairs directly instead of going
through the random generator.
"""

import numpy as np

from multirat.radio import SinrTable
from multirat.scenario import (NR5G, WIFI6, Scenario, ScenarioConfig,
                               ServicePoint, UserEquipment)


def make_sp(j, rat, w_hz, cap, power_w=10.0, antennas=1, carrier_hz=6e9):
    return ServicePoint(id=j, rat=rat, position_m=(100.0 * j, 0.0),
                        antennas=antennas, max_power_w=power_w,
                        bandwidth_hz=float(w_hz), carrier_hz=carrier_hz,
                        ue_cap=int(cap))


def direct_instance(gamma, w_hz, caps, rats=None, *, multi_conn=1,
                    min_rate_bps=0.5e6, noise_w=1e-9):
    """Scenario plus SinrTable carrying the given SINR matrix.

    Geometry is inert; the node records only carry the bandwidths, caps and
    rate floors the solvers read.  Per-SP fields may deviate from the config
    profiles, so the result is for solver-level tests, not scenario.validate.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    n_ue, n_sp = gamma.shape
    if rats is None:
        rats = [NR5G] * n_sp
    sps = tuple(make_sp(j, rats[j], w_hz[j], caps[j]) for j in range(n_sp))
    ues = tuple(UserEquipment(id=i, position_m=(50.0 * i, 50.0),
                              min_rate_bps=min_rate_bps)
                for i in range(n_ue))
    cfg = ScenarioConfig(num_bs=sum(1 for r in rats if r == NR5G),
                         num_ap=sum(1 for r in rats if r == WIFI6),
                         num_ue=n_ue, num_jammers=0, min_sp_spacing_m=0.0,
                         multi_conn=multi_conn, min_rate_bps=min_rate_bps,
                         noise_power_w=noise_w)
    s = Scenario(config=cfg, sps=sps, ues=ues, jammers=())
    t = SinrTable(gamma=gamma, rate_coeff=np.log2(1.0 + gamma))
    return s, t


def random_instance(rng, n_ue, n_sp, *, multi_conn=1, cap_hi=3,
                    min_rate_bps=0.5e6):
    """Random SINR matrix and budgets with enough capacity to serve every UE."""
    gamma = 10.0 ** rng.uniform(-1.5, 2.0, size=(n_ue, n_sp))
    w_hz = rng.uniform(20e6, 120e6, size=n_sp)
    caps = rng.integers(1, cap_hi + 1, size=n_sp)
    while caps.sum() < n_ue:  # keep total capacity sufficient
        caps[rng.integers(0, n_sp)] += 1
    return direct_instance(gamma, w_hz, [int(c) for c in caps],
                           multi_conn=multi_conn, min_rate_bps=min_rate_bps)
