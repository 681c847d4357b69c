import numpy as np
import pytest

from multirat._kernels import BACKEND
from multirat.allocator import (SolverConfig, candidate_count,
                                initial_association, proportional_bandwidth,
                                refine_assignment, round_robin_baseline,
                                solve_heuristic, sp_selection_for_ue)
from multirat.radio import (empty_assignment, sum_rate, ue_rate,
                            validate_assignment)
from conftest import direct_instance, random_instance


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(zeta=2)
    with pytest.raises(ValueError):
        SolverConfig(lm_frac=0.0)
    with pytest.raises(ValueError):
        SolverConfig(epsilon_bps=0.0)


def test_candidate_count_rounds_up():
    assert candidate_count(1.0, 4) == 4
    assert candidate_count(0.5, 4) == 2
    assert candidate_count(0.5, 5) == 3
    assert candidate_count(0.1, 3) == 1


# -- stage one -----------------------------------------------------------------


def test_initial_association_hand_trace():
    """Greedy walk, UEs in id order, strongest SINR first, caps respected.

    UE0 takes SP0 (cap filled) then SP1; UE1 finds SP0 full, takes SP1 and
    SP2; UE2 finds SP1 and SP0 full and ends with SP2 alone.
    """
    gamma = [[9.0, 5.0, 1.0],
             [8.0, 7.0, 2.0],
             [3.0, 6.0, 4.0]]
    s, t = direct_instance(gamma, [10e6] * 3, [1, 2, 2], multi_conn=2)
    a = initial_association(t, s)
    assert a.x.tolist() == [[1, 1, 0],
                            [0, 1, 1],
                            [0, 0, 1]]
    assert (a.y == 0).all()


def test_initial_association_capacity_exhaustion():
    s, t = direct_instance([[5.0], [4.0]], [10e6], [1])
    a = initial_association(t, s)
    assert a.x.tolist() == [[1], [0]]  # later UE left unserved


def test_initial_association_tie_prefers_lower_id():
    s, t = direct_instance([[2.0, 2.0]], [10e6, 10e6], [1, 1])
    a = initial_association(t, s)
    assert a.x.tolist() == [[1, 0]]


def test_initial_association_respects_multi_conn():
    s, t = direct_instance([[5.0, 4.0, 3.0]], [10e6] * 3, [1, 1, 1],
                           multi_conn=2)
    a = initial_association(t, s)
    assert a.x.tolist() == [[1, 1, 0]]


# -- proportional bandwidth ----------------------------------------------------


def test_proportional_split_hand_values():
    s, t = direct_instance([[5.0], [7.0]], [10e6], [2])
    a = empty_assignment(2, 1)
    a.x[:, 0] = 1
    a = proportional_bandwidth(a, t, s)
    assert a.y[0, 0] == pytest.approx(10e6 * 5.0 / 12.0, rel=1e-12)
    assert a.y[1, 0] == pytest.approx(10e6 * 7.0 / 12.0, rel=1e-12)


def test_proportional_split_sums_to_budget():
    rng = np.random.default_rng(3)
    for _ in range(20):
        s, t = random_instance(rng, 6, 3, cap_hi=4)
        a = proportional_bandwidth(initial_association(t, s), t, s)
        for j, sp in enumerate(s.sps):
            got = a.y[:, j].sum()
            if a.x[:, j].any():
                assert got == pytest.approx(sp.bandwidth_hz, rel=1e-12)
            else:
                assert got == 0.0


def test_proportional_split_singleton_gets_everything():
    s, t = direct_instance([[2.5]], [80e6], [1])
    a = proportional_bandwidth(initial_association(t, s), t, s)
    assert a.y[0, 0] == 80e6


# -- single selection step -----------------------------------------------------


def _brute_select(i, j, a, t, s, cfg):
    """Independent candidate scan: full-matrix bandwidth recompute and
    whole-network sum-rate difference per candidate, then the documented
    commit rule (zeta=0: best gain; zeta=1: floor flag first)."""
    n_sp = a.x.shape[1]
    caps = [sp.ue_cap for sp in s.sps]
    floor = s.ues[i].min_rate_bps
    base = sum_rate(a, t)
    cur_flag = 1 if ue_rate(i, a, t) >= floor else 0
    lm = candidate_count(cfg.lm_frac, n_sp)
    cands = sorted((p for p in range(n_sp) if not a.x[i, p]),
                   key=lambda p: (-t.gamma[i, p], p))[:lm]
    scored = {j: (0.0, cur_flag)}
    for p in cands:
        if int(a.x[:, p].sum()) + 1 > caps[p]:
            continue
        b = a.copy()
        b.x[i, j] = 0
        b.x[i, p] = 1
        b = proportional_bandwidth(b, t, s)
        scored[p] = (sum_rate(b, t) - base, 1 if ue_rate(i, b, t) >= floor else 0)
    if cfg.zeta == 0:
        best = max(scored, key=lambda p: (scored[p][0], -p))
    else:
        best = max(scored, key=lambda p: (scored[p][1], scored[p][0], -p))
    return best, scored


def _selection_instance():
    """Two candidates splitting the zeta regimes.

    Moving UE0 off its weak incumbent to the empty SP1 maximizes the network
    gain but leaves UE0 short of its floor; joining busy SP2 gains less
    network-wide while pushing UE0 over the floor.
    """
    gamma = [[0.001, 2.0 ** 0.25 - 1.0, 0.3],
             [0.010, 0.010, 0.1]]
    s, t = direct_instance(gamma, [10e6, 100e6, 100e6], [1, 1, 2],
                           min_rate_bps=27e6)
    a = empty_assignment(2, 3)
    a.x[0, 0] = 1
    a.x[1, 2] = 1
    a = proportional_bandwidth(a, t, s)
    return s, t, a


def test_selection_zeta_regimes_diverge():
    s, t, a = _selection_instance()
    # premise check through the independent scorer: SP1 gains most, only SP2
    # meets the floor, keeping gains nothing
    _, scored = _brute_select(0, 0, a, t, s, SolverConfig(zeta=0))
    assert scored[1][0] > scored[2][0] > 0.0
    assert (scored[0][1], scored[1][1], scored[2][1]) == (0, 0, 1)

    out0 = sp_selection_for_ue(0, 0, a, t, s, SolverConfig(zeta=0))
    assert out0.x[0].tolist() == [0, 1, 0]
    out1 = sp_selection_for_ue(0, 0, a, t, s, SolverConfig(zeta=1))
    assert out1.x[0].tolist() == [0, 0, 1]


def test_selection_requires_existing_link():
    s, t, a = _selection_instance()
    with pytest.raises(ValueError):
        sp_selection_for_ue(0, 1, a, t, s, SolverConfig())


def test_selection_keeps_single_point():
    s, t = direct_instance([[4.0]], [10e6], [1])
    a = proportional_bandwidth(initial_association(t, s), t, s)
    out = sp_selection_for_ue(0, 0, a, t, s, SolverConfig())
    assert out.x.tolist() == a.x.tolist()
    assert out.y.tolist() == a.y.tolist()


def test_selection_skips_full_candidates():
    # SP1 has the higher SINR but no free slot, so UE0 must stay put
    s, t = direct_instance([[1.0, 9.0], [1.0, 9.0]], [10e6, 10e6], [1, 1])
    a = empty_assignment(2, 2)
    a.x[0, 0] = 1
    a.x[1, 1] = 1
    a = proportional_bandwidth(a, t, s)
    out = sp_selection_for_ue(0, 0, a, t, s, SolverConfig())
    assert out.x[0].tolist() == [1, 0]


@pytest.mark.parametrize("zeta", [0, 1])
def test_selection_matches_brute_force(zeta):
    """The kernel's commit must agree with the independent full-recompute
    scorer on randomized instances (clear score gaps, no near-ties)."""
    rng = np.random.default_rng(1234 + zeta)
    checked = 0
    for _ in range(40):
        s, t = random_instance(rng, 5, 4, cap_hi=2, min_rate_bps=30e6)
        a = proportional_bandwidth(initial_association(t, s), t, s)
        links = [(i, j) for i in range(5) for j in range(4) if a.x[i, j]]
        i, j = links[int(rng.integers(0, len(links)))]
        cfg = SolverConfig(zeta=zeta)
        want, _ = _brute_select(i, j, a, t, s, cfg)
        out = sp_selection_for_ue(i, j, a, t, s, cfg)
        got = [p for p in range(4) if out.x[i, p]]
        assert got == [want]
        checked += 1
        # the committed assignment stays feasible and internally consistent
        assert validate_assignment(out, s) == []
    assert checked == 40


def test_selection_truncation_can_hide_the_good_move():
    # candidate ranking is by SINR, so a high-SINR sliver of bandwidth
    # shadows the genuinely useful move once the list is truncated
    gamma = [[0.5, 50.0, 10.0]]
    s, t = direct_instance(gamma, [10e6, 1e3, 100e6], [1, 1, 1])
    a = empty_assignment(1, 3)
    a.x[0, 0] = 1
    a = proportional_bandwidth(a, t, s)
    wide = sp_selection_for_ue(0, 0, a, t, s, SolverConfig(lm_frac=1.0))
    narrow = sp_selection_for_ue(0, 0, a, t, s, SolverConfig(lm_frac=1 / 3))
    assert wide.x[0].tolist() == [0, 0, 1]   # real improvement
    assert narrow.x[0].tolist() == [1, 0, 0]  # truncated list: keep


# -- refinement ----------------------------------------------------------------


def test_refine_trace_monotone_and_converged():
    rng = np.random.default_rng(77)
    for _ in range(25):
        s, t = random_instance(rng, 6, 4, cap_hi=2)
        a = proportional_bandwidth(initial_association(t, s), t, s)
        out, trace = refine_assignment(a, t, s, SolverConfig())
        seq = [trace.initial_sum_rate_bps] + trace.sum_rate_bps
        assert all(b >= a2 for a2, b in zip(seq, seq[1:]))  # exact, no tolerance
        assert trace.converged
        assert trace.iterations <= 100
        assert validate_assignment(out, s) == []


def test_refine_is_idempotent_at_the_fixed_point():
    rng = np.random.default_rng(5)
    s, t = random_instance(rng, 5, 3, cap_hi=2)
    a = proportional_bandwidth(initial_association(t, s), t, s)
    once, _ = refine_assignment(a, t, s, SolverConfig())
    twice, tr = refine_assignment(once, t, s, SolverConfig())
    assert twice.x.tolist() == once.x.tolist()
    assert twice.y.tolist() == once.y.tolist()
    assert tr.iterations == 1  # single sweep confirms the fixed point


def test_refine_single_sweep_equals_manual_selection():
    """One sweep is exactly sp_selection_for_ue applied point by point in
    ascending id order over each point's member snapshot."""
    rng = np.random.default_rng(9)
    s, t = random_instance(rng, 6, 4, cap_hi=2)
    cfg = SolverConfig(max_iters=1)
    a = proportional_bandwidth(initial_association(t, s), t, s)

    manual = a.copy()
    for j in range(4):
        for i in [k for k in range(6) if manual.x[k, j]]:
            manual = sp_selection_for_ue(i, j, manual, t, s, cfg)
    swept, _ = refine_assignment(a, t, s, cfg)
    assert swept.x.tolist() == manual.x.tolist()
    assert swept.y.tolist() == manual.y.tolist()


def test_refine_escapes_shared_point():
    # two UEs start on one point; moving the weaker one to the free point
    # raises the sum rate, and the sweep finds it
    gamma = [[5.0, 1.0], [0.5, 0.4]]
    s, t = direct_instance(gamma, [10e6, 10e6], [2, 2])
    a = empty_assignment(2, 2)
    a.x[:, 0] = 1
    a = proportional_bandwidth(a, t, s)
    out, trace = refine_assignment(a, t, s, SolverConfig())
    assert out.x.tolist() == [[1, 0], [0, 1]]
    assert trace.sum_rate_bps[-1] > trace.initial_sum_rate_bps


# -- full solvers --------------------------------------------------------------


def test_heuristic_solver_end_to_end():
    rng = np.random.default_rng(21)
    s, t = random_instance(rng, 6, 4, cap_hi=2)
    a, report, trace = solve_heuristic(t, s)
    assert report.solver == "heuristic"
    assert report.sum_rate_bps == pytest.approx(sum_rate(a, t), rel=1e-12)
    assert report.iterations == trace.iterations
    assert report.converged
    assert validate_assignment(a, s) == []


def test_heuristic_is_deterministic():
    rng = np.random.default_rng(31)
    s, t = random_instance(rng, 5, 3)
    a1, r1, tr1 = solve_heuristic(t, s)
    a2, r2, tr2 = solve_heuristic(t, s)
    assert a1.x.tolist() == a2.x.tolist()
    assert a1.y.tolist() == a2.y.tolist()
    assert r1.sum_rate_bps == r2.sum_rate_bps
    assert tr1.sum_rate_bps == tr2.sum_rate_bps


def test_round_robin_splits_equally():
    s, t = direct_instance([[5.0], [3.0], [1.0]], [9e6], [3])
    a, report = round_robin_baseline(t, s)
    assert (a.y[:, 0] == 3e6).all()
    assert report.solver == "baseline"
    assert report.iterations == 0


def test_heuristic_beats_baseline_per_instance():
    """Proportional splitting already dominates the equal split on the same
    association, and zeta=0 sweeps never lose sum rate after it."""
    rng = np.random.default_rng(41)
    for _ in range(20):
        s, t = random_instance(rng, 7, 4, cap_hi=2)
        _, rb = round_robin_baseline(t, s)
        _, rh, _ = solve_heuristic(t, s)
        assert rh.sum_rate_bps >= rb.sum_rate_bps * (1 - 1e-12)


@pytest.mark.skipif(BACKEND != "compiled", reason="pure backend already active")
def test_backends_are_bit_identical():
    from multirat._kernels import _core, _pure

    rng = np.random.default_rng(61)
    for _ in range(15):
        n_ue, n_sp = int(rng.integers(2, 8)), int(rng.integers(2, 6))
        gamma = 10.0 ** rng.uniform(-1.5, 2.0, size=(n_ue, n_sp))
        coeff = np.log2(1.0 + gamma)
        w = rng.uniform(1e6, 1e8, size=n_sp)
        cap = rng.integers(1, 4, size=n_sp).astype(np.int64)
        while cap.sum() < n_ue:
            cap[int(rng.integers(0, n_sp))] += 1
        r_min = np.full(n_ue, 30e6)
        x0 = np.zeros((n_ue, n_sp), dtype=np.uint8)
        served = np.zeros(n_sp, dtype=np.int64)
        for i in range(n_ue):
            for j in np.argsort(-gamma[i], kind="stable"):
                if served[j] < cap[j]:
                    x0[i, j] = 1
                    served[j] += 1
                    break
        y0 = np.zeros((n_ue, n_sp))
        for j in range(n_sp):
            m = x0[:, j].astype(bool)
            if m.any():
                y0[m, j] = w[j] * gamma[m, j] / gamma[m, j].sum()

        for zeta in (0, 1):
            xa, ya = x0.copy(), y0.copy()
            xb, yb = x0.copy(), y0.copy()
            ra = _core.refine(gamma, coeff, w, cap, r_min, xa, ya, zeta,
                              n_sp, 1e3, 100)
            rb = _pure.refine(gamma, coeff, w, cap, r_min, xb, yb, zeta,
                              n_sp, 1e3, 100)
            assert (xa == xb).all()
            assert (ya == yb).all()
            assert list(ra[0]) == list(rb[0]) and ra[1:] == rb[1:]

        ea = _core.enumerate_best(coeff, w, cap, 1)
        eb = _pure.enumerate_best(coeff, w, cap, 1)
        assert ea[0] == eb[0]
        assert list(ea[1]) == list(eb[1])
        assert ea[2] == eb[2]
