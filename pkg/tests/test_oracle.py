import itertools
import math
from dataclasses import replace

import numpy as np
import pytest

from multirat.allocator import initial_association, solve_heuristic
from multirat.errors import BudgetExceeded, InfeasibleProblem
from multirat.oracle import (association_count, optimal_bandwidth_for_association,
                             solve_exact, winner_takes_all_bandwidth)
from multirat.radio import empty_assignment, sum_rate, ue_rate
from conftest import direct_instance, random_instance


def test_winner_takes_all_hand_example():
    gamma = [[3.0, 0.2], [7.0, 0.1], [0.5, 2.0]]
    s, t = direct_instance(gamma, [10e6, 20e6], [2, 1])
    a = empty_assignment(3, 2)
    a.x[0, 0] = a.x[1, 0] = a.x[2, 1] = 1
    out = winner_takes_all_bandwidth(a, t, s)
    # UE1 has the better coefficient on the shared point
    assert out.y.tolist() == [[0.0, 0.0], [10e6, 0.0], [0.0, 20e6]]


def test_winner_takes_all_tie_prefers_lower_id():
    s, t = direct_instance([[2.0], [2.0]], [10e6], [2])
    a = empty_assignment(2, 1)
    a.x[:, 0] = 1
    out = winner_takes_all_bandwidth(a, t, s)
    assert out.y.tolist() == [[10e6], [0.0]]


def test_lp_agrees_with_closed_form_when_floors_are_off():
    rng = np.random.default_rng(17)
    for _ in range(15):
        s, t = random_instance(rng, 5, 3, cap_hi=3)
        a = initial_association(t, s)
        closed = winner_takes_all_bandwidth(a, t, s)
        res = optimal_bandwidth_for_association(a, t, s, enforce_qos=False)
        assert res is not None
        lp_a, objective = res
        assert objective == pytest.approx(sum_rate(closed, t), rel=1e-9)
        assert sum_rate(lp_a, t) == pytest.approx(objective, rel=1e-9)


def test_qos_lp_single_point_frozen():
    """One point, W = 10 MHz, coefficients [2, 1], both floors 1 Mbit/s.

    The objective 2*y0 + y1 falls by one for every hertz diverted to the
    weak UE, so the floor binds exactly: y = (9e6, 1e6), objective 19e6.
    """
    s, t = direct_instance([[3.0], [1.0]], [10e6], [2], min_rate_bps=1e6)
    a = empty_assignment(2, 1)
    a.x[:, 0] = 1
    res = optimal_bandwidth_for_association(a, t, s, enforce_qos=True)
    assert res is not None
    out, objective = res
    assert objective == pytest.approx(19e6, rel=1e-9)
    assert out.y[0, 0] == pytest.approx(9e6, rel=1e-9)
    assert out.y[1, 0] == pytest.approx(1e6, rel=1e-9)
    # independent check: scan the one free variable
    best = max(2.0 * (10e6 - y1) + y1
               for y1 in np.linspace(0.0, 10e6, 10001)
               if y1 >= 1e6 and 2.0 * (10e6 - y1) >= 1e6)
    assert objective == pytest.approx(best, rel=1e-4)


def test_qos_lp_two_points_frozen():
    # coefficients: UE0 earns 1.0 on both points, UE1 earns 2.0 on point 0
    s, t = direct_instance([[1.0, 1.0], [3.0, 1e-12]], [1e6, 1e6], [2, 1])
    s = replace(s, ues=(replace(s.ues[0], min_rate_bps=1.5e6),
                        replace(s.ues[1], min_rate_bps=0.1e6)))
    a = empty_assignment(2, 2)
    a.x[0, 0] = a.x[0, 1] = a.x[1, 0] = 1
    res = optimal_bandwidth_for_association(a, t, s, enforce_qos=True)
    assert res is not None
    out, objective = res
    # point 1 goes wholly to UE0, the remaining 0.5e6 of its floor comes from
    # point 0, and UE1 keeps the rest of point 0
    assert objective == pytest.approx(2.5e6, rel=1e-9)
    assert out.y[0, 1] == pytest.approx(1e6, rel=1e-9)
    assert out.y[0, 0] == pytest.approx(0.5e6, rel=1e-9)
    assert out.y[1, 0] == pytest.approx(0.5e6, rel=1e-9)
    assert ue_rate(0, out, t) >= 1.5e6 * (1 - 1e-9)
    # floors cost throughput against the unconstrained split
    free = sum_rate(winner_takes_all_bandwidth(a, t, s), t)
    assert objective < free


def test_qos_lp_infeasible_floor():
    s, t = direct_instance([[1.0]], [1e6], [1], min_rate_bps=2e6)
    a = empty_assignment(1, 1)
    a.x[0, 0] = 1
    assert optimal_bandwidth_for_association(a, t, s, enforce_qos=True) is None


def test_qos_lp_unserved_ue_with_floor():
    s, t = direct_instance([[5.0], [4.0]], [10e6], [1], min_rate_bps=1e6)
    a = empty_assignment(2, 1)
    a.x[0, 0] = 1  # UE1 has no link at all
    assert optimal_bandwidth_for_association(a, t, s, enforce_qos=True) is None


def test_empty_association_solves_to_zero():
    s, t = direct_instance([[5.0]], [10e6], [1])
    a = empty_assignment(1, 1)
    res = optimal_bandwidth_for_association(a, t, s)
    assert res is not None
    assert res[1] == 0.0
    assert (res[0].y == 0.0).all()


# -- exhaustive solver ---------------------------------------------------------


def test_association_count_examples():
    assert association_count(4, 1, 6) == 5**6
    assert association_count(3, 2, 2) == 49
    assert association_count(2, 5, 1) == 4  # link cap clamps at n_sp


def test_solve_exact_singleton():
    s, t = direct_instance([[4.0]], [50e6], [1])
    a, report = solve_exact(t, s)
    assert a.x.tolist() == [[1]]
    assert a.y[0, 0] == 50e6
    assert report.solver == "oracle"
    assert report.sum_rate_bps == pytest.approx(50e6 * math.log2(5.0), rel=1e-12)
    assert report.iterations == 2  # empty row and linked row both visited


def test_solve_exact_matches_inline_enumeration():
    # UE0 marginally prefers the wide point that UE1 badly needs, so the
    # strongest-first pairing is not the optimum here
    gamma = [[1.0, 1.1], [0.5, 10.0]]
    w = [1e6, 60e6]
    s, t = direct_instance(gamma, w, [1, 1])
    a, report = solve_exact(t, s)
    assert initial_association(t, s).x.tolist() != a.x.tolist()

    options = [(), (0,), (1,)]
    best_val, best_x = -1.0, None
    for pick in itertools.product(options, repeat=2):
        used = [sum(1 for row in pick if j in row) for j in range(2)]
        if any(u > 1 for u in used):
            continue
        val = 0.0
        for j in range(2):
            members = [i for i, row in enumerate(pick) if j in row]
            if members:
                val += w[j] * max(t.rate_coeff[i, j] for i in members)
        if val > best_val:
            best_val = val
            best_x = [[1 if j in row else 0 for j in range(2)] for row in pick]

    assert report.sum_rate_bps == pytest.approx(best_val, rel=1e-12)
    assert a.x.tolist() == best_x
    assert a.x.tolist() == [[1, 0], [0, 1]]


def test_oracle_never_below_heuristic():
    rng = np.random.default_rng(23)
    for _ in range(20):
        s, t = random_instance(rng, 4, 3, cap_hi=2)
        _, rh, _ = solve_heuristic(t, s)
        _, ro = solve_exact(t, s)
        assert ro.sum_rate_bps >= rh.sum_rate_bps * (1 - 1e-9)


def test_extra_links_never_hurt_the_oracle():
    rng = np.random.default_rng(29)
    for _ in range(10):
        s, t = random_instance(rng, 3, 3, cap_hi=2)
        _, r1 = solve_exact(t, s, multi_conn=1)
        _, r2 = solve_exact(t, s, multi_conn=2)
        assert r2.sum_rate_bps >= r1.sum_rate_bps * (1 - 1e-12)


def test_budget_guard():
    rng = np.random.default_rng(31)
    s, t = random_instance(rng, 12, 10, cap_hi=2)
    with pytest.raises(BudgetExceeded):
        solve_exact(t, s)  # 11**12 candidates
    s2, t2 = random_instance(rng, 2, 2)
    solve_exact(t2, s2, budget=9)  # 3**2 fits exactly
    with pytest.raises(BudgetExceeded):
        solve_exact(t2, s2, budget=8)


def test_solve_exact_with_floors_enforced():
    s, t = direct_instance([[3.0], [1.0]], [10e6], [2], min_rate_bps=1e6,
                           multi_conn=1)
    a, report = solve_exact(t, s, enforce_qos=True)
    assert report.sum_rate_bps == pytest.approx(19e6, rel=1e-9)
    assert report.success_prob == 1.0
    assert a.x.tolist() == [[1], [1]]


def test_solve_exact_qos_infeasible_raises():
    s, t = direct_instance([[1.0], [1.0]], [1e6], [1], min_rate_bps=5e6)
    with pytest.raises(InfeasibleProblem):
        solve_exact(t, s, enforce_qos=True)


def test_qos_optimum_never_above_free_optimum():
    rng = np.random.default_rng(37)
    for _ in range(10):
        s, t = random_instance(rng, 3, 2, cap_hi=2, min_rate_bps=1e3)
        _, free = solve_exact(t, s)
        _, floored = solve_exact(t, s, enforce_qos=True)
        assert floored.sum_rate_bps <= free.sum_rate_bps * (1 + 1e-9)
