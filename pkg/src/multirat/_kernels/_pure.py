"""Pure-Python solver kernels.

The compiled extension (multirat._kernels._core) mirrors this module statement
for statement.  Every floating-point expression here is written in the exact
order the C code evaluates it (plain +,*,/ on float64, columns scanned in
ascending UE id, service points in ascending id), so both backends produce
bit-identical assignments, traces and objective values.  Keep the two files in
lockstep when editing either.
"""

from __future__ import annotations


def _col_stats(x, gamma, coeff, n_ue, p, skip_ue, add_ue):
    """SINR-weighted sums over service point p's member column.

    Returns (sum of gamma*coeff, sum of gamma, member count) over UEs k with
    x[k, p] set, visited in ascending k; skip_ue is left out, add_ue is
    counted even when unset (tentative swap without touching x).
    """
    num = 0.0
    den = 0.0
    count = 0
    for k in range(n_ue):
        if k == skip_ue:
            continue
        if x[k, p] or k == add_ue:
            g = gamma[k, p]
            num += g * coeff[k, p]
            den += g
            count += 1
    return num, den, count


def _contribution(w_p, num, den, count):
    # Sum rate earned at one service point under the proportional split.
    if count == 0:
        return 0.0
    return w_p * num / den


def _recompute_column(x, gamma, y, w, n_ue, p):
    """Reset column p of y to the proportional split implied by x."""
    den = 0.0
    for k in range(n_ue):
        if x[k, p]:
            den += gamma[k, p]
    for k in range(n_ue):
        if x[k, p]:
            y[k, p] = w[p] * gamma[k, p] / den
        else:
            y[k, p] = 0.0


def _ue_rate(x, y, coeff, n_sp, i):
    r = 0.0
    for p in range(n_sp):
        if x[i, p]:
            r += y[i, p] * coeff[i, p]
    return r


def _total_rate(x, y, coeff, n_ue, n_sp):
    s = 0.0
    for k in range(n_ue):
        for p in range(n_sp):
            if x[k, p]:
                s += y[k, p] * coeff[k, p]
    return s


def select_step(gamma, coeff, w, cap, r_min, x, y, i, j, zeta, lm_count):
    """One association-selection step for UE i currently held by point j.

    Scores keeping j against moving to each admissible alternative: the gain
    is the sum-rate delta after re-splitting the two touched columns, the flag
    marks whether UE i's own rate would meet its floor.  zeta=0 maximizes the
    gain; zeta=1 maximizes the flag first and the gain second.  Ties fall to
    the lower point id.  Commits the winner into x and y in place and returns
    the committed gain (0.0 when keeping).
    """
    n_ue, n_sp = gamma.shape

    num_j, den_j, cnt_j = _col_stats(x, gamma, coeff, n_ue, j, -1, -1)
    contrib_j_cur = _contribution(w[j], num_j, den_j, cnt_j)
    num_j2, den_j2, cnt_j2 = _col_stats(x, gamma, coeff, n_ue, j, i, -1)
    contrib_j_without = _contribution(w[j], num_j2, den_j2, cnt_j2)
    r_cur = _ue_rate(x, y, coeff, n_sp, i)

    # Incumbent scores as the keep candidate.
    best_j = j
    best_gain = 0.0
    best_flag = 1 if r_cur >= r_min[i] else 0

    # Alternatives: points not serving i, strongest SINR first, id breaking
    # sort ties, list truncated to lm_count entries.
    order = sorted((p for p in range(n_sp) if not x[i, p]),
                   key=lambda p: (-gamma[i, p], p))
    for p in order[:lm_count]:
        num_p, den_p, cnt_p = _col_stats(x, gamma, coeff, n_ue, p, -1, -1)
        if cnt_p + 1 > cap[p]:
            continue
        contrib_p_cur = _contribution(w[p], num_p, den_p, cnt_p)
        num_p2, den_p2, cnt_p2 = _col_stats(x, gamma, coeff, n_ue, p, -1, i)
        contrib_p_new = _contribution(w[p], num_p2, den_p2, cnt_p2)
        gain = (contrib_j_without + contrib_p_new) - (contrib_j_cur + contrib_p_cur)
        y_ip = w[p] * gamma[i, p] / den_p2
        r_new = r_cur - y[i, j] * coeff[i, j] + y_ip * coeff[i, p]
        flag = 1 if r_new >= r_min[i] else 0
        if zeta == 0:
            better = gain > best_gain or (gain == best_gain and p < best_j)
        else:
            better = flag > best_flag or (
                flag == best_flag and (gain > best_gain or
                                       (gain == best_gain and p < best_j)))
        if better:
            best_j = p
            best_gain = gain
            best_flag = flag

    if best_j != j:
        x[i, j] = 0
        x[i, best_j] = 1
        _recompute_column(x, gamma, y, w, n_ue, j)
        _recompute_column(x, gamma, y, w, n_ue, best_j)
        return best_gain
    return 0.0


def refine(gamma, coeff, w, cap, r_min, x, y, zeta, lm_count, eps, max_iters):
    """Sweep the selection step until the sum rate stops moving.

    Mutates x and y in place.  Returns (trace, converged, initial_sum_rate)
    where trace holds the running sum rate after each full sweep.  The running
    value is maintained incrementally (start value plus committed gains), so
    with zeta=0 it is exactly non-decreasing.
    """
    n_ue, n_sp = gamma.shape
    s_run = _total_rate(x, y, coeff, n_ue, n_sp)
    s_init = s_run
    prev = s_run
    trace: list[float] = []
    converged = False
    for _ in range(max_iters):
        for j in range(n_sp):
            members = [k for k in range(n_ue) if x[k, j]]
            for i in members:
                s_run = s_run + select_step(gamma, coeff, w, cap, r_min,
                                            x, y, i, j, zeta, lm_count)
        trace.append(s_run)
        if abs(s_run - prev) < eps:
            converged = True
            break
        prev = s_run
    return trace, converged, s_init


def enumerate_best(coeff, w, cap, j_ue):
    """Exhaustive search over associations, winner-takes-all bandwidth stage.

    Each UE may hold up to j_ue links; per-point caps prune the recursion.
    A point's best achievable sum-rate share is its full bandwidth times the
    best spectral efficiency among its members, which is the exact optimum of
    the bandwidth LP without rate floors.  Returns (best value, best x flat
    list, leaves visited); ties keep the first maximizer in row-major
    lexicographic order, so the result is enumeration-order independent.
    """
    n_ue, n_sp = coeff.shape
    rows_menu = _row_masks(n_sp, j_ue)
    counts = [0] * n_sp
    cur_max = [0.0] * n_sp
    chosen = [0] * n_ue  # index into rows_menu per UE
    best_value = -1.0
    best_chosen: list[int] | None = None
    leaves = 0

    def leaf_value():
        v = 0.0
        for p in range(n_sp):
            if counts[p] > 0:
                v += w[p] * cur_max[p]
        return v

    def descend(i):
        nonlocal best_value, best_chosen, leaves
        if i == n_ue:
            leaves += 1
            v = leaf_value()
            if v > best_value:
                best_value = v
                best_chosen = chosen.copy()
            return
        for mi, bits in enumerate(rows_menu):
            undo = []
            ok = True
            for p in bits:
                if counts[p] + 1 > cap[p]:
                    ok = False
                    break
                counts[p] += 1
                c = coeff[i, p]
                undo.append((p, cur_max[p]))
                if c > cur_max[p]:
                    cur_max[p] = c
            if ok:
                chosen[i] = mi
                descend(i + 1)
            for p, old in reversed(undo):
                counts[p] -= 1
                cur_max[p] = old

    descend(0)
    x_flat = [0] * (n_ue * n_sp)
    if best_chosen is not None:
        for i in range(n_ue):
            for p in rows_menu[best_chosen[i]]:
                x_flat[i * n_sp + p] = 1
    return best_value, x_flat, leaves


def _row_masks(n_sp, j_ue):
    """Per-UE association rows with at most j_ue links, in lex order.

    Each row is returned as its ascending list of linked point ids.  Rows are
    ordered lexicographically by the binary vector (x_i0, x_i1, ...), so the
    first maximizer found during enumeration is the lexicographically
    smallest flattened x.
    """
    import itertools

    items = []
    for k in range(min(j_ue, n_sp) + 1):
        for bits in itertools.combinations(range(n_sp), k):
            key = 0
            for p in bits:
                key |= 1 << (n_sp - 1 - p)
            items.append((key, list(bits)))
    items.sort(key=lambda kv: kv[0])
    return [bits for _, bits in items]
