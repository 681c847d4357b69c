# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled solver kernels.

Mirrors multirat._kernels._pure statement for statement: identical loop
structure and floating-point evaluation order, so both backends return
bit-identical assignments, traces and objectives.  Keep the two files in
lockstep when editing either.
"""

import itertools

from libc.math cimport fabs
from libc.stdlib cimport free, malloc

import numpy as np

cimport numpy as cnp

ctypedef unsigned char u8
ctypedef cnp.int64_t i64


cdef void _col_stats(const u8[:, ::1] x, const double[:, ::1] gamma,
                     const double[:, ::1] coeff, int n_ue, int p,
                     int skip_ue, int add_ue,
                     double* num, double* den, int* count) noexcept nogil:
    cdef int k
    cdef double g
    num[0] = 0.0
    den[0] = 0.0
    count[0] = 0
    for k in range(n_ue):
        if k == skip_ue:
            continue
        if x[k, p] or k == add_ue:
            g = gamma[k, p]
            num[0] += g * coeff[k, p]
            den[0] += g
            count[0] += 1


cdef inline double _contribution(double w_p, double num, double den,
                                 int count) noexcept nogil:
    if count == 0:
        return 0.0
    return w_p * num / den


cdef void _recompute_column(const u8[:, ::1] x, const double[:, ::1] gamma,
                            double[:, ::1] y, const double[::1] w,
                            int n_ue, int p) noexcept nogil:
    cdef int k
    cdef double den = 0.0
    for k in range(n_ue):
        if x[k, p]:
            den += gamma[k, p]
    for k in range(n_ue):
        if x[k, p]:
            y[k, p] = w[p] * gamma[k, p] / den
        else:
            y[k, p] = 0.0


cdef double _ue_rate(const u8[:, ::1] x, const double[:, ::1] y,
                     const double[:, ::1] coeff, int n_sp, int i) noexcept nogil:
    cdef int p
    cdef double r = 0.0
    for p in range(n_sp):
        if x[i, p]:
            r += y[i, p] * coeff[i, p]
    return r


cdef double _total_rate(const u8[:, ::1] x, const double[:, ::1] y,
                        const double[:, ::1] coeff, int n_ue,
                        int n_sp) noexcept nogil:
    cdef int k, p
    cdef double s = 0.0
    for k in range(n_ue):
        for p in range(n_sp):
            if x[k, p]:
                s += y[k, p] * coeff[k, p]
    return s


cdef double _select_step(const double[:, ::1] gamma, const double[:, ::1] coeff,
                         const double[::1] w, const i64[::1] cap,
                         const double[::1] r_min, u8[:, ::1] x,
                         double[:, ::1] y, int i, int j, int zeta,
                         int lm_count) except? -1.0:
    cdef int n_ue = gamma.shape[0]
    cdef int n_sp = gamma.shape[1]
    cdef double num_j, den_j, num_j2, den_j2, num_p, den_p, num_p2, den_p2
    cdef int cnt_j, cnt_j2, cnt_p, cnt_p2
    cdef double contrib_j_cur, contrib_j_without, contrib_p_cur, contrib_p_new
    cdef double r_cur, best_gain, gain, y_ip, r_new, key_g
    cdef int best_j, best_flag, flag, p, idx, a, b, key_id, n_cand, limit
    cdef bint better

    _col_stats(x, gamma, coeff, n_ue, j, -1, -1, &num_j, &den_j, &cnt_j)
    contrib_j_cur = _contribution(w[j], num_j, den_j, cnt_j)
    _col_stats(x, gamma, coeff, n_ue, j, i, -1, &num_j2, &den_j2, &cnt_j2)
    contrib_j_without = _contribution(w[j], num_j2, den_j2, cnt_j2)
    r_cur = _ue_rate(x, y, coeff, n_sp, i)

    best_j = j
    best_gain = 0.0
    best_flag = 1 if r_cur >= r_min[i] else 0

    cdef int* cand_id = <int*> malloc(n_sp * sizeof(int))
    cdef double* cand_g = <double*> malloc(n_sp * sizeof(double))
    if cand_id == NULL or cand_g == NULL:
        free(cand_id)
        free(cand_g)
        raise MemoryError()

    # Alternatives in ascending id, then a stable insertion sort by SINR
    # descending; ties keep the lower id, matching sorted(key=(-g, p)).
    n_cand = 0
    for p in range(n_sp):
        if not x[i, p]:
            cand_id[n_cand] = p
            cand_g[n_cand] = gamma[i, p]
            n_cand += 1
    for a in range(1, n_cand):
        key_g = cand_g[a]
        key_id = cand_id[a]
        b = a - 1
        while b >= 0 and cand_g[b] < key_g:
            cand_g[b + 1] = cand_g[b]
            cand_id[b + 1] = cand_id[b]
            b -= 1
        cand_g[b + 1] = key_g
        cand_id[b + 1] = key_id

    limit = lm_count if lm_count < n_cand else n_cand
    for idx in range(limit):
        p = cand_id[idx]
        _col_stats(x, gamma, coeff, n_ue, p, -1, -1, &num_p, &den_p, &cnt_p)
        if cnt_p + 1 > cap[p]:
            continue
        contrib_p_cur = _contribution(w[p], num_p, den_p, cnt_p)
        _col_stats(x, gamma, coeff, n_ue, p, -1, i, &num_p2, &den_p2, &cnt_p2)
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

    free(cand_id)
    free(cand_g)

    if best_j != j:
        x[i, j] = 0
        x[i, best_j] = 1
        _recompute_column(x, gamma, y, w, n_ue, j)
        _recompute_column(x, gamma, y, w, n_ue, best_j)
        return best_gain
    return 0.0


def select_step(const double[:, ::1] gamma, const double[:, ::1] coeff,
                const double[::1] w, const i64[::1] cap,
                const double[::1] r_min, u8[:, ::1] x, double[:, ::1] y,
                int i, int j, int zeta, int lm_count):
    """See multirat._kernels._pure.select_step."""
    return _select_step(gamma, coeff, w, cap, r_min, x, y, i, j, zeta, lm_count)


def refine(const double[:, ::1] gamma, const double[:, ::1] coeff,
           const double[::1] w, const i64[::1] cap, const double[::1] r_min,
           u8[:, ::1] x, double[:, ::1] y, int zeta, int lm_count,
           double eps, int max_iters):
    """See multirat._kernels._pure.refine."""
    cdef int n_ue = gamma.shape[0]
    cdef int n_sp = gamma.shape[1]
    cdef double s_run = _total_rate(x, y, coeff, n_ue, n_sp)
    cdef double s_init = s_run
    cdef double prev = s_run
    cdef bint converged = False
    cdef int it, j, k, idx, n_members
    trace = []
    cdef int* members = <int*> malloc(max(n_ue, 1) * sizeof(int))
    if members == NULL:
        raise MemoryError()
    try:
        for it in range(max_iters):
            for j in range(n_sp):
                n_members = 0
                for k in range(n_ue):
                    if x[k, j]:
                        members[n_members] = k
                        n_members += 1
                for idx in range(n_members):
                    s_run = s_run + _select_step(gamma, coeff, w, cap, r_min,
                                                 x, y, members[idx], j, zeta,
                                                 lm_count)
            trace.append(s_run)
            if fabs(s_run - prev) < eps:
                converged = True
                break
            prev = s_run
    finally:
        free(members)
    return trace, converged, s_init


cdef void _descend(int i, int n_ue, int n_sp, int n_rows,
                   const double[:, ::1] coeff, const double[::1] w,
                   const i64[::1] cap,
                   int* row_nbits, int* row_bits, int max_bits,
                   int* counts, double* cur_max, int* chosen,
                   double* best_value, int* best_chosen, long* leaves,
                   int* undo_p, double* undo_v) noexcept nogil:
    cdef int p, mi, b, nb_applied
    cdef double v, c
    cdef bint ok
    if i == n_ue:
        leaves[0] += 1
        v = 0.0
        for p in range(n_sp):
            if counts[p] > 0:
                v += w[p] * cur_max[p]
        if v > best_value[0]:
            best_value[0] = v
            for p in range(n_ue):
                best_chosen[p] = chosen[p]
        return
    for mi in range(n_rows):
        ok = True
        nb_applied = 0
        for b in range(row_nbits[mi]):
            p = row_bits[mi * max_bits + b]
            if counts[p] + 1 > cap[p]:
                ok = False
                break
            counts[p] += 1
            c = coeff[i, p]
            undo_p[i * max_bits + nb_applied] = p
            undo_v[i * max_bits + nb_applied] = cur_max[p]
            nb_applied += 1
            if c > cur_max[p]:
                cur_max[p] = c
        if ok:
            chosen[i] = mi
            _descend(i + 1, n_ue, n_sp, n_rows, coeff, w, cap, row_nbits,
                     row_bits, max_bits, counts, cur_max, chosen, best_value,
                     best_chosen, leaves, undo_p, undo_v)
        for b in range(nb_applied - 1, -1, -1):
            p = undo_p[i * max_bits + b]
            counts[p] -= 1
            cur_max[p] = undo_v[i * max_bits + b]


def enumerate_best(const double[:, ::1] coeff, const double[::1] w,
                   const i64[::1] cap, int j_ue):
    """See multirat._kernels._pure.enumerate_best."""
    cdef int n_ue = coeff.shape[0]
    cdef int n_sp = coeff.shape[1]

    # Row menu in lexicographic order of the binary row vector.
    items = []
    cdef int k, p
    for k in range(min(j_ue, n_sp) + 1):
        for bits in itertools.combinations(range(n_sp), k):
            key = 0
            for p in bits:
                key |= 1 << (n_sp - 1 - p)
            items.append((key, list(bits)))
    items.sort(key=lambda kv: kv[0])
    menu = [bits for _, bits in items]

    cdef int n_rows = len(menu)
    cdef int max_bits = min(j_ue, n_sp) if n_sp else 0
    if max_bits == 0:
        max_bits = 1
    cdef int* row_nbits = <int*> malloc(n_rows * sizeof(int))
    cdef int* row_bits = <int*> malloc(n_rows * max_bits * sizeof(int))
    cdef int* counts = <int*> malloc(max(n_sp, 1) * sizeof(int))
    cdef double* cur_max = <double*> malloc(max(n_sp, 1) * sizeof(double))
    cdef int* chosen = <int*> malloc(max(n_ue, 1) * sizeof(int))
    cdef int* best_chosen = <int*> malloc(max(n_ue, 1) * sizeof(int))
    cdef int* undo_p = <int*> malloc(max(n_ue, 1) * max_bits * sizeof(int))
    cdef double* undo_v = <double*> malloc(max(n_ue, 1) * max_bits * sizeof(double))
    if (row_nbits == NULL or row_bits == NULL or counts == NULL or
            cur_max == NULL or chosen == NULL or best_chosen == NULL or
            undo_p == NULL or undo_v == NULL):
        free(row_nbits); free(row_bits); free(counts); free(cur_max)
        free(chosen); free(best_chosen); free(undo_p); free(undo_v)
        raise MemoryError()

    cdef int mi, b
    for mi in range(n_rows):
        bits = menu[mi]
        row_nbits[mi] = len(bits)
        for b in range(len(bits)):
            row_bits[mi * max_bits + b] = bits[b]
    for p in range(n_sp):
        counts[p] = 0
        cur_max[p] = 0.0
    for k in range(n_ue):
        chosen[k] = 0
        best_chosen[k] = 0

    cdef double best_value = -1.0
    cdef long leaves = 0
    _descend(0, n_ue, n_sp, n_rows, coeff, w, cap, row_nbits, row_bits,
             max_bits, counts, cur_max, chosen, &best_value, best_chosen,
             &leaves, undo_p, undo_v)

    x_flat = [0] * (n_ue * n_sp)
    if leaves > 0:
        for k in range(n_ue):
            for p in menu[best_chosen[k]]:
                x_flat[k * n_sp + p] = 1
    free(row_nbits); free(row_bits); free(counts); free(cur_max)
    free(chosen); free(best_chosen); free(undo_p); free(undo_v)
    return best_value, x_flat, leaves
