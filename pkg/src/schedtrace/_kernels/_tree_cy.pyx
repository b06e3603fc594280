# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled tree-growing kernel.

Mirrors _tree_py.grow_tree exactly: same candidate ordering, tie-breaking,
RNG stream, and float64 operation order, so both backends grow
bit-identical trees. Keep the two implementations in lockstep.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t splitmix64_step(uint64_t *state, uint64_t *out) {
        *state += 0x9E3779B97F4A7C15ULL;
        uint64_t z = *state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        *out = z ^ (z >> 31);
        return *state;
    }
    """
    cnp.uint64_t splitmix64_step(cnp.uint64_t *state, cnp.uint64_t *out) nogil


def grow_tree(X, y, sort_idx, weight, max_depth, min_leaf, features_per_split, seed):
    """Grow one CART tree; same contract as _tree_py.grow_tree."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] X_arr = np.ascontiguousarray(
        X, dtype=np.float64
    )
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] y_arr = np.asarray(y, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] w_arr = np.asarray(weight, dtype=np.int64)
    cdef cnp.ndarray[cnp.int32_t, ndim=2, mode="c"] idx = np.array(
        sort_idx, dtype=np.int32, copy=True, order="C"
    )

    cdef Py_ssize_t n = X_arr.shape[0]
    cdef Py_ssize_t k = X_arr.shape[1]
    cdef int m = int(features_per_split)
    if m < 1:
        m = 1
    if m > k:
        m = <int> k
    cdef cnp.int64_t min_w = max(1, int(min_leaf))
    cdef int depth_cap = int(max_depth)
    cdef cnp.uint64_t state = <cnp.uint64_t> (int(seed) & ((1 << 64) - 1))
    cdef cnp.uint64_t z = 0

    cdef cnp.int64_t total_w = 0, total_w1 = 0
    cdef Py_ssize_t i, row
    for i in range(n):
        row = idx[0, i]
        total_w += w_arr[row]
        total_w1 += w_arr[row] * y_arr[row]
    cdef double root_weight = <double> total_w

    cdef cnp.int64_t max_leaves = total_w // min_w
    if max_leaves > n:
        max_leaves = n
    if max_leaves < 1:
        max_leaves = 1
    cdef Py_ssize_t cap = 2 * max_leaves - 1
    cdef Py_ssize_t depth_bound
    if 0 <= depth_cap < 40:
        depth_bound = (<Py_ssize_t> 1 << (depth_cap + 1)) - 1
        if depth_bound < cap:
            cap = depth_bound
    if cap < 1:
        cap = 1

    cdef cnp.ndarray[cnp.int32_t, ndim=1] feature = np.full(cap, -1, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] threshold = np.zeros(cap, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] left = np.full(cap, -1, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] right = np.full(cap, -1, dtype=np.int32)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] w0 = np.zeros(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] w1 = np.zeros(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] decrease = np.zeros(cap, dtype=np.float64)

    # Explicit DFS stack (left child processed first).
    cdef cnp.ndarray[cnp.int64_t, ndim=2] stack = np.zeros((cap, 6), dtype=np.int64)
    cdef Py_ssize_t sp = 0
    cdef Py_ssize_t n_nodes = 1
    stack[0, 0] = 0  # node id
    stack[0, 1] = 0  # start
    stack[0, 2] = n  # end
    stack[0, 3] = 0  # depth
    stack[0, 4] = total_w
    stack[0, 5] = total_w1
    sp = 1

    cdef cnp.ndarray[cnp.int32_t, ndim=1] pool = np.zeros(k, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] cand = np.zeros(k, dtype=np.int32)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] goes_left = np.zeros(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] buf_l = np.zeros(n, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] buf_r = np.zeros(n, dtype=np.int32)

    cdef Py_ssize_t node, start, end, depth, f, fi, ci, j, pos, n_left, nl, nr
    cdef cnp.int64_t w_all, w_pos, wl_i, wl1_i, best_wl, best_wl1
    cdef cnp.int64_t ww
    cdef int n_cand, tmp_f, best_f
    cdef double parent_score, best_score, best_thr
    cdef double wl, wl1, wr, wr1, score, v, vn, thr
    cdef cnp.int32_t left_id, right_id

    while sp > 0:
        sp -= 1
        node = stack[sp, 0]
        start = stack[sp, 1]
        end = stack[sp, 2]
        depth = stack[sp, 3]
        w_all = stack[sp, 4]
        w_pos = stack[sp, 5]
        w0[node] = w_all - w_pos
        w1[node] = w_pos

        if depth >= depth_cap or w_pos == 0 or w_pos == w_all or w_all < 2 * min_w:
            continue

        if m >= k:
            n_cand = <int> k
            for fi in range(k):
                cand[fi] = <cnp.int32_t> fi
        else:
            for fi in range(k):
                pool[fi] = <cnp.int32_t> fi
            for fi in range(m):
                splitmix64_step(&state, &z)
                j = fi + <Py_ssize_t> (z % <cnp.uint64_t> (k - fi))
                tmp_f = pool[fi]
                pool[fi] = pool[j]
                pool[j] = <cnp.int32_t> tmp_f
            n_cand = m
            for fi in range(m):
                cand[fi] = pool[fi]
            # insertion sort: candidates evaluated in ascending feature order
            for fi in range(1, m):
                tmp_f = cand[fi]
                j = fi
                while j > 0 and cand[j - 1] > tmp_f:
                    cand[j] = cand[j - 1]
                    j -= 1
                cand[j] = <cnp.int32_t> tmp_f

        parent_score = <double> w_pos * <double> (w_all - w_pos) / <double> w_all
        best_score = parent_score
        best_f = -1
        best_thr = 0.0
        best_wl = 0
        best_wl1 = 0

        for ci in range(n_cand):
            f = cand[ci]
            wl_i = 0
            wl1_i = 0
            for i in range(start, end - 1):
                row = idx[f, i]
                ww = w_arr[row]
                wl_i += ww
                wl1_i += ww * y_arr[row]
                v = X_arr[row, f]
                vn = X_arr[idx[f, i + 1], f]
                if v == vn:
                    continue
                if wl_i < min_w or w_all - wl_i < min_w:
                    continue
                wl = <double> wl_i
                wl1 = <double> wl1_i
                wr = <double> (w_all - wl_i)
                wr1 = <double> (w_pos - wl1_i)
                score = wl1 * (wl - wl1) / wl + wr1 * (wr - wr1) / wr
                if score < best_score:
                    best_score = score
                    best_f = <int> f
                    thr = (v + vn) * 0.5
                    if thr <= v:
                        thr = vn
                    best_thr = thr
                    best_wl = wl_i
                    best_wl1 = wl1_i

        if best_f < 0:
            continue

        n_left = 0
        for i in range(start, end):
            row = idx[best_f, i]
            if X_arr[row, best_f] < best_thr:
                goes_left[row] = 1
                n_left += 1
            else:
                goes_left[row] = 0
        for f in range(k):
            nl = 0
            nr = 0
            for i in range(start, end):
                row = idx[f, i]
                if goes_left[row]:
                    buf_l[nl] = <cnp.int32_t> row
                    nl += 1
                else:
                    buf_r[nr] = <cnp.int32_t> row
                    nr += 1
            for i in range(nl):
                idx[f, start + i] = buf_l[i]
            for i in range(nr):
                idx[f, start + nl + i] = buf_r[i]

        feature[node] = best_f
        threshold[node] = best_thr
        decrease[node] = 2.0 * (parent_score - best_score) / root_weight
        left_id = <cnp.int32_t> n_nodes
        right_id = <cnp.int32_t> (n_nodes + 1)
        n_nodes += 2
        left[node] = left_id
        right[node] = right_id
        stack[sp, 0] = right_id
        stack[sp, 1] = start + n_left
        stack[sp, 2] = end
        stack[sp, 3] = depth + 1
        stack[sp, 4] = w_all - best_wl
        stack[sp, 5] = w_pos - best_wl1
        sp += 1
        stack[sp, 0] = left_id
        stack[sp, 1] = start
        stack[sp, 2] = start + n_left
        stack[sp, 3] = depth + 1
        stack[sp, 4] = best_wl
        stack[sp, 5] = best_wl1
        sp += 1

    return {
        "feature": feature[:n_nodes].copy(),
        "threshold": threshold[:n_nodes].copy(),
        "left": left[:n_nodes].copy(),
        "right": right[:n_nodes].copy(),
        "w0": w0[:n_nodes].copy(),
        "w1": w1[:n_nodes].copy(),
        "decrease": decrease[:n_nodes].copy(),
    }
