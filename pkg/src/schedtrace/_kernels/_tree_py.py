"""Pure-Python (numpy) tree-growing kernel.

Reference implementation of the CART kernel; the compiled extension in
_tree_cy.pyx follows the exact same candidate ordering, tie-breaking, and
float64 operation order, so both backends grow bit-identical trees. Split
scores use integer-valued weighted class counts (exact in float64), which
makes the arithmetic reproducible across backends.

Candidate thresholds are midpoints between consecutive distinct sorted
feature values; rows with value < threshold go left. The best split is the
first (lowest feature index, lowest threshold) candidate that strictly
minimizes the weighted child Gini sum.
"""

from __future__ import annotations

import numpy as np

_M64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> tuple[int, int]:
    """One step of splitmix64; returns (new state, output)."""
    state = (state + _SPLITMIX_GAMMA) & _M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    z = z ^ (z >> 31)
    return state, z


def grow_tree(X, y, sort_idx, weight, max_depth, min_leaf, features_per_split, seed):
    """Grow one CART tree; see the module docstring for semantics.

    X: (n, k) float64; y: (n,) uint8 in {0, 1}; sort_idx: (k, n) int32 with
    rows stably argsorted per feature; weight: (n,) int64 multiplicities.
    Returns a dict of per-node arrays (feature == -1 marks a leaf).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.uint8)
    weight = np.asarray(weight, dtype=np.int64)
    n, k = X.shape
    m = max(1, min(int(features_per_split), k))
    min_leaf = max(1, int(min_leaf))

    idx = np.array(sort_idx, dtype=np.int32, copy=True)
    goes_left = np.zeros(n, dtype=bool)

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    w0: list[int] = []
    w1: list[int] = []
    decrease: list[float] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        w0.append(0)
        w1.append(0)
        decrease.append(0.0)
        return len(feature) - 1

    root_rows = idx[0, :]
    total_w = int(weight[root_rows].sum())
    total_w1 = int((weight[root_rows] * y[root_rows]).sum())
    root_weight = float(total_w)
    state = seed & _M64

    root = new_node()
    # Stack entries: (node id, start, end, depth, weighted count, weighted positives)
    stack = [(root, 0, n, 0, total_w, total_w1)]
    while stack:
        node, start, end, depth, w_all, w_pos = stack.pop()
        w0[node] = w_all - w_pos
        w1[node] = w_pos

        if depth >= max_depth or w_pos == 0 or w_pos == w_all or w_all < 2 * min_leaf:
            continue

        if m >= k:
            candidates = range(k)
        else:
            pool = list(range(k))
            for i in range(m):
                state, z = splitmix64(state)
                j = i + z % (k - i)
                pool[i], pool[j] = pool[j], pool[i]
            candidates = sorted(pool[:m])

        parent_score = float(w_pos) * float(w_all - w_pos) / float(w_all)
        best_score = parent_score
        best_f = -1
        best_thr = 0.0
        best_wl = 0
        best_wl1 = 0

        for f in candidates:
            seg = idx[f, start:end]
            w_seg = weight[seg]
            vals = X[seg, f]
            wl_cum = np.cumsum(w_seg)[:-1]
            wl1_cum = np.cumsum(w_seg * y[seg])[:-1]
            valid = (
                (vals[:-1] != vals[1:])
                & (wl_cum >= min_leaf)
                & (w_all - wl_cum >= min_leaf)
            )
            if not valid.any():
                continue
            wl = wl_cum[valid].astype(np.float64)
            wl1 = wl1_cum[valid].astype(np.float64)
            wr = w_all - wl
            wr1 = w_pos - wl1
            score = wl1 * (wl - wl1) / wl + wr1 * (wr - wr1) / wr
            pos = int(np.argmin(score))
            if score[pos] < best_score:
                best_score = float(score[pos])
                best_f = f
                boundary = np.flatnonzero(valid)[pos]
                v, vn = float(vals[boundary]), float(vals[boundary + 1])
                thr = (v + vn) * 0.5
                if thr <= v:
                    thr = vn
                best_thr = thr
                best_wl = int(wl_cum[boundary])
                best_wl1 = int(wl1_cum[boundary])

        if best_f < 0:
            continue

        seg = idx[best_f, start:end]
        goes_left[seg] = X[seg, best_f] < best_thr
        n_left = int(np.count_nonzero(goes_left[seg]))
        for f in range(k):
            seg_f = idx[f, start:end]
            mask = goes_left[seg_f]
            idx[f, start:end] = np.concatenate([seg_f[mask], seg_f[~mask]])

        feature[node] = best_f
        threshold[node] = best_thr
        decrease[node] = 2.0 * (parent_score - best_score) / root_weight
        left_id = new_node()
        right_id = new_node()
        left[node] = left_id
        right[node] = right_id
        stack.append(
            (right_id, start + n_left, end, depth + 1, w_all - best_wl, w_pos - best_wl1)
        )
        stack.append((left_id, start, start + n_left, depth + 1, best_wl, best_wl1))

    return {
        "feature": np.asarray(feature, dtype=np.int32),
        "threshold": np.asarray(threshold, dtype=np.float64),
        "left": np.asarray(left, dtype=np.int32),
        "right": np.asarray(right, dtype=np.int32),
        "w0": np.asarray(w0, dtype=np.int64),
        "w1": np.asarray(w1, dtype=np.int64),
        "decrease": np.asarray(decrease, dtype=np.float64),
    }
