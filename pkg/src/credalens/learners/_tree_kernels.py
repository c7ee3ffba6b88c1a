"""Compiled kernels for growing and evaluating binary decision trees.

Two growth strategies:

* :func:`grow_tree` — depth-first, per-node candidate sampling.  Used by the
  forest learners (exhaustive thresholds for DRF, one random threshold per
  candidate for XRT).  Expects column-major data so per-node gathers stay
  cache-local.
* :func:`grow_tree_levelwise` — breadth-first scan over per-fit presorted
  columns.  Used by boosting, where the same matrix is split hundreds of
  times and the presort amortizes to almost nothing.

Split quality is the sum-of-squares reduction; for 0/1 labels this equals
half the count-weighted Gini decrease, so the selected split is identical.
All randomness comes from a splitmix64 stream seeded per tree.
"""

import numpy as np
from numba import njit

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True, inline="always")
def _mix(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return state, z ^ (z >> U64(31))


@njit(cache=True, nogil=True)
def _sort_pair(vals, labs, n):
    """In-place ascending sort of vals[:n], permuting labs[:n] alongside."""
    stack_lo = np.empty(64, np.int64)
    stack_hi = np.empty(64, np.int64)
    stack_lo[0] = 0
    stack_hi[0] = n
    top = 1
    while top > 0:
        top -= 1
        lo = stack_lo[top]
        hi = stack_hi[top]
        while hi - lo > 16:
            mid = (lo + hi) // 2
            a = vals[lo]
            b = vals[mid]
            c = vals[hi - 1]
            if (a <= b) == (b <= c):
                pi = mid
            elif (b <= a) == (a <= c):
                pi = lo
            else:
                pi = hi - 1
            p = vals[pi]
            vals[pi], vals[lo] = vals[lo], vals[pi]
            labs[pi], labs[lo] = labs[lo], labs[pi]
            i = lo + 1
            j = hi - 1
            while True:
                while i <= j and vals[i] < p:
                    i += 1
                while i <= j and vals[j] > p:
                    j -= 1
                if i > j:
                    break
                vals[i], vals[j] = vals[j], vals[i]
                labs[i], labs[j] = labs[j], labs[i]
                i += 1
                j -= 1
            vals[lo], vals[j] = vals[j], vals[lo]
            labs[lo], labs[j] = labs[j], labs[lo]
            if j - lo < hi - i:
                stack_lo[top] = i
                stack_hi[top] = hi
                top += 1
                hi = j
            else:
                stack_lo[top] = lo
                stack_hi[top] = j
                top += 1
                lo = i
        for i in range(lo + 1, hi):
            v = vals[i]
            w = labs[i]
            j = i - 1
            while j >= lo and vals[j] > v:
                vals[j + 1] = vals[j]
                labs[j + 1] = labs[j]
                j -= 1
            vals[j + 1] = v
            labs[j + 1] = w
    return


@njit(cache=True, nogil=True)
def grow_tree(XT, y, rows, max_depth, min_leaf, mtry, random_thresholds, seed):
    """Grow one tree depth-first.

    XT is (width, n_total) column-major; rows may contain duplicates
    (bootstrap multiset).  Leaf value is the mean label of its rows.
    Returns (col, thr, left, right, value, gain, count) node arrays; leaves
    have col == -1.
    """
    n_total = rows.size
    width = XT.shape[0]
    cap = 2 * (n_total // max(min_leaf, 1)) + 3
    node_col = np.full(cap, -1, np.int32)
    node_thr = np.zeros(cap, np.float64)
    node_left = np.full(cap, -1, np.int32)
    node_right = np.full(cap, -1, np.int32)
    node_val = np.zeros(cap, np.float64)
    node_gain = np.zeros(cap, np.float64)
    node_n = np.zeros(cap, np.int32)

    state = U64(seed)
    idx = rows.copy()
    feat_perm = np.empty(width, np.int64)
    vals = np.empty(n_total, np.float64)
    labs = np.empty(n_total, np.float64)
    stack = np.empty((max_depth * 2 + 4, 4), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n_total
    stack[0, 3] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        n = end - start
        sy = 0.0
        syy = 0.0
        for i in range(start, end):
            v = y[idx[i]]
            sy += v
            syy += v * v
        node_n[node] = n
        node_val[node] = sy / n
        if depth >= max_depth or n < 2 * min_leaf or syy - sy * sy / n <= 1e-12:
            continue

        for j in range(width):
            feat_perm[j] = j
        best_gain = 0.0
        best_col = -1
        best_thr = 0.0
        parent_score = sy * sy / n
        for t in range(min(mtry, width)):
            state, r = _mix(state)
            k = t + int(r % U64(width - t))
            feat_perm[t], feat_perm[k] = feat_perm[k], feat_perm[t]
            col = feat_perm[t]
            lo = XT[col, idx[start]]
            hi = lo
            for i in range(n):
                v = XT[col, idx[start + i]]
                vals[i] = v
                labs[i] = y[idx[start + i]]
                if v < lo:
                    lo = v
                if v > hi:
                    hi = v
            if hi <= lo:
                continue
            if random_thresholds:
                state, r = _mix(state)
                thr = lo + float(r >> U64(11)) * _INV53 * (hi - lo)
                if thr >= hi:
                    thr = lo
                nl = 0
                sl = 0.0
                for i in range(n):
                    if vals[i] <= thr:
                        nl += 1
                        sl += labs[i]
                nr = n - nl
                if nl < min_leaf or nr < min_leaf:
                    continue
                gain = sl * sl / nl + (sy - sl) * (sy - sl) / nr - parent_score
                if gain > best_gain:
                    best_gain = gain
                    best_col = col
                    best_thr = thr
            else:
                # indicator and two-valued columns split without sorting
                binary = True
                nl = 0
                sl = 0.0
                for i in range(n):
                    v = vals[i]
                    if v == lo:
                        nl += 1
                        sl += labs[i]
                    elif v != hi:
                        binary = False
                        break
                if binary:
                    nr = n - nl
                    if nl < min_leaf or nr < min_leaf:
                        continue
                    gain = sl * sl / nl + (sy - sl) * (sy - sl) / nr - parent_score
                    if gain > best_gain:
                        best_gain = gain
                        best_col = col
                        thr = 0.5 * (lo + hi)
                        best_thr = thr if thr < hi else lo
                    continue
                _sort_pair(vals, labs, n)
                csum = 0.0
                for i in range(n - 1):
                    csum += labs[i]
                    if vals[i] == vals[i + 1]:
                        continue
                    nl = i + 1
                    nr = n - nl
                    if nl < min_leaf or nr < min_leaf:
                        continue
                    gain = csum * csum / nl + (sy - csum) * (sy - csum) / nr - parent_score
                    if gain > best_gain:
                        best_gain = gain
                        best_col = col
                        thr = 0.5 * (vals[i] + vals[i + 1])
                        best_thr = thr if thr < vals[i + 1] else vals[i]
        if best_col < 0 or best_gain <= 0.0:
            continue

        i = start
        j = end - 1
        while i <= j:
            if XT[best_col, idx[i]] <= best_thr:
                i += 1
            else:
                tmp = idx[i]
                idx[i] = idx[j]
                idx[j] = tmp
                j -= 1
        mid = i
        if mid == start or mid == end:
            continue
        node_col[node] = best_col
        node_thr[node] = best_thr
        node_gain[node] = best_gain
        node_left[node] = n_nodes
        node_right[node] = n_nodes + 1
        stack[top, 0] = n_nodes
        stack[top, 1] = start
        stack[top, 2] = mid
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = n_nodes + 1
        stack[top, 1] = mid
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
        n_nodes += 2

    return (
        node_col[:n_nodes],
        node_thr[:n_nodes],
        node_left[:n_nodes],
        node_right[:n_nodes],
        node_val[:n_nodes],
        node_gain[:n_nodes],
        node_n[:n_nodes],
    )


@njit(cache=True, nogil=True)
def grow_tree_levelwise(XT, order, col_ids, grad, in_sample, max_depth, min_leaf):
    """Grow one regression tree breadth-first over presorted columns.

    order[j] holds row ids of column j (same indexing as XT rows) in
    ascending value order, computed once per fit.  col_ids selects the
    columns available to this tree.  Rows with in_sample == 0 are ignored.
    Returns node arrays plus node_of, the terminal node id per row (-1 for
    out-of-sample rows); leaf values are mean gradients (callers overwrite
    them with Newton estimates).
    """
    width, n_total = XT.shape
    n_cols = col_ids.size
    cap = 1
    for _ in range(max_depth + 1):
        if cap > n_total:
            break
        cap *= 2
    cap = min(2 * cap + 1, 2 * n_total + 3)

    node_col = np.full(cap, -1, np.int32)
    node_thr = np.zeros(cap, np.float64)
    node_left = np.full(cap, -1, np.int32)
    node_right = np.full(cap, -1, np.int32)
    node_val = np.zeros(cap, np.float64)
    node_gain = np.zeros(cap, np.float64)
    node_n = np.zeros(cap, np.int32)

    node_of = np.full(n_total, -1, np.int32)
    for r in range(n_total):
        if in_sample[r] != 0:
            node_of[r] = 0

    level_start = 0
    n_nodes = 1
    for depth in range(max_depth + 1):
        n_level = n_nodes - level_start
        if n_level <= 0:
            break
        s_cnt = np.zeros(n_level, np.int64)
        s_sum = np.zeros(n_level, np.float64)
        s_sq = np.zeros(n_level, np.float64)
        for r in range(n_total):
            nd = node_of[r]
            if nd >= level_start:
                g = grad[r]
                k = nd - level_start
                s_cnt[k] += 1
                s_sum[k] += g
                s_sq[k] += g * g
        for k in range(n_level):
            if s_cnt[k] > 0:
                node_n[level_start + k] = s_cnt[k]
                node_val[level_start + k] = s_sum[k] / s_cnt[k]
        if depth == max_depth:
            break

        splittable = np.zeros(n_level, np.uint8)
        any_split = False
        for k in range(n_level):
            if s_cnt[k] >= 2 * min_leaf and s_sq[k] - s_sum[k] * s_sum[k] / s_cnt[k] > 1e-12:
                splittable[k] = 1
                any_split = True
        if not any_split:
            break

        best_gain = np.zeros(n_level, np.float64)
        best_col = np.full(n_level, -1, np.int32)
        best_thr = np.zeros(n_level, np.float64)
        run_cnt = np.empty(n_level, np.int64)
        run_sum = np.empty(n_level, np.float64)
        last_val = np.empty(n_level, np.float64)
        for j in range(n_cols):
            c = col_ids[j]
            for k in range(n_level):
                run_cnt[k] = 0
                run_sum[k] = 0.0
            for pos in range(n_total):
                r = order[c, pos]
                nd = node_of[r]
                if nd < level_start:
                    continue
                k = nd - level_start
                if splittable[k] == 0:
                    continue
                v = XT[c, r]
                if run_cnt[k] > 0 and v != last_val[k]:
                    nl = run_cnt[k]
                    nr = s_cnt[k] - nl
                    if nl >= min_leaf and nr >= min_leaf:
                        sl = run_sum[k]
                        sr = s_sum[k] - sl
                        gain = sl * sl / nl + sr * sr / nr - s_sum[k] * s_sum[k] / s_cnt[k]
                        if gain > best_gain[k]:
                            best_gain[k] = gain
                            best_col[k] = c
                            thr = 0.5 * (last_val[k] + v)
                            best_thr[k] = thr if thr < v else last_val[k]
                run_cnt[k] += 1
                run_sum[k] += grad[r]
                last_val[k] = v

        new_n = n_nodes
        for k in range(n_level):
            if best_col[k] >= 0 and best_gain[k] > 0.0 and new_n + 2 <= cap:
                nd = level_start + k
                node_col[nd] = best_col[k]
                node_thr[nd] = best_thr[k]
                node_gain[nd] = best_gain[k]
                node_left[nd] = new_n
                node_right[nd] = new_n + 1
                new_n += 2
        if new_n == n_nodes:
            break
        for r in range(n_total):
            nd = node_of[r]
            if nd >= level_start and node_col[nd] >= 0:
                if XT[node_col[nd], r] <= node_thr[nd]:
                    node_of[r] = node_left[nd]
                else:
                    node_of[r] = node_right[nd]
        level_start = n_nodes
        n_nodes = new_n

    return (
        node_col[:n_nodes],
        node_thr[:n_nodes],
        node_left[:n_nodes],
        node_right[:n_nodes],
        node_val[:n_nodes],
        node_gain[:n_nodes],
        node_n[:n_nodes],
        node_of,
    )


@njit(cache=True, nogil=True)
def predict_sum(X, offsets, node_col, node_thr, node_left, node_right, node_val):
    """Sum of leaf values over all packed trees, per row of row-major X."""
    n = X.shape[0]
    n_trees = offsets.size - 1
    out = np.zeros(n, np.float64)
    for i in range(n):
        acc = 0.0
        for t in range(n_trees):
            node = offsets[t]
            while node_col[node] >= 0:
                if X[i, node_col[node]] <= node_thr[node]:
                    node = node_left[node]
                else:
                    node = node_right[node]
            acc += node_val[node]
        out[i] = acc
    return out


@njit(cache=True, nogil=True)
def leaf_assignment(X, node_col, node_thr, node_left, node_right):
    """Terminal node id per row for a single unpacked tree."""
    n = X.shape[0]
    out = np.empty(n, np.int32)
    for i in range(n):
        node = 0
        while node_col[node] >= 0:
            if X[i, node_col[node]] <= node_thr[node]:
                node = node_left[node]
            else:
                node = node_right[node]
        out[i] = node
    return out
