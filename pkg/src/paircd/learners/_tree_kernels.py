"""Numba kernels for fitting and evaluating tree ensembles.

Trees are stored as flat parallel arrays packed per tree; ``feature == -1``
marks a leaf and child indices are relative to the tree's node block (block
starts in ``offsets``). All randomness comes from numpy's global RNG,
reseeded per tree from a supplied seed array, so a forest is a pure
function of (data, hyperparameters, seeds).

Two builders, sharing the node layout:

- ``_fit_forest_random``: extra-trees style. No bootstrap; one uniformly
  random threshold per candidate feature. Node data is kept column-major
  and physically partitioned at every split so scans stay contiguous, with
  per-feature minima and maxima riding along on the node stack.
- ``_fit_forest_sorted``: bootstrapped forest with exhaustive best-split
  search. Per-feature sorted orders are built once per tree from a global
  presort and kept sorted through stable partitions, so every candidate
  threshold scan is a single linear pass.

Split scores maximize s_L^2/n_L + s_R^2/n_R (regression, equivalent to
variance reduction) or sum_c c_L^2/n_L + sum_c c_R^2/n_R (classification,
equivalent to Gini gain).
"""

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True)
def _fit_forest_random(X, XT, y_in, cls_in, n_classes, classification,
                       n_trees, min_leaf, mtry, candidate, seeds):
    n, d = X.shape
    max_leaves = n // min_leaf + 2
    max_nodes = 2 * max_leaves + 1
    cap = n_trees * max_nodes

    feature = np.full(cap, -1, np.int32)
    threshold = np.zeros(cap, np.float64)
    left = np.full(cap, -1, np.int32)
    right = np.full(cap, -1, np.int32)
    n_vals = n_classes if classification else 1
    values = np.zeros((cap, n_vals), np.float64)
    offsets = np.zeros(n_trees + 1, np.int64)

    cols = np.empty((d, n), np.float64)   # node data, column-major
    y = np.empty(n, np.float64)
    cl = np.empty(n, np.int64)
    side = np.empty(n, np.uint8)
    buf = np.empty(n, np.float64)
    cbuf = np.empty(n, np.int64)
    feat_buf = np.empty(d, np.int64)
    counts = np.zeros(n_classes, np.float64)
    counts_l = np.zeros(n_classes, np.float64)
    stack = np.empty((max_nodes, 3), np.int64)
    s_min = np.empty((max_nodes, d), np.float64)
    s_max = np.empty((max_nodes, d), np.float64)

    total = 0
    m_try = min(mtry, d)

    for t in range(n_trees):
        np.random.seed(seeds[t])
        base = total

        for f in range(d):
            lo = XT[f, 0]
            hi = lo
            for i in range(n):
                v = XT[f, i]
                cols[f, i] = v
                lo = min(lo, v)
                hi = max(hi, v)
            s_min[0, f] = lo
            s_max[0, f] = hi
        if classification:
            for i in range(n):
                cl[i] = cls_in[i]
        else:
            for i in range(n):
                y[i] = y_in[i]

        n_nodes = 1
        stack[0, 0] = 0
        stack[0, 1] = 0
        stack[0, 2] = n
        sp = 1
        while sp > 0:
            sp -= 1
            node = stack[sp, 0]
            start = stack[sp, 1]
            end = stack[sp, 2]
            n_node = end - start
            g = base + node

            s_tot = 0.0
            pure = True
            if classification:
                for c in range(n_classes):
                    counts[c] = 0.0
                for i in range(start, end):
                    counts[cl[i]] += 1.0
                nz = 0
                for c in range(n_classes):
                    if counts[c] > 0.0:
                        nz += 1
                pure = nz <= 1
            else:
                y0 = y[start]
                n_diff = 0.0
                for i in range(start, end):
                    s_tot += y[i]
                    n_diff += 1.0 * (y[i] != y0)
                pure = n_diff == 0.0

            if pure or n_node < 2 * min_leaf:
                feature[g] = -1
                if classification:
                    for c in range(n_classes):
                        values[g, c] = counts[c] / n_node
                else:
                    values[g, 0] = s_tot / n_node
                continue

            # sample the split-candidate features; force the flagged column in
            for j in range(d):
                feat_buf[j] = j
            for j in range(m_try):
                kk = j + np.random.randint(0, d - j)
                tmp = feat_buf[j]
                feat_buf[j] = feat_buf[kk]
                feat_buf[kk] = tmp
            if candidate >= 0:
                present = False
                for j in range(m_try):
                    if feat_buf[j] == candidate:
                        present = True
                        break
                if not present:
                    feat_buf[np.random.randint(0, m_try)] = candidate

            best_score = -np.inf
            best_f = -1
            best_thr = 0.0

            for j in range(m_try):
                f = feat_buf[j]
                lo = s_min[sp, f]
                hi = s_max[sp, f]
                if hi <= lo:
                    continue
                thr = lo + np.random.random() * (hi - lo)
                if thr >= hi:
                    thr = lo
                if classification:
                    for c in range(n_classes):
                        counts_l[c] = 0.0
                    n_l = 0
                    for i in range(start, end):
                        inl = cols[f, i] <= thr
                        counts_l[cl[i]] += inl
                        n_l += inl
                    n_r = n_node - n_l
                    if n_l < min_leaf or n_r < min_leaf:
                        continue
                    ssq_l = 0.0
                    ssq_r = 0.0
                    for c in range(n_classes):
                        ssq_l += counts_l[c] * counts_l[c]
                        cr = counts[c] - counts_l[c]
                        ssq_r += cr * cr
                    score = ssq_l / n_l + ssq_r / n_r
                else:
                    n_l = 0
                    s_l = 0.0
                    for i in range(start, end):
                        inl = cols[f, i] <= thr
                        s_l += y[i] * inl
                        n_l += inl
                    n_r = n_node - n_l
                    if n_l < min_leaf or n_r < min_leaf:
                        continue
                    s_r = s_tot - s_l
                    score = s_l * s_l / n_l + s_r * s_r / n_r
                if score > best_score:
                    best_score = score
                    best_f = f
                    best_thr = thr

            if best_f < 0:
                feature[g] = -1
                if classification:
                    for c in range(n_classes):
                        values[g, c] = counts[c] / n_node
                else:
                    values[g, 0] = s_tot / n_node
                continue

            # stable two-stream partition of every column, tracking child
            # min/max; children land in stack slots sp (left), sp + 1 (right)
            n_l = 0
            for i in range(start, end):
                inl = cols[best_f, i] <= best_thr
                side[i] = inl
                n_l += inl
            for f in range(d):
                a = 0
                b = 0
                lmin = np.inf
                lmax = -np.inf
                rmin = np.inf
                rmax = -np.inf
                for i in range(start, end):
                    v = cols[f, i]
                    if side[i] == 1:
                        cols[f, start + a] = v
                        a += 1
                        lmin = min(lmin, v)
                        lmax = max(lmax, v)
                    else:
                        buf[b] = v
                        b += 1
                        rmin = min(rmin, v)
                        rmax = max(rmax, v)
                for i in range(b):
                    cols[f, start + n_l + i] = buf[i]
                s_min[sp, f] = lmin
                s_max[sp, f] = lmax
                s_min[sp + 1, f] = rmin
                s_max[sp + 1, f] = rmax
            if classification:
                a = 0
                b = 0
                for i in range(start, end):
                    if side[i] == 1:
                        cl[start + a] = cl[i]
                        a += 1
                    else:
                        cbuf[b] = cl[i]
                        b += 1
                for i in range(b):
                    cl[start + n_l + i] = cbuf[i]
            else:
                a = 0
                b = 0
                for i in range(start, end):
                    if side[i] == 1:
                        y[start + a] = y[i]
                        a += 1
                    else:
                        buf[b] = y[i]
                        b += 1
                for i in range(b):
                    y[start + n_l + i] = buf[i]

            feature[g] = best_f
            threshold[g] = best_thr
            left[g] = n_nodes
            right[g] = n_nodes + 1
            stack[sp, 0] = n_nodes
            stack[sp, 1] = start
            stack[sp, 2] = start + n_l
            sp += 1
            stack[sp, 0] = n_nodes + 1
            stack[sp, 1] = start + n_l
            stack[sp, 2] = end
            sp += 1
            n_nodes += 2

        total = base + n_nodes
        offsets[t + 1] = total

    rec = np.empty((total, 4), np.float64)
    for i in range(total):
        rec[i, 0] = feature[i]
        rec[i, 1] = threshold[i]
        rec[i, 2] = left[i]
        rec[i, 3] = right[i]
    return rec, values[:total].copy(), offsets


@njit(cache=True, fastmath=True)
def _fit_forest_sorted(X, XT, global_order, y_in, cls_in, n_classes,
                       classification, n_trees, min_leaf, mtry, candidate,
                       seeds):
    n, d = X.shape
    max_leaves = n // min_leaf + 2
    max_nodes = 2 * max_leaves + 1
    cap = n_trees * max_nodes

    feature = np.full(cap, -1, np.int32)
    threshold = np.zeros(cap, np.float64)
    left = np.full(cap, -1, np.int32)
    right = np.full(cap, -1, np.int32)
    n_vals = n_classes if classification else 1
    values = np.zeros((cap, n_vals), np.float64)
    offsets = np.zeros(n_trees + 1, np.int64)

    # bootstrap sample slots: slot -> row, with per-feature slot orders kept
    # sorted by feature value throughout the build
    sorted_slots = np.empty((d, n), np.int64)
    row_of = np.empty(n, np.int64)
    y = np.empty(n, np.float64)
    cl = np.empty(n, np.int64)
    counts_row = np.empty(n, np.int64)
    first_slot = np.empty(n + 1, np.int64)
    side = np.empty(n, np.uint8)
    sbuf = np.empty(n, np.int64)
    feat_buf = np.empty(d, np.int64)
    counts = np.zeros(n_classes, np.float64)
    counts_l = np.zeros(n_classes, np.float64)
    stack = np.empty((max_nodes, 3), np.int64)

    total = 0
    m_try = min(mtry, d)

    for t in range(n_trees):
        np.random.seed(seeds[t])
        base = total

        # bootstrap multiplicities and slot assignment grouped by row
        for i in range(n):
            counts_row[i] = 0
        for i in range(n):
            counts_row[np.random.randint(0, n)] += 1
        first_slot[0] = 0
        for i in range(n):
            first_slot[i + 1] = first_slot[i] + counts_row[i]
        for r in range(n):
            for c in range(counts_row[r]):
                s = first_slot[r] + c
                row_of[s] = r
                if classification:
                    cl[s] = cls_in[r]
                else:
                    y[s] = y_in[r]
        for f in range(d):
            pos = 0
            for gi in range(n):
                r = global_order[f, gi]
                for c in range(counts_row[r]):
                    sorted_slots[f, pos] = first_slot[r] + c
                    pos += 1

        n_nodes = 1
        stack[0, 0] = 0
        stack[0, 1] = 0
        stack[0, 2] = n
        sp = 1
        while sp > 0:
            sp -= 1
            node = stack[sp, 0]
            start = stack[sp, 1]
            end = stack[sp, 2]
            n_node = end - start
            g = base + node

            s_tot = 0.0
            pure = True
            if classification:
                for c in range(n_classes):
                    counts[c] = 0.0
                for i in range(start, end):
                    counts[cl[sorted_slots[0, i]]] += 1.0
                nz = 0
                for c in range(n_classes):
                    if counts[c] > 0.0:
                        nz += 1
                pure = nz <= 1
            else:
                y0 = y[sorted_slots[0, start]]
                n_diff = 0.0
                for i in range(start, end):
                    yi = y[sorted_slots[0, i]]
                    s_tot += yi
                    n_diff += 1.0 * (yi != y0)
                pure = n_diff == 0.0

            if pure or n_node < 2 * min_leaf:
                feature[g] = -1
                if classification:
                    for c in range(n_classes):
                        values[g, c] = counts[c] / n_node
                else:
                    values[g, 0] = s_tot / n_node
                continue

            for j in range(d):
                feat_buf[j] = j
            for j in range(m_try):
                kk = j + np.random.randint(0, d - j)
                tmp = feat_buf[j]
                feat_buf[j] = feat_buf[kk]
                feat_buf[kk] = tmp
            if candidate >= 0:
                present = False
                for j in range(m_try):
                    if feat_buf[j] == candidate:
                        present = True
                        break
                if not present:
                    feat_buf[np.random.randint(0, m_try)] = candidate

            best_score = -np.inf
            best_f = -1
            best_thr = 0.0

            for j in range(m_try):
                f = feat_buf[j]
                if classification:
                    for c in range(n_classes):
                        counts_l[c] = 0.0
                    ssq_l = 0.0
                    ssq_r = 0.0
                    for c in range(n_classes):
                        ssq_r += counts[c] * counts[c]
                    for i in range(start, end - 1):
                        slot = sorted_slots[f, i]
                        c_i = cl[slot]
                        ssq_l += 2.0 * counts_l[c_i] + 1.0
                        ssq_r -= 2.0 * (counts[c_i] - counts_l[c_i]) - 1.0
                        counts_l[c_i] += 1.0
                        vi = XT[f, row_of[slot]]
                        vnext = XT[f, row_of[sorted_slots[f, i + 1]]]
                        if vnext <= vi:
                            continue
                        n_l = i + 1 - start
                        n_r = n_node - n_l
                        if n_l < min_leaf or n_r < min_leaf:
                            continue
                        score = ssq_l / n_l + ssq_r / n_r
                        if score > best_score:
                            best_score = score
                            best_f = f
                            best_thr = vi + 0.5 * (vnext - vi)
                else:
                    s_l = 0.0
                    for i in range(start, end - 1):
                        slot = sorted_slots[f, i]
                        s_l += y[slot]
                        vi = XT[f, row_of[slot]]
                        vnext = XT[f, row_of[sorted_slots[f, i + 1]]]
                        if vnext <= vi:
                            continue
                        n_l = i + 1 - start
                        n_r = n_node - n_l
                        if n_l < min_leaf or n_r < min_leaf:
                            continue
                        s_r = s_tot - s_l
                        score = s_l * s_l / n_l + s_r * s_r / n_r
                        if score > best_score:
                            best_score = score
                            best_f = f
                            best_thr = vi + 0.5 * (vnext - vi)

            if best_f < 0:
                feature[g] = -1
                if classification:
                    for c in range(n_classes):
                        values[g, c] = counts[c] / n_node
                else:
                    values[g, 0] = s_tot / n_node
                continue

            # side per slot, then stable partition of every sorted order
            n_l = 0
            for i in range(start, end):
                slot = sorted_slots[0, i]
                inl = XT[best_f, row_of[slot]] <= best_thr
                side[slot] = inl
                n_l += inl
            for f in range(d):
                a = 0
                b = 0
                for i in range(start, end):
                    slot = sorted_slots[f, i]
                    if side[slot] == 1:
                        sorted_slots[f, start + a] = slot
                        a += 1
                    else:
                        sbuf[b] = slot
                        b += 1
                for i in range(b):
                    sorted_slots[f, start + n_l + i] = sbuf[i]

            feature[g] = best_f
            threshold[g] = best_thr
            left[g] = n_nodes
            right[g] = n_nodes + 1
            stack[sp, 0] = n_nodes
            stack[sp, 1] = start
            stack[sp, 2] = start + n_l
            sp += 1
            stack[sp, 0] = n_nodes + 1
            stack[sp, 1] = start + n_l
            stack[sp, 2] = end
            sp += 1
            n_nodes += 2

        total = base + n_nodes
        offsets[t + 1] = total

    rec = np.empty((total, 4), np.float64)
    for i in range(total):
        rec[i, 0] = feature[i]
        rec[i, 1] = threshold[i]
        rec[i, 2] = left[i]
        rec[i, 3] = right[i]
    return rec, values[:total].copy(), offsets


@njit(cache=True, fastmath=True)
def _predict_forest(X, rec, values, offsets):
    n = X.shape[0]
    n_vals = values.shape[1]
    n_trees = offsets.size - 1
    out = np.zeros((n, n_vals), np.float64)
    if n_vals == 1:
        for t in range(n_trees):
            base = offsets[t]
            for i in range(n):
                node = base
                f = int(rec[node, 0])
                while f >= 0:
                    if X[i, f] <= rec[node, 1]:
                        node = base + int(rec[node, 2])
                    else:
                        node = base + int(rec[node, 3])
                    f = int(rec[node, 0])
                out[i, 0] += values[node, 0]
    else:
        for t in range(n_trees):
            base = offsets[t]
            for i in range(n):
                node = base
                f = int(rec[node, 0])
                while f >= 0:
                    if X[i, f] <= rec[node, 1]:
                        node = base + int(rec[node, 2])
                    else:
                        node = base + int(rec[node, 3])
                    f = int(rec[node, 0])
                for c in range(n_vals):
                    out[i, c] += values[node, c]
    inv = 1.0 / n_trees
    for i in range(n):
        for c in range(n_vals):
            out[i, c] *= inv
    return out
