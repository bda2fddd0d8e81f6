"""Jitted inner loops for tree building and perceptron training.

The tree builder works on class-weight sums, so with unit weights every
impurity value is derived from exact small integers.  That makes split
choices (including tie-breaks) bit-reproducible across any strictly
increasing per-feature rescaling of the inputs, which is what keeps
rule-based models provably scale-insensitive here.
"""

from __future__ import annotations

import numpy as np
from numba import njit

LEAF = -1


@njit(cache=True)
def perceptron_pass(w, b, X, y, order):
    """One epoch of classic updates (learning rate 1) in the given order.

    Mutates `w` in place and returns the new bias.  Labels are 0/1 floats;
    the activation threshold is sign(w.x + b) with >= 0 mapping to 1.
    """
    n_feat = X.shape[1]
    for oi in range(order.shape[0]):
        i = order[oi]
        act = b
        for j in range(n_feat):
            act += w[j] * X[i, j]
        pred = 1.0 if act >= 0.0 else 0.0
        err = y[i] - pred
        if err != 0.0:
            for j in range(n_feat):
                w[j] += err * X[i, j]
            b += err
    return b


@njit(cache=True)
def _node_weights(y, w, idx, start, end):
    w0 = 0.0
    w1 = 0.0
    for p in range(start, end):
        i = idx[p]
        if y[i] == 1:
            w1 += w[i]
        else:
            w0 += w[i]
    return w0, w1


@njit(cache=True)
def build_tree(X, y, w, max_depth, max_features, seed):
    """Grow a CART-style binary tree by best weighted-Gini splits.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values; ties in impurity decrease resolve to the lower feature index,
    then the lower threshold.  max_depth < 0 means unlimited;
    max_features > 0 draws a random feature subset per split (seeded).
    Returns (feature, threshold, left, right, leaf_class) arrays trimmed
    to the node count; feature == -1 marks a leaf.
    """
    n, d = X.shape
    max_nodes = 2 * n + 1
    node_feature = np.full(max_nodes, LEAF, dtype=np.int64)
    node_threshold = np.zeros(max_nodes, dtype=np.float64)
    node_left = np.full(max_nodes, -1, dtype=np.int64)
    node_right = np.full(max_nodes, -1, dtype=np.int64)
    node_class = np.zeros(max_nodes, dtype=np.int64)

    if max_features > 0:
        np.random.seed(seed)

    idx = np.arange(n)
    tmp = np.empty(n, dtype=np.int64)
    vals = np.empty(n, dtype=np.float64)
    feat_pool = np.empty(d, dtype=np.int64)
    chosen = np.empty(d, dtype=np.int64)

    # DFS over (node id, start, end, depth) ranges of idx.
    stack_node = np.empty(max_nodes, dtype=np.int64)
    stack_start = np.empty(max_nodes, dtype=np.int64)
    stack_end = np.empty(max_nodes, dtype=np.int64)
    stack_depth = np.empty(max_nodes, dtype=np.int64)
    stack_node[0] = 0
    stack_start[0] = 0
    stack_end[0] = n
    stack_depth[0] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = stack_node[top]
        start = stack_start[top]
        end = stack_end[top]
        depth = stack_depth[top]
        m = end - start

        w0, w1 = _node_weights(y, w, idx, start, end)
        total = w0 + w1
        node_class[node] = 1 if w1 > w0 else 0

        # Zero total weight can happen under boosting when instance weights
        # underflow; such a node cannot be split meaningfully.
        if w0 == 0.0 or w1 == 0.0 or total <= 0.0 or (max_depth >= 0 and depth >= max_depth):
            continue

        # Weighted "total * gini" form: total - (w0^2 + w1^2) / total.
        parent_metric = total - (w0 * w0 + w1 * w1) / total

        if max_features > 0 and max_features < d:
            for j in range(d):
                feat_pool[j] = j
            for j in range(max_features):
                k = j + np.random.randint(0, d - j)
                feat_pool[j], feat_pool[k] = feat_pool[k], feat_pool[j]
            n_chosen = max_features
            chosen[:n_chosen] = np.sort(feat_pool[:n_chosen])
        else:
            n_chosen = d
            for j in range(d):
                chosen[j] = j

        best_gain = 0.0
        best_feature = -1
        best_threshold = 0.0

        for ci in range(n_chosen):
            f = chosen[ci]
            for p in range(m):
                vals[p] = X[idx[start + p], f]
            order = np.argsort(vals[:m])
            cw = 0.0
            cw1 = 0.0
            for p in range(m - 1):
                i = idx[start + order[p]]
                wi = w[i]
                cw += wi
                if y[i] == 1:
                    cw1 += wi
                v_here = vals[order[p]]
                v_next = vals[order[p + 1]]
                if v_here == v_next:
                    continue
                rw = total - cw
                rw1 = w1 - cw1
                # A side whose instances carry zero total weight contributes
                # zero impurity.
                if cw > 0.0:
                    left_metric = cw - (cw1 * cw1 + (cw - cw1) * (cw - cw1)) / cw
                else:
                    left_metric = 0.0
                if rw > 0.0:
                    right_metric = rw - (rw1 * rw1 + (rw - rw1) * (rw - rw1)) / rw
                else:
                    right_metric = 0.0
                gain = parent_metric - left_metric - right_metric
                if gain > best_gain:
                    best_gain = gain
                    best_feature = f
                    best_threshold = 0.5 * (v_here + v_next)

        if best_feature < 0:
            continue

        # Partition idx[start:end] into <= threshold, > threshold keeping
        # relative order on both sides.
        n_left = 0
        n_right = 0
        for p in range(start, end):
            i = idx[p]
            if X[i, best_feature] <= best_threshold:
                tmp[start + n_left] = i
                n_left += 1
            else:
                tmp[end - 1 - n_right] = i  # reversed; fixed below
                n_right += 1
        for p in range(start, start + n_left):
            idx[p] = tmp[p]
        for p in range(n_right):
            idx[start + n_left + p] = tmp[end - 1 - p]

        left_id = n_nodes
        right_id = n_nodes + 1
        n_nodes += 2
        node_feature[node] = best_feature
        node_threshold[node] = best_threshold
        node_left[node] = left_id
        node_right[node] = right_id

        stack_node[top] = right_id
        stack_start[top] = start + n_left
        stack_end[top] = end
        stack_depth[top] = depth + 1
        top += 1
        stack_node[top] = left_id
        stack_start[top] = start
        stack_end[top] = start + n_left
        stack_depth[top] = depth + 1
        top += 1

    return (
        node_feature[:n_nodes].copy(),
        node_threshold[:n_nodes].copy(),
        node_left[:n_nodes].copy(),
        node_right[:n_nodes].copy(),
        node_class[:n_nodes].copy(),
    )


@njit(cache=True)
def tree_predict(node_feature, node_threshold, node_left, node_right, node_class, X):
    out = np.empty(X.shape[0], dtype=np.int64)
    for i in range(X.shape[0]):
        nid = 0
        while node_feature[nid] != LEAF:
            if X[i, node_feature[nid]] <= node_threshold[nid]:
                nid = node_left[nid]
            else:
                nid = node_right[nid]
        out[i] = node_class[nid]
    return out
