"""Elementary reference implementations used to pin the tree learners.

Everything here is deliberately naive: plain Python loops, sequential
left-to-right accumulation, exhaustive enumeration of candidate splits.
Sums are accumulated in ascending row order with scalar arithmetic so
that results are bit-for-bit comparable with the library's definitional
small-node path, which follows the same accumulation order. None of the
fast-path machinery (presorting, prefix sums, bit packing) appears here.
"""


def seq_mean(values):
    s = 0.0
    for v in values:
        s += v
    return s / len(values)


def seq_sse(values, mean):
    s = 0.0
    for v in values:
        d = v - mean
        s += d * d
    return s


def oracle_best_split(rows, targets, min_leaf):
    """Exhaustive best split: (feature, threshold, gain) or None.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values of each feature; the left child takes rows with value <= thr;
    ties keep the lowest feature, then the lowest threshold, because only
    strictly larger gains replace the incumbent in scan order.
    """
    n = len(targets)
    if n < 2 * min_leaf:
        return None
    if min(targets) == max(targets):
        return None
    parent_mean = seq_mean(targets)
    parent_sse = seq_sse(targets, parent_mean)
    p = len(rows[0])
    best = None
    best_gain = 0.0
    for j in range(p):
        distinct = sorted(set(r[j] for r in rows))
        for a, b in zip(distinct, distinct[1:]):
            thr = (a + b) / 2.0
            left = [t for r, t in zip(rows, targets) if r[j] <= thr]
            right = [t for r, t in zip(rows, targets) if r[j] > thr]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            gain = parent_sse - seq_sse(left, seq_mean(left)) - seq_sse(right, seq_mean(right))
            if gain > best_gain:
                best_gain = gain
                best = (j, thr, gain)
    return best


def oracle_fit_tree(rows, targets, num_leaves, min_leaf):
    """Best-first CART by exhaustive search, as flattened node dicts.

    Node ids follow creation order (children of the first split are 1 and
    2); among open leaves the one with the largest candidate gain is split
    next, lowest id first on ties. Matches the library's layout exactly.
    """
    nodes = [
        {
            "rows": list(rows),
            "targets": list(targets),
            "value": seq_mean(targets),
            "feature": None,
            "threshold": None,
            "left": None,
            "right": None,
            "cand": oracle_best_split(rows, targets, min_leaf) if num_leaves > 1 else None,
            "open": True,
        }
    ]
    leaves = 1
    while leaves < num_leaves:
        best_id = None
        best_gain = 0.0
        for i, node in enumerate(nodes):
            if node["open"] and node["cand"] is not None and node["cand"][2] > best_gain:
                best_gain = node["cand"][2]
                best_id = i
        if best_id is None:
            break
        node = nodes[best_id]
        j, thr, _ = node["cand"]
        lrows, ltargets, rrows, rtargets = [], [], [], []
        for r, t in zip(node["rows"], node["targets"]):
            if r[j] <= thr:
                lrows.append(r)
                ltargets.append(t)
            else:
                rrows.append(r)
                rtargets.append(t)
        node["feature"] = j
        node["threshold"] = thr
        node["left"] = len(nodes)
        node["right"] = len(nodes) + 1
        node["open"] = False
        for crows, ctargets in ((lrows, ltargets), (rrows, rtargets)):
            nodes.append(
                {
                    "rows": crows,
                    "targets": ctargets,
                    "value": seq_mean(ctargets),
                    "feature": None,
                    "threshold": None,
                    "left": None,
                    "right": None,
                    "cand": oracle_best_split(crows, ctargets, min_leaf),
                    "open": True,
                }
            )
        leaves += 1
    return nodes


def oracle_predict_tree(nodes, x):
    i = 0
    while nodes[i]["feature"] is not None:
        if x[nodes[i]["feature"]] <= nodes[i]["threshold"]:
            i = nodes[i]["left"]
        else:
            i = nodes[i]["right"]
    return nodes[i]["value"]


def oracle_fit_gbdt(rows, targets, num_leaves, min_leaf, rate, num_trees):
    """Hand-executed boosting: returns per-row training predictions."""
    n = len(targets)
    f0 = seq_mean(targets)
    current = [f0] * n
    stages = []
    for _ in range(num_trees):
        residual = [t - c for t, c in zip(targets, current)]
        sse = 0.0
        for r in residual:
            sse += r * r
        if sse < 1e-12 * n:
            break
        nodes = oracle_fit_tree(rows, residual, num_leaves, min_leaf)
        stages.append(nodes)
        current = [
            c + rate * oracle_predict_tree(nodes, r) for c, r in zip(current, rows)
        ]
    return f0, stages, current
