"""Least-squares CART trees, gradient boosting, and bagged forests.

Trees are grown best-first: the leaf whose best admissible split removes
the most squared error is split next, so the leaf budget is exact.
Split search runs over presorted feature columns; a node's rows occupy a
contiguous segment of every per-feature ordering, and splitting a node
stably partitions those segments, so nothing is re-sorted.

Nodes at or below ``EXACT_SPLIT_CUTOFF`` rows use a definitional search:
candidate thresholds are midpoints of consecutive distinct sorted values,
children are formed by the ``x <= threshold`` test, and all sums run
sequentially over rows in ascending row order. That makes the result
bit-for-bit reproducible by elementary enumeration. Larger nodes use the
usual prefix-sum gain trick, with thresholds nudged down a float when the
midpoint of two adjacent values rounds up onto the right value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import DimensionMismatchError

#: Nodes with at most this many rows use the definitional split search.
EXACT_SPLIT_CUTOFF = 16

TREE_FORMAT_VERSION = 1

# de Bruijn table: position of an isolated set bit in a uint64
_DEBRUIJN = np.uint64(0x022FDD63CC95386D)
_BIT_POS = np.zeros(64, dtype=np.int64)
for _i in range(64):
    _BIT_POS[((_DEBRUIJN << np.uint64(_i)) >> np.uint64(58))] = _i
del _i


@dataclass(frozen=True)
class HyperParams:
    """Knobs of a boosted tree ensemble.

    The tuner samples num_leaves from 2 upward; a single-leaf budget is
    still legal here and produces a constant model.
    """

    num_leaves: int = 32
    min_leaf_instances: int = 10
    learning_rate: float = 0.2
    num_trees: int = 100

    def __post_init__(self):
        if self.num_leaves < 1:
            raise ValueError("num_leaves must be at least 1")
        if self.min_leaf_instances < 1:
            raise ValueError("min_leaf_instances must be at least 1")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must lie in (0, 1]")
        if self.num_trees < 1:
            raise ValueError("num_trees must be at least 1")

    def to_dict(self) -> dict:
        return {
            "num_leaves": self.num_leaves,
            "min_leaf_instances": self.min_leaf_instances,
            "learning_rate": self.learning_rate,
            "num_trees": self.num_trees,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HyperParams":
        return cls(
            num_leaves=int(d["num_leaves"]),
            min_leaf_instances=int(d["min_leaf_instances"]),
            learning_rate=float(d["learning_rate"]),
            num_trees=int(d["num_trees"]),
        )


@njit(cache=True)
def _seq_sum(y, rows, lo, hi):
    s = 0.0
    for k in range(lo, hi):
        s += y[rows[k]]
    return s


@njit(cache=True)
def _seq_sse(y, rows, lo, hi, mean):
    s = 0.0
    for k in range(lo, hi):
        d = y[rows[k]] - mean
        s += d * d
    return s


@njit(cache=True)
def _exact_candidate(X, y, rows_ws, lo, hi, min_leaf, sort_buf):
    """Definitional split search for small nodes.

    Mirrors elementary enumeration exactly: distinct sorted values per
    feature, midpoint thresholds, children formed by the x <= thr test,
    and every sum accumulated sequentially over rows in ascending row
    order. Small-node results are therefore reproducible bit for bit by
    a plain Python oracle.
    """
    n_node = hi - lo
    p = X.shape[1]
    best_gain = 0.0
    best_feat = -1
    best_thr = 0.0
    parent_mean = _seq_sum(y, rows_ws, lo, hi) / n_node
    parent_sse = _seq_sse(y, rows_ws, lo, hi, parent_mean)
    for j in range(p):
        for q in range(lo, hi):  # insertion sort of the node's values
            v = X[rows_ws[q], j]
            k = q - lo
            while k > 0 and sort_buf[k - 1] > v:
                sort_buf[k] = sort_buf[k - 1]
                k -= 1
            sort_buf[k] = v
        for k in range(n_node - 1):
            a = sort_buf[k]
            b = sort_buf[k + 1]
            if a == b:
                continue
            thr = (a + b) / 2.0
            n_l = 0
            s_l = 0.0
            s_r = 0.0
            for q in range(lo, hi):
                r = rows_ws[q]
                if X[r, j] <= thr:
                    n_l += 1
                    s_l += y[r]
                else:
                    s_r += y[r]
            n_r = n_node - n_l
            if n_l < min_leaf or n_r < min_leaf:
                continue
            m_l = s_l / n_l
            m_r = s_r / n_r
            sse_l = 0.0
            sse_r = 0.0
            for q in range(lo, hi):
                r = rows_ws[q]
                if X[r, j] <= thr:
                    d = y[r] - m_l
                    sse_l += d * d
                else:
                    d = y[r] - m_r
                    sse_r += d * d
            gain = parent_sse - sse_l - sse_r
            if gain > best_gain:
                best_gain = gain
                best_feat = j
                best_thr = thr
    return best_gain, best_feat, best_thr


@njit(cache=True)
def _node_candidate(
    X, y, bits, bin_cols, cont_cols, sorted_ws, x_ws, rows_ws,
    lo, hi, min_leaf, exact_cutoff, s1, c1, gains, thrs,
    sort_buf,
):
    """Best split of the node owning segment [lo, hi).

    Returns (gain, feature, threshold); gain <= 0 means no admissible
    split strictly reduces the SSE. Per-feature results are reduced in
    ascending global feature order with a strict comparison, so ties keep
    the lowest feature and then the lowest threshold.

    One-hot (0/1) columns have a single candidate threshold, 0.5, whose
    child sums come from one shared walk over the node's rows using the
    bit-packed column matrix; only genuinely continuous columns pay for
    a presorted scan.
    """
    n_node = hi - lo
    best_gain = 0.0
    best_feat = -1
    best_thr = 0.0
    if n_node < 2 * min_leaf:
        return best_gain, best_feat, best_thr

    y_min = y[rows_ws[lo]]
    y_max = y_min
    for k in range(lo + 1, hi):
        v = y[rows_ws[k]]
        if v < y_min:
            y_min = v
        elif v > y_max:
            y_max = v
    if y_min == y_max:  # constant targets: no strict reduction exists
        return best_gain, best_feat, best_thr

    if n_node <= exact_cutoff:
        return _exact_candidate(X, y, rows_ws, lo, hi, min_leaf, sort_buf)

    p = X.shape[1]
    n_bin = bin_cols.shape[0]
    n_cont = cont_cols.shape[0]
    for j in range(p):
        gains[j] = -1.0

    # shared walk: total target sum plus per-bit sums and counts
    for b_i in range(n_bin):
        s1[b_i] = 0.0
        c1[b_i] = 0
    total = 0.0
    zero = np.uint64(0)
    for q in range(lo, hi):
        r = rows_ws[q]
        yr = y[r]
        total += yr
        b = bits[r]
        while b != zero:
            low = b & (zero - b)
            t = _BIT_POS[(low * _DEBRUIJN) >> np.uint64(58)]
            s1[t] += yr
            c1[t] += 1
            b ^= low
    base = total * total / n_node

    for b_i in range(n_bin):
        n_r = c1[b_i]  # rows with the bit set fail x <= 0.5
        n_l = n_node - n_r
        if n_l < min_leaf or n_r < min_leaf:
            continue
        s_r = s1[b_i]
        s_l = total - s_r
        gain = s_l * s_l / n_l + s_r * s_r / n_r - base
        j = bin_cols[b_i]
        gains[j] = gain
        thrs[j] = 0.5

    for c_i in range(n_cont):
        if x_ws[c_i, lo] == x_ws[c_i, hi - 1]:
            continue  # constant within the node
        g_best = -1.0
        t_best = 0.0
        s_l = 0.0
        for k in range(lo, hi - 1):
            s_l += y[sorted_ws[c_i, k]]
            a = x_ws[c_i, k]
            b = x_ws[c_i, k + 1]
            if a == b:
                continue
            n_l = k - lo + 1
            n_r = n_node - n_l
            if n_l < min_leaf or n_r < min_leaf:
                continue
            thr = (a + b) / 2.0
            if thr >= b:  # midpoint rounded up; keep the x <= thr test aligned
                thr = a
            s_r = total - s_l
            gain = s_l * s_l / n_l + s_r * s_r / n_r - base
            if gain > g_best:
                g_best = gain
                t_best = thr
        j = cont_cols[c_i]
        gains[j] = g_best
        thrs[j] = t_best

    for j in range(p):
        if gains[j] > best_gain:
            best_gain = gains[j]
            best_feat = j
            best_thr = thrs[j]
    return best_gain, best_feat, best_thr


@njit(cache=True)
def _partition_rows(arr, lo, hi, go_left, tmp_i):
    """Stable partition of arr[lo:hi]: rows with go_left set come first."""
    c = lo
    nr = 0
    for k in range(lo, hi):
        r = arr[k]
        if go_left[r]:
            arr[c] = r
            c += 1
        else:
            tmp_i[nr] = r
            nr += 1
    for k in range(nr):
        arr[c + k] = tmp_i[k]
    return c - lo


@njit(cache=True)
def _partition_pair(idx, xv, lo, hi, go_left, tmp_i, tmp_f):
    """Stable partition of an index segment and its value shadow together."""
    c = lo
    nr = 0
    for k in range(lo, hi):
        r = idx[k]
        if go_left[r]:
            idx[c] = r
            xv[c] = xv[k]
            c += 1
        else:
            tmp_i[nr] = r
            tmp_f[nr] = xv[k]
            nr += 1
    for k in range(nr):
        idx[c + k] = tmp_i[k]
        xv[c + k] = tmp_f[k]


@njit(cache=True)
def _grow(X, y, bits, bin_cols, cont_cols, order, x_sorted, num_leaves, min_leaf, exact_cutoff, out_pred):
    n = X.shape[0]
    n_cont = cont_cols.shape[0]
    feat_bit = np.full(X.shape[1], -1, np.int64)
    for b_i in range(bin_cols.shape[0]):
        feat_bit[bin_cols[b_i]] = b_i
    max_nodes = 2 * num_leaves - 1
    feature = np.full(max_nodes, -1, np.int64)
    threshold = np.zeros(max_nodes)
    left = np.full(max_nodes, -1, np.int64)
    right = np.full(max_nodes, -1, np.int64)
    value = np.zeros(max_nodes)
    seg_lo = np.zeros(max_nodes, np.int64)
    seg_hi = np.zeros(max_nodes, np.int64)
    cand_gain = np.zeros(max_nodes)
    cand_feat = np.full(max_nodes, -1, np.int64)
    cand_thr = np.zeros(max_nodes)
    open_leaf = np.zeros(max_nodes, np.uint8)

    sorted_ws = order.copy()
    x_ws = x_sorted.copy()
    rows_ws = np.arange(n, dtype=np.int32)
    tmp_i = np.empty(n, np.int32)
    tmp_f = np.empty(n)
    go_left = np.zeros(n, np.uint8)
    s1 = np.zeros(64)
    c1 = np.zeros(64, np.int64)
    gains = np.empty(X.shape[1])
    thrs = np.empty(X.shape[1])
    sort_buf = np.empty(exact_cutoff + 1)

    seg_lo[0] = 0
    seg_hi[0] = n
    value[0] = _seq_sum(y, rows_ws, 0, n) / n
    open_leaf[0] = 1
    node_count = 1
    leaf_count = 1
    if num_leaves > 1:
        g, f, t = _node_candidate(
            X, y, bits, bin_cols, cont_cols, sorted_ws, x_ws, rows_ws,
            0, n, min_leaf, exact_cutoff, s1, c1, gains, thrs, sort_buf,
        )
        cand_gain[0] = g
        cand_feat[0] = f
        cand_thr[0] = t

    while leaf_count < num_leaves:
        best = -1
        best_gain = 0.0
        for i in range(node_count):
            if open_leaf[i] and cand_gain[i] > best_gain:
                best_gain = cand_gain[i]
                best = i
        if best < 0:
            break
        f = cand_feat[best]
        t = cand_thr[best]
        lo = seg_lo[best]
        hi = seg_hi[best]
        bf = feat_bit[f]
        if bf >= 0 and t == 0.5:  # binary column: the bit is the test
            mask = np.uint64(1) << np.uint64(bf)
            for k in range(lo, hi):
                r = rows_ws[k]
                go_left[r] = 0 if bits[r] & mask else 1
        else:
            for k in range(lo, hi):
                r = rows_ws[k]
                go_left[r] = 1 if X[r, f] <= t else 0
        n_l = _partition_rows(rows_ws, lo, hi, go_left, tmp_i)
        for c_i in range(n_cont):
            _partition_pair(sorted_ws[c_i], x_ws[c_i], lo, hi, go_left, tmp_i, tmp_f)

        lid = node_count
        rid = node_count + 1
        node_count += 2
        feature[best] = f
        threshold[best] = t
        left[best] = lid
        right[best] = rid
        open_leaf[best] = 0
        seg_lo[lid] = lo
        seg_hi[lid] = lo + n_l
        seg_lo[rid] = lo + n_l
        seg_hi[rid] = hi
        for child in (lid, rid):
            clo = seg_lo[child]
            chi = seg_hi[child]
            value[child] = _seq_sum(y, rows_ws, clo, chi) / (chi - clo)
            open_leaf[child] = 1
            g, cf, ct = _node_candidate(
                X, y, bits, bin_cols, cont_cols, sorted_ws, x_ws, rows_ws,
                clo, chi, min_leaf, exact_cutoff, s1, c1, gains, thrs, sort_buf,
            )
            cand_gain[child] = g
            cand_feat[child] = cf
            cand_thr[child] = ct
        leaf_count += 1

    for i in range(node_count):  # training predictions, one pass per leaf segment
        if feature[i] < 0:
            v = value[i]
            for k in range(seg_lo[i], seg_hi[i]):
                out_pred[rows_ws[k]] = v

    return feature[:node_count], threshold[:node_count], left[:node_count], right[:node_count], value[:node_count]


@njit(cache=True)
def _apply(feature, threshold, left, right, value, X):
    n = X.shape[0]
    out = np.empty(n)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out


def _as_matrix(X) -> np.ndarray:
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    if X.ndim != 2:
        raise ValueError("X must be two-dimensional")
    return X


def _presort(X: np.ndarray):
    """Column layout shared by every tree grown on the same matrix.

    Columns whose values all lie in {0, 1} are packed into a per-row bit
    mask (up to 64 of them); their only candidate threshold is 0.5, so
    split search needs no sorted order for them. The remaining columns
    get a stable per-feature row ordering plus the values in that order;
    order and value shadow are partitioned in tandem as nodes split.
    """
    n, p = X.shape
    is_binary = np.all((X == 0.0) | (X == 1.0), axis=0)
    bin_cols = np.flatnonzero(is_binary)
    if bin_cols.shape[0] > 64:
        bin_cols = bin_cols[:64]
    cont_cols = np.setdiff1d(np.arange(p), bin_cols)
    bits = np.zeros(n, dtype=np.uint64)
    for b_i, j in enumerate(bin_cols):
        bits |= (X[:, j] == 1.0).astype(np.uint64) << np.uint64(b_i)
    n_cont = cont_cols.shape[0]
    order = np.empty((n_cont, n), dtype=np.int32)
    x_sorted = np.empty((n_cont, n))
    for c_i, j in enumerate(cont_cols):
        idx = np.argsort(X[:, j], kind="stable")
        order[c_i] = idx
        x_sorted[c_i] = X[idx, j]
    return bits, bin_cols.astype(np.int64), cont_cols.astype(np.int64), order, x_sorted


@dataclass
class RegressionTree:
    """A fitted CART regression tree over flattened node arrays.

    ``feature[i] == -1`` marks node i as a leaf predicting ``value[i]``;
    otherwise the node routes rows with ``x[feature] <= threshold`` to
    ``left[i]`` and the rest to ``right[i]``. Node 0 is the root.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def leaf_count(self) -> int:
        return int((self.feature < 0).sum())

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X)
        if X.shape[1] != self.n_features:
            raise DimensionMismatchError(
                f"expected {self.n_features} features, got {X.shape[1]}"
            )
        return _apply(self.feature, self.threshold, self.left, self.right, self.value, X)

    def to_dict(self) -> dict:
        nodes = []
        for i in range(self.node_count):
            if self.feature[i] < 0:
                nodes.append({"id": i, "kind": "leaf", "value": float(self.value[i])})
            else:
                nodes.append(
                    {
                        "id": i,
                        "kind": "split",
                        "feature": int(self.feature[i]),
                        "threshold": float(self.threshold[i]),
                        "left": int(self.left[i]),
                        "right": int(self.right[i]),
                    }
                )
        return {"n_features": self.n_features, "nodes": nodes}

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionTree":
        nodes = d["nodes"]
        count = len(nodes)
        feature = np.full(count, -1, np.int64)
        threshold = np.zeros(count)
        left = np.full(count, -1, np.int64)
        right = np.full(count, -1, np.int64)
        value = np.zeros(count)
        for node in nodes:
            i = int(node["id"])
            if node["kind"] == "leaf":
                value[i] = float(node["value"])
            else:
                feature[i] = int(node["feature"])
                threshold[i] = float(node["threshold"])
                left[i] = int(node["left"])
                right[i] = int(node["right"])
        return cls(feature, threshold, left, right, value, int(d["n_features"]))


def best_split(X, y, min_leaf_instances: int):
    """Best (feature, threshold, sse_reduction) for one node, or None.

    Candidates are midpoints between consecutive distinct sorted values of
    each feature; both children must keep at least ``min_leaf_instances``
    rows; None when no candidate strictly reduces the SSE.
    """
    X = _as_matrix(X)
    y = np.ascontiguousarray(np.asarray(y, dtype=np.float64))
    n, p = X.shape
    bits, bin_cols, cont_cols, order, x_sorted = _presort(X)
    gain, feat, thr = _node_candidate(
        X,
        y,
        bits,
        bin_cols,
        cont_cols,
        order,
        x_sorted.copy(),
        np.arange(n, dtype=np.int32),
        0,
        n,
        min_leaf_instances,
        EXACT_SPLIT_CUTOFF,
        np.zeros(64),
        np.zeros(64, np.int64),
        np.empty(p),
        np.empty(p),
        np.empty(EXACT_SPLIT_CUTOFF + 1),
    )
    if feat < 0:
        return None
    return int(feat), float(thr), float(gain)


def fit_regression_tree(
    X, y, num_leaves: int, min_leaf_instances: int, _presorted=None, _train_pred=None
) -> RegressionTree:
    """Grow a least-squares tree, splitting the highest-gain leaf first.

    ``_train_pred``, when given, receives the tree's predictions on the
    training rows (known exactly from the final leaf segments, so no
    descent pass is needed).
    """
    X = _as_matrix(X)
    y = np.ascontiguousarray(np.asarray(y, dtype=np.float64))
    if X.shape[0] == 0:
        raise ValueError("cannot fit a tree on an empty matrix")
    if X.shape[0] != y.shape[0]:
        raise ValueError("X and y row counts differ")
    bits, bin_cols, cont_cols, order, x_sorted = (
        _presort(X) if _presorted is None else _presorted
    )
    if _train_pred is None:
        _train_pred = np.empty(X.shape[0])
    feature, threshold, left, right, value = _grow(
        X, y, bits, bin_cols, cont_cols, order, x_sorted,
        num_leaves, min_leaf_instances, EXACT_SPLIT_CUTOFF, _train_pred,
    )
    return RegressionTree(feature, threshold, left, right, value, X.shape[1])


def predict_tree(tree: RegressionTree, x) -> float:
    """Route a single feature vector to its leaf value."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != tree.n_features:
        raise DimensionMismatchError(
            f"expected a vector of {tree.n_features} features"
        )
    return float(tree.predict(x[None, :])[0])


@dataclass
class GbdtModel:
    """Boosted tree ensemble: F0 plus learning-rate-scaled tree corrections."""

    initial_prediction: float
    trees: list[RegressionTree]
    learning_rate: float
    hyperparams: HyperParams
    feature_names: list[str] = field(default_factory=list)

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features if self.trees else len(self.feature_names)

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X)
        out = np.full(X.shape[0], self.initial_prediction)
        for tree in self.trees:
            out += self.learning_rate * tree.predict(X)
        return out

    def to_dict(self) -> dict:
        return {
            "format_version": TREE_FORMAT_VERSION,
            "kind": "gbdt",
            "initial_prediction": float(self.initial_prediction),
            "learning_rate": float(self.learning_rate),
            "hyperparams": self.hyperparams.to_dict(),
            "feature_names": list(self.feature_names),
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GbdtModel":
        if d.get("kind") != "gbdt":
            raise ValueError(f"not a gbdt document: kind={d.get('kind')!r}")
        return cls(
            initial_prediction=float(d["initial_prediction"]),
            trees=[RegressionTree.from_dict(t) for t in d["trees"]],
            learning_rate=float(d["learning_rate"]),
            hyperparams=HyperParams.from_dict(d["hyperparams"]),
            feature_names=list(d["feature_names"]),
        )


@dataclass
class ForestModel:
    """Bagged trees; the prediction is the unweighted mean over members."""

    trees: list[RegressionTree]
    bootstrap_seed: int
    feature_names: list[str] = field(default_factory=list)

    @property
    def tree_count(self) -> int:
        return len(self.trees)

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features if self.trees else len(self.feature_names)

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X)
        out = np.zeros(X.shape[0])
        for tree in self.trees:
            out += tree.predict(X)
        return out / self.tree_count

    def to_dict(self) -> dict:
        return {
            "format_version": TREE_FORMAT_VERSION,
            "kind": "forest",
            "bootstrap_seed": int(self.bootstrap_seed),
            "tree_count": self.tree_count,
            "feature_names": list(self.feature_names),
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestModel":
        if d.get("kind") != "forest":
            raise ValueError(f"not a forest document: kind={d.get('kind')!r}")
        return cls(
            trees=[RegressionTree.from_dict(t) for t in d["trees"]],
            bootstrap_seed=int(d["bootstrap_seed"]),
            feature_names=list(d.get("feature_names", [])),
        )


def _matrix_arrays(matrix, y):
    """Accept a FeatureMatrix-like object or a plain array pair."""
    if hasattr(matrix, "X"):
        names = list(getattr(matrix, "column_names", []))
        return _as_matrix(matrix.X), np.asarray(matrix.y, dtype=np.float64), names
    if y is None:
        raise ValueError("targets required when passing a bare array")
    return _as_matrix(matrix), np.asarray(y, dtype=np.float64), []


def fit_gbdt(matrix, params: HyperParams, y=None) -> GbdtModel:
    """MART with squared loss: each tree fits the current residuals.

    F0 is the target mean; after each stage the prediction moves by
    learning_rate times the new tree. Stages stop early once the residual
    SSE drops below 1e-12 * n.
    """
    X, targets, names = _matrix_arrays(matrix, y)
    if X.shape[0] == 0:
        raise ValueError("cannot fit on an empty matrix")
    n = X.shape[0]
    presorted = _presort(X)  # feature order never changes across stages
    f0 = float(np.mean(targets))
    current = np.full(n, f0)
    stage_pred = np.empty(n)
    trees: list[RegressionTree] = []
    for _ in range(params.num_trees):
        residual = targets - current
        if float(np.dot(residual, residual)) < 1e-12 * n:
            break
        tree = fit_regression_tree(
            X, residual, params.num_leaves, params.min_leaf_instances,
            _presorted=presorted, _train_pred=stage_pred,
        )
        trees.append(tree)
        current += params.learning_rate * stage_pred
    return GbdtModel(
        initial_prediction=f0,
        trees=trees,
        learning_rate=params.learning_rate,
        hyperparams=params,
        feature_names=names,
    )


def predict_gbdt(model: GbdtModel, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != model.n_features:
        raise DimensionMismatchError(
            f"expected a vector of {model.n_features} features"
        )
    return float(model.predict(x[None, :])[0])


def fit_forest(
    matrix,
    tree_count: int,
    num_leaves: int,
    min_leaf_instances: int,
    seed: int,
    y=None,
    bootstrap: bool = True,
) -> ForestModel:
    """Bag ``tree_count`` trees; each resample is keyed by (seed, tree index)."""
    X, targets, names = _matrix_arrays(matrix, y)
    if X.shape[0] == 0:
        raise ValueError("cannot fit on an empty matrix")
    if tree_count < 1:
        raise ValueError("tree_count must be at least 1")
    n = X.shape[0]
    trees = []
    for i in range(tree_count):
        if bootstrap:
            rng = np.random.default_rng((seed, i))
            idx = rng.integers(0, n, size=n)
            trees.append(
                fit_regression_tree(X[idx], targets[idx], num_leaves, min_leaf_instances)
            )
        else:
            trees.append(
                fit_regression_tree(X, targets, num_leaves, min_leaf_instances)
            )
    return ForestModel(trees=trees, bootstrap_seed=seed, feature_names=names)


def predict_forest(model: ForestModel, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != model.n_features:
        raise DimensionMismatchError(
            f"expected a vector of {model.n_features} features"
        )
    return float(model.predict(x[None, :])[0])


def warm_up() -> None:
    """Trigger JIT compilation of the tree kernels.

    Fits one matrix small enough for the exact split path and one large
    enough for the scan path, with a binary and a continuous column each.
    """
    X = np.asarray([[0.0], [1.0], [2.0], [3.0]])
    y = np.asarray([0.0, 1.0, 4.0, 9.0])
    fit_regression_tree(X, y, num_leaves=2, min_leaf_instances=1).predict(X)
    best_split(X, y, 1)
    n = 3 * EXACT_SPLIT_CUTOFF
    Xl = np.empty((n, 2))
    Xl[:, 0] = np.arange(n) % 2
    Xl[:, 1] = np.arange(n, dtype=np.float64)
    yl = Xl[:, 1] + 10.0 * Xl[:, 0]
    fit_regression_tree(Xl, yl, num_leaves=4, min_leaf_instances=1).predict(Xl)
