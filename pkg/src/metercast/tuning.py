"""Temporal data splitting and random-search hyperparameter tuning.

Candidate hyperparameter sets are drawn independently, each from its own
RNG stream keyed by (seed, candidate index), so the first m draws of a
longer sweep equal a shorter sweep's draws and parallel evaluation would
reproduce serial results. Each candidate is scored by forward-chaining
holdout: fit on a prefix of the (time-ordered) training rows, validate
on the next contiguous block, and average the fold scores. The best mean
score wins, first sampled on ties, and the winner is refit on the whole
training set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySideError, InsufficientDataError
from .featurize import FeatureMatrix
from .metrics import mae as _mae, rmse as _rmse
from .trees import GbdtModel, HyperParams, fit_gbdt

#: Default resampling: three forward-chaining holdout iterations.
DEFAULT_RESAMPLING = 3

_METRICS = {"mae": _mae, "rmse": _rmse}


@dataclass(frozen=True)
class ParamSpace:
    """Sampling ranges (inclusive) for each hyperparameter.

    ``learning_rate`` is sampled log-uniformly, the three counts
    uniformly. The defaults envelope every observed configuration of the
    reference hyperparameter grid (see fixtures/hyperparam_grid_reference.csv).
    """

    num_leaves: tuple[int, int] = (2, 128)
    min_leaf_instances: tuple[int, int] = (1, 50)
    learning_rate: tuple[float, float] = (0.02, 0.4)
    num_trees: tuple[int, int] = (20, 500)

    def __post_init__(self):
        for name in ("num_leaves", "min_leaf_instances", "num_trees"):
            lo, hi = getattr(self, name)
            if not (isinstance(lo, int) and isinstance(hi, int) and 1 <= lo <= hi):
                raise ValueError(f"{name} range must be integers with 1 <= lo <= hi")
        lo, hi = self.learning_rate
        if not 0.0 < lo <= hi:
            raise ValueError("learning_rate range must satisfy 0 < lo <= hi")

    def to_dict(self) -> dict:
        return {
            "num_leaves": list(self.num_leaves),
            "min_leaf_instances": list(self.min_leaf_instances),
            "learning_rate": list(self.learning_rate),
            "num_trees": list(self.num_trees),
        }


@dataclass(frozen=True)
class CandidateResult:
    params: HyperParams
    fold_scores: tuple[float, ...]
    mean_score: float

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "fold_scores": list(self.fold_scores),
            "mean_score": self.mean_score,
        }


@dataclass
class TuningResult:
    candidates: list[CandidateResult]
    best_index: int
    best: HyperParams
    final_model: GbdtModel
    selection_metric: str
    seed: int
    resampling: int | float
    fold_bounds: list[tuple[int, int, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "selection_metric": self.selection_metric,
            "seed": self.seed,
            "resampling": self.resampling,
            "fold_bounds": [list(b) for b in self.fold_bounds],
            "candidates": [c.to_dict() for c in self.candidates],
            "best_index": self.best_index,
            "best": self.best.to_dict(),
            "final_model": self.final_model.to_dict(),
        }


def temporal_split(matrix: FeatureMatrix, split_year: int) -> tuple[FeatureMatrix, FeatureMatrix]:
    """Split rows into (year <= split_year, year > split_year), order kept."""
    years = matrix.years
    train_mask = years <= split_year
    if not train_mask.any():
        raise EmptySideError(f"no rows at or before {split_year}")
    if train_mask.all():
        raise EmptySideError(f"no rows after {split_year}")
    return matrix.subset(train_mask), matrix.subset(~train_mask)


def sample_hyperparams(seed: int, space: ParamSpace, m: int) -> list[HyperParams]:
    """m independent draws; draw i depends only on (seed, i) and the space."""
    if m < 1:
        raise ValueError("m must be at least 1")
    out = []
    for i in range(m):
        rng = np.random.default_rng((seed, i))
        leaves = int(rng.integers(space.num_leaves[0], space.num_leaves[1], endpoint=True))
        min_leaf = int(
            rng.integers(space.min_leaf_instances[0], space.min_leaf_instances[1], endpoint=True)
        )
        lo, hi = space.learning_rate
        rate = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
        trees = int(rng.integers(space.num_trees[0], space.num_trees[1], endpoint=True))
        out.append(HyperParams(leaves, min_leaf, rate, trees))
    return out


def fold_bounds(n: int, resampling: int | float) -> list[tuple[int, int, int]]:
    """(fit_end, val_start, val_end) segments of the forward-chaining plan.

    An integer k yields k iterations over k+1 equal contiguous blocks:
    iteration i fits rows [0, b_i) and validates [b_i, b_{i+1}). A float
    fraction f yields one iteration holding out the tail f of the rows.

    Raises:
        InsufficientDataError: a fit prefix or holdout block came up empty.
    """
    if isinstance(resampling, bool) or n < 0:
        raise ValueError("bad arguments")
    if isinstance(resampling, int):
        k = resampling
        if k < 1:
            raise ValueError("fold count must be at least 1")
        edges = [(n * (i + 1)) // (k + 1) for i in range(k + 1)]
        bounds = []
        prev = edges[0]
        if prev < 1:
            raise InsufficientDataError(f"{n} rows cannot support {k} holdout folds")
        for nxt in edges[1:]:
            if nxt <= prev:
                raise InsufficientDataError(f"{n} rows cannot support {k} holdout folds")
            bounds.append((prev, prev, nxt))
            prev = nxt
        return bounds
    fraction = float(resampling)
    if not 0.0 < fraction < 1.0:
        raise ValueError("holdout fraction must lie in (0, 1)")
    holdout = int(round(n * fraction))
    if holdout < 1 or holdout > n - 1:
        raise InsufficientDataError(f"{n} rows cannot hold out fraction {fraction}")
    return [(n - holdout, n - holdout, n)]


def _resolve_metric(metric):
    if callable(metric):
        return getattr(metric, "__name__", "custom"), metric
    if metric in _METRICS:
        return metric, _METRICS[metric]
    raise ValueError(f"unknown metric {metric!r}")


def random_search(
    train: FeatureMatrix,
    space: ParamSpace | None = None,
    m: int = 10,
    resampling: int | float = DEFAULT_RESAMPLING,
    metric="mae",
    seed: int = 0,
) -> TuningResult:
    """Random-search tuning with forward-chaining holdout scoring.

    ``metric`` is "mae", "rmse", or any callable(observed, predicted)
    returning a score to minimize.
    """
    if space is None:
        space = ParamSpace()
    metric_name, score_fn = _resolve_metric(metric)
    n = train.n
    bounds = fold_bounds(n, resampling)
    candidates = sample_hyperparams(seed, space, m)

    X, y = train.X, train.y
    results: list[CandidateResult] = []
    for params in candidates:
        scores = []
        for fit_end, val_start, val_end in bounds:
            model = fit_gbdt(X[:fit_end], params, y=y[:fit_end])
            pred = model.predict(X[val_start:val_end])
            scores.append(float(score_fn(y[val_start:val_end], pred)))
        results.append(
            CandidateResult(params, tuple(scores), float(np.mean(scores)))
        )

    best_index = 0
    for i, result in enumerate(results):
        if result.mean_score < results[best_index].mean_score:
            best_index = i
    final_model = fit_gbdt(train, results[best_index].params)
    return TuningResult(
        candidates=results,
        best_index=best_index,
        best=results[best_index].params,
        final_model=final_model,
        selection_metric=metric_name,
        seed=seed,
        resampling=resampling,
        fold_bounds=bounds,
    )
