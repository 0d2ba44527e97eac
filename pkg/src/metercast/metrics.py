"""Forecast error metrics and reference-table consistency checks.

Seven scores are computed per evaluation: the absolute and squared error
means (MAE, RMSE), their baseline-relative forms (RAE, RSE), the
coefficient of determination (1 - RSE), an explained-variance ratio, and
a normalized RMSE. The relative forms divide by the error of predicting
the observed mean, so a score of 1 means "no better than the mean".

``r2_explained`` is deliberately distinct from ``cod``: the former is
the explained-variance ratio sum((yhat - ybar)^2) / sum((y - ybar)^2),
which equals ``cod`` only for least-squares fits evaluated in sample.
Both are reported because published results use both conventions.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import (
    ConstantTargetError,
    EmptyInputError,
    InconsistentFixtureError,
    LengthMismatchError,
    ZeroNormalizerError,
)

#: Tolerances of the fixture identities: |cod + rse - 1| is absolute, the
#: two per-table constants are relative (source tables print 6 decimals).
COD_RSE_TOLERANCE = 1e-5
TABLE_CONSTANT_TOLERANCE = 1e-3

NORMALIZERS = ("mean", "range", "std")


def _pair(y, y_hat) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape or y.ndim != 1:
        raise LengthMismatchError(
            f"expected matching 1-d sequences, got {y.shape} and {y_hat.shape}"
        )
    if y.shape[0] == 0:
        raise EmptyInputError("metrics need at least one pair")
    return y, y_hat


def mae(y, y_hat) -> float:
    """Mean absolute error."""
    y, y_hat = _pair(y, y_hat)
    return float(np.mean(np.abs(y - y_hat)))


def rmse(y, y_hat) -> float:
    """Root mean squared error."""
    y, y_hat = _pair(y, y_hat)
    return float(np.sqrt(np.mean((y - y_hat) ** 2)))


def rae(y, y_hat) -> float:
    """Absolute error relative to predicting the observed mean."""
    y, y_hat = _pair(y, y_hat)
    denom = float(np.sum(np.abs(y - np.mean(y))))
    if denom == 0.0:
        raise ConstantTargetError("rae undefined for constant observations")
    return float(np.sum(np.abs(y - y_hat))) / denom


def rse(y, y_hat) -> float:
    """Squared error relative to predicting the observed mean."""
    y, y_hat = _pair(y, y_hat)
    denom = float(np.sum((y - np.mean(y)) ** 2))
    if denom == 0.0:
        raise ConstantTargetError("rse undefined for constant observations")
    return float(np.sum((y - y_hat) ** 2)) / denom


def cod(y, y_hat) -> float:
    """Coefficient of determination, exactly 1 - rse."""
    return 1.0 - rse(y, y_hat)


def r2_explained(y, y_hat) -> float:
    """Explained-variance ratio about the observed mean."""
    y, y_hat = _pair(y, y_hat)
    y_bar = np.mean(y)
    denom = float(np.sum((y - y_bar) ** 2))
    if denom == 0.0:
        raise ConstantTargetError("r2 undefined for constant observations")
    return float(np.sum((y_hat - y_bar) ** 2)) / denom


def nrmse(y, y_hat, normalizer: str = "mean") -> float:
    """RMSE divided by a scale of the observations (mean, range, or std)."""
    y, y_hat = _pair(y, y_hat)
    if normalizer == "mean":
        scale = float(np.mean(y))
    elif normalizer == "range":
        scale = float(np.max(y) - np.min(y))
    elif normalizer == "std":
        scale = float(np.std(y))
    else:
        raise ValueError(f"unknown normalizer {normalizer!r}")
    if scale == 0.0:
        raise ZeroNormalizerError(f"{normalizer} of the observations is zero")
    return rmse(y, y_hat) / scale


@dataclass(frozen=True)
class MetricsReport:
    """All seven scores of one (observed, predicted) evaluation."""

    mae: float
    rmse: float
    nrmse: float
    rae: float
    rse: float
    r2_explained: float
    cod: float
    n: int
    nrmse_normalizer: str = "mean"

    def to_dict(self) -> dict:
        return {
            "mae": self.mae,
            "rmse": self.rmse,
            "nrmse": self.nrmse,
            "rae": self.rae,
            "rse": self.rse,
            "r2_explained": self.r2_explained,
            "cod": self.cod,
            "n": self.n,
            "nrmse_normalizer": self.nrmse_normalizer,
        }


def compute_report(y, y_hat, normalizer: str = "mean") -> MetricsReport:
    y, y_hat = _pair(y, y_hat)
    the_rse = rse(y, y_hat)
    return MetricsReport(
        mae=mae(y, y_hat),
        rmse=rmse(y, y_hat),
        nrmse=nrmse(y, y_hat, normalizer),
        rae=rae(y, y_hat),
        rse=the_rse,
        r2_explained=r2_explained(y, y_hat),
        cod=1.0 - the_rse,
        n=int(y.shape[0]),
        nrmse_normalizer=normalizer,
    )


# ------------------------------------------------------------ fixture data


@dataclass(frozen=True)
class FixtureRow:
    """One row of the reference tuning-sweep table.

    ``sweep_size`` identifies which sweep (5/10/15/20/30 candidates) the
    row came from; rows of one sweep were scored on one evaluation set, so
    certain ratios are constant within a sweep.
    """

    sweep_size: int
    num_leaves: int
    min_leaf_instances: int
    learning_rate: float
    num_trees: int
    mae: float
    rmse: float
    rae: float
    rse: float
    cod: float


@dataclass(frozen=True)
class FixtureReport:
    """Per-sweep constants and worst-case identity deviations."""

    mae_over_rae: dict[int, float]
    rmse_sq_over_rse: dict[int, float]
    max_cod_rse_deviation: float
    max_mae_rae_rel_deviation: float
    max_rmse_rse_rel_deviation: float
    row_count: int

    def to_dict(self) -> dict:
        return {
            "mae_over_rae": {str(k): v for k, v in self.mae_over_rae.items()},
            "rmse_sq_over_rse": {str(k): v for k, v in self.rmse_sq_over_rse.items()},
            "max_cod_rse_deviation": self.max_cod_rse_deviation,
            "max_mae_rae_rel_deviation": self.max_mae_rae_rel_deviation,
            "max_rmse_rse_rel_deviation": self.max_rmse_rse_rel_deviation,
            "row_count": self.row_count,
        }


def fixture_path(name: str = "tuning_sweep_reference.csv"):
    """Path-like handle to a packaged reference CSV."""
    return resources.files("metercast") / "fixtures" / name


def load_fixture(path=None) -> list[FixtureRow]:
    """Load the packaged (or a user-supplied) tuning-sweep reference table."""
    handle = fixture_path() if path is None else path
    rows: list[FixtureRow] = []
    with open(handle, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            rows.append(
                FixtureRow(
                    sweep_size=int(rec["sweep_size"]),
                    num_leaves=int(rec["num_leaves"]),
                    min_leaf_instances=int(rec["min_leaf_instances"]),
                    learning_rate=float(rec["learning_rate"]),
                    num_trees=int(rec["num_trees"]),
                    mae=float(rec["mae"]),
                    rmse=float(rec["rmse"]),
                    rae=float(rec["rae"]),
                    rse=float(rec["rse"]),
                    cod=float(rec["cod"]),
                )
            )
    return rows


def validate_fixture(rows) -> FixtureReport:
    """Check the three cross-column identities of the reference table.

    All rows of one sweep score the same evaluation set, so per sweep:
    mae/rae equals the set's mean absolute deviation and rmse^2/rse its
    mean squared deviation, both constant across rows; and cod + rse = 1
    by definition on every row.

    Raises:
        InconsistentFixtureError: any identity exceeds its tolerance; the
            report is attached to the error.
    """
    rows = list(rows)
    if not rows:
        raise EmptyInputError("no fixture rows")
    by_sweep: dict[int, list[FixtureRow]] = {}
    for row in rows:
        by_sweep.setdefault(row.sweep_size, []).append(row)

    max_cod_rse = 0.0
    max_mae_rae = 0.0
    max_rmse_rse = 0.0
    mae_consts: dict[int, float] = {}
    rmse_consts: dict[int, float] = {}
    for sweep, group in sorted(by_sweep.items()):
        mae_ratios = [r.mae / r.rae for r in group]
        rmse_ratios = [r.rmse**2 / r.rse for r in group]
        mae_const = float(np.mean(mae_ratios))
        rmse_const = float(np.mean(rmse_ratios))
        mae_consts[sweep] = mae_const
        rmse_consts[sweep] = rmse_const
        for row, mr, rr in zip(group, mae_ratios, rmse_ratios):
            max_cod_rse = max(max_cod_rse, abs(row.cod + row.rse - 1.0))
            max_mae_rae = max(max_mae_rae, abs(mr - mae_const) / mae_const)
            max_rmse_rse = max(max_rmse_rse, abs(rr - rmse_const) / rmse_const)

    report = FixtureReport(
        mae_over_rae=mae_consts,
        rmse_sq_over_rse=rmse_consts,
        max_cod_rse_deviation=max_cod_rse,
        max_mae_rae_rel_deviation=max_mae_rae,
        max_rmse_rse_rel_deviation=max_rmse_rse,
        row_count=len(rows),
    )
    problems = []
    if max_cod_rse > COD_RSE_TOLERANCE:
        problems.append(f"cod+rse deviates by {max_cod_rse:g}")
    if max_mae_rae > TABLE_CONSTANT_TOLERANCE:
        problems.append(f"mae/rae deviates by {max_mae_rae:g} relative")
    if max_rmse_rse > TABLE_CONSTANT_TOLERANCE:
        problems.append(f"rmse^2/rse deviates by {max_rmse_rse:g} relative")
    if problems:
        raise InconsistentFixtureError("; ".join(problems), report=report)
    return report
