"""Ordinary-least-squares blend of the two base forecasters.

The meta-model is a plain affine map over the boosted-ensemble and
forest predictions, fit by solving the 3x3 normal equations. Because
(0, 1, 0) and (0, 0, 1) are feasible coefficient vectors, the blend's
training RMSE can never exceed either component's, which is the main
property tests pin down.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatchError

STACK_FORMAT_VERSION = 1

#: Condition-number threshold beyond which the normal matrix is treated
#: as effectively singular and a ridge perturbation is applied.
CONDITION_LIMIT = 1e12

#: Ridge strength added to the non-intercept diagonal in the degenerate case.
RIDGE_LAMBDA = 1e-8


@dataclass(frozen=True)
class StackModel:
    """Affine combination ``intercept + weight_bdtr*b + weight_dfr*d``."""

    intercept: float
    weight_bdtr: float
    weight_dfr: float
    training_rmse: float
    ridge_applied: bool

    @property
    def fit_diagnostics(self) -> tuple[float, bool]:
        return (self.training_rmse, self.ridge_applied)

    def predict(self, b, d) -> np.ndarray:
        b = np.asarray(b, dtype=np.float64)
        d = np.asarray(d, dtype=np.float64)
        return self.intercept + self.weight_bdtr * b + self.weight_dfr * d

    def to_dict(self) -> dict:
        return {
            "format_version": STACK_FORMAT_VERSION,
            "kind": "stack",
            "intercept": self.intercept,
            "weight_bdtr": self.weight_bdtr,
            "weight_dfr": self.weight_dfr,
            "training_rmse": self.training_rmse,
            "ridge_applied": self.ridge_applied,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "StackModel":
        if doc.get("kind") != "stack":
            raise ValueError(f"not a stack document: kind={doc.get('kind')!r}")
        return cls(
            intercept=float(doc["intercept"]),
            weight_bdtr=float(doc["weight_bdtr"]),
            weight_dfr=float(doc["weight_dfr"]),
            training_rmse=float(doc["training_rmse"]),
            ridge_applied=bool(doc["ridge_applied"]),
        )


def fit_stack(b, d, y) -> StackModel:
    """Least-squares coefficients for y ~ 1 + b + d.

    Solves the normal equations directly (3x3, partial-pivoting LU).
    A singular or badly conditioned normal matrix (condition number above
    ``CONDITION_LIMIT``) gets ``RIDGE_LAMBDA`` added to the two
    non-intercept diagonal entries, and the model is flagged.
    """
    b = np.asarray(b, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (b.shape == d.shape == y.shape) or b.ndim != 1:
        raise LengthMismatchError(
            f"expected matching 1-d sequences, got {b.shape}, {d.shape}, {y.shape}"
        )
    if b.shape[0] < 3:
        raise ValueError("stacking needs at least 3 rows")

    design = np.column_stack([np.ones_like(b), b, d])
    normal = design.T @ design
    rhs = design.T @ y

    ridge_applied = False
    condition = np.linalg.cond(normal)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        ridge_applied = True
    else:
        try:
            coef = np.linalg.solve(normal, rhs)
        except np.linalg.LinAlgError:
            ridge_applied = True
    if ridge_applied:
        perturbed = normal.copy()
        perturbed[1, 1] += RIDGE_LAMBDA
        perturbed[2, 2] += RIDGE_LAMBDA
        coef = np.linalg.solve(perturbed, rhs)

    fitted = design @ coef
    training_rmse = float(np.sqrt(np.mean((y - fitted) ** 2)))
    return StackModel(
        intercept=float(coef[0]),
        weight_bdtr=float(coef[1]),
        weight_dfr=float(coef[2]),
        training_rmse=training_rmse,
        ridge_applied=ridge_applied,
    )


def predict_stack(model: StackModel, b: float, d: float) -> float:
    """Scalar prediction of the affine blend."""
    return float(model.intercept + model.weight_bdtr * b + model.weight_dfr * d)
