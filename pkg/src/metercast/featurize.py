"""Feature engineering for half-hourly load forecasting.

Each matrix row describes one half hour: its calendar context (slot of
day, month, day of week, weekend/holiday flags, part of day), recent
consumption (short lags, optionally the week lag), and the previous
calendar day's min/max. Targets and consumption-derived features share
one transformed scale so the learners see a consistent space.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSeriesError,
    EmptyMatrixError,
    InsufficientHistoryError,
    NegativeValueError,
)
from .ingest import SLOTS_PER_DAY, WEEK_SLOTS, HolidayCalendar, LoadSeries

_DOW_NAMES = (
    "monday",
    "tuesday",
    "wednesday",
    "thursday",
    "friday",
    "saturday",
    "sunday",
)
_TIME_PARTS = ("morning", "afternoon", "evening", "night")


@dataclass(frozen=True)
class FeatureSpec:
    """Configuration of the feature matrix columns.

    ``time_part_boundaries`` (b0, b1, b2, b3) carve the day into
    morning [b0, b1), afternoon [b1, b2), evening [b2, b3) and night
    [b3, 48) + [0, b0). The default puts morning at 06:00, afternoon at
    noon, evening at 18:00 and night at 22:00.
    """

    lags: tuple[int, ...] = (1, 2)
    include_prev_day_min_max: bool = True
    include_week_lag: bool = False
    time_part_boundaries: tuple[int, int, int, int] = (12, 24, 36, 44)
    transform: str = "log1p"
    scale_factor: float = 1000.0

    def __post_init__(self):
        object.__setattr__(self, "lags", tuple(sorted(set(int(l) for l in self.lags))))
        if any(not 1 <= l <= WEEK_SLOTS for l in self.lags):
            raise ValueError(f"lags must lie in 1..{WEEK_SLOTS}")
        b = self.time_part_boundaries
        if len(b) != 4 or list(b) != sorted(set(b)) or b[0] < 0 or b[-1] > 47:
            raise ValueError("time_part_boundaries must be 4 strictly increasing slots in 0..47")
        if self.transform not in ("none", "log1p"):
            raise ValueError(f"unknown transform {self.transform!r}")
        if not self.scale_factor > 0:
            raise ValueError("scale_factor must be positive")

    @property
    def effective_lags(self) -> tuple[int, ...]:
        lags = set(self.lags)
        if self.include_week_lag:
            lags.add(WEEK_SLOTS)
        return tuple(sorted(lags))

    def to_dict(self) -> dict:
        return {
            "lags": list(self.lags),
            "include_prev_day_min_max": self.include_prev_day_min_max,
            "include_week_lag": self.include_week_lag,
            "time_part_boundaries": list(self.time_part_boundaries),
            "transform": self.transform,
            "scale_factor": self.scale_factor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureSpec":
        return cls(
            lags=tuple(int(l) for l in d["lags"]),
            include_prev_day_min_max=bool(d["include_prev_day_min_max"]),
            include_week_lag=bool(d["include_week_lag"]),
            time_part_boundaries=tuple(int(b) for b in d["time_part_boundaries"]),
            transform=str(d["transform"]),
            scale_factor=float(d["scale_factor"]),
        )


def feature_names(spec: FeatureSpec) -> list[str]:
    """Ordered column names of the matrix built from ``spec``."""
    names = ["day_hour_index"]
    names += [f"month_{m}" for m in range(1, 13)]
    names += [f"dow_{d}" for d in _DOW_NAMES]
    names += ["is_weekend", "is_holiday"]
    names += [f"tp_{p}" for p in _TIME_PARTS]
    names += [f"lag_{l}" for l in spec.effective_lags]
    if spec.include_prev_day_min_max:
        names += ["prev_day_min", "prev_day_max"]
    return names


def time_part_of(slot: int, boundaries: tuple[int, int, int, int]) -> str:
    b0, b1, b2, b3 = boundaries
    if b0 <= slot < b1:
        return "morning"
    if b1 <= slot < b2:
        return "afternoon"
    if b2 <= slot < b3:
        return "evening"
    return "night"


def calendar_features(
    date: dt.date, slot: int, calendar: HolidayCalendar, spec: FeatureSpec
) -> dict[str, float]:
    """Calendar-derived features for one half hour."""
    out = {"day_hour_index": float(slot)}
    for m in range(1, 13):
        out[f"month_{m}"] = 1.0 if date.month == m else 0.0
    dow = date.weekday()
    for i, name in enumerate(_DOW_NAMES):
        out[f"dow_{name}"] = 1.0 if dow == i else 0.0
    out["is_weekend"] = 1.0 if dow >= 5 else 0.0
    out["is_holiday"] = 1.0 if calendar.is_holiday(date) else 0.0
    part = time_part_of(slot, spec.time_part_boundaries)
    for name in _TIME_PARTS:
        out[f"tp_{name}"] = 1.0 if part == name else 0.0
    return out


def lag_features(series: LoadSeries, t: int, lags) -> dict[str, float]:
    """Lagged values at index ``t``; values are read as-is from ``series``.

    Raises:
        InsufficientHistoryError: some lag reaches before the series start
            or lands on a missing entry. Callers drop the row.
    """
    out = {}
    for l in sorted(lags):
        j = t - l
        if j < 0 or np.isnan(series.values[j]):
            raise InsufficientHistoryError(f"lag {l} unavailable at index {t}")
        out[f"lag_{l}"] = float(series.values[j])
    return out


def prev_day_stats(series: LoadSeries, t: int) -> tuple[float, float]:
    """(min, max) over the 48 slots of the calendar day before index ``t``.

    Raises:
        InsufficientHistoryError: the previous day is not fully inside the
            series or has missing entries.
    """
    date, _ = series.timestamp(t)
    prev = date - dt.timedelta(days=1)
    lo = series.try_index(prev, 0)
    hi = series.try_index(prev, SLOTS_PER_DAY - 1)
    if lo is None or hi is None:
        raise InsufficientHistoryError(f"previous day {prev} not in series")
    window = series.values[lo : hi + 1]
    if np.isnan(window).any():
        raise InsufficientHistoryError(f"previous day {prev} has missing entries")
    return float(window.min()), float(window.max())


@dataclass(frozen=True)
class AcfResult:
    """Sample autocorrelation for lags 1..max_lag; ``values[i]`` is lag i+1."""

    values: np.ndarray

    @property
    def max_lag(self) -> int:
        return len(self.values)

    def r(self, lag: int) -> float:
        return float(self.values[lag - 1])


def autocorrelation(series: LoadSeries, max_lag: int) -> AcfResult:
    """Sample autocorrelation r_l = sum((v_t - m)(v_{t+l} - m)) / sum((v_t - m)^2).

    The mean and denominator use every present value; each lag's numerator
    uses only the pairs where both entries are present.

    Raises:
        DegenerateSeriesError: constant series (zero variance).
        ValueError: series not longer than max_lag + 2.
    """
    if not len(series) > max_lag + 2:
        raise ValueError("series too short for the requested max_lag")
    v = series.values
    present = ~np.isnan(v)
    mean = v[present].mean()
    centered = np.where(present, v - mean, 0.0)
    denom = float((centered[present] ** 2).sum())
    if denom == 0.0:
        raise DegenerateSeriesError("constant series has undefined autocorrelation")
    out = np.empty(max_lag)
    for l in range(1, max_lag + 1):
        both = present[:-l] & present[l:]
        out[l - 1] = float((centered[:-l] * centered[l:] * both).sum()) / denom
    return AcfResult(out)


def select_lags(acf: AcfResult, k: int) -> tuple[int, ...]:
    """The k lags with the largest |r|, ties going to the smaller lag."""
    if k < 1:
        raise ValueError("k must be at least 1")
    ranked = sorted(range(1, acf.max_lag + 1), key=lambda l: (-abs(acf.r(l)), l))
    return tuple(sorted(ranked[: min(k, acf.max_lag)]))


def apply_transform(values, spec: FeatureSpec) -> np.ndarray:
    """Scale by ``spec.scale_factor``, then optionally ln(1+x).

    Raises:
        NegativeValueError: negative input under the log1p transform.
    """
    values = np.asarray(values, dtype=np.float64)
    scaled = values * spec.scale_factor
    if spec.transform == "none":
        return scaled
    if np.any(values < 0):  # NaN compares false, so gaps pass through
        raise NegativeValueError("log1p transform requires non-negative consumption")
    return np.log1p(scaled)


def invert_transform(values, spec: FeatureSpec) -> np.ndarray:
    """Inverse of :func:`apply_transform`."""
    values = np.asarray(values, dtype=np.float64)
    if spec.transform == "log1p":
        values = np.expm1(values)
    return values / spec.scale_factor


@dataclass
class FeatureMatrix:
    """Aligned design matrix, targets and timestamps.

    ``X[i]`` holds the ``column_names`` features for the half hour at
    ``(dates[i], slots[i])``; ``y[i]`` is that half hour's transformed
    consumption. Rows are in strict timestamp order.
    """

    column_names: list[str]
    X: np.ndarray
    y: np.ndarray
    dates: list[dt.date]
    slots: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def years(self) -> np.ndarray:
        return np.asarray([d.year for d in self.dates])

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.column_names.index(name)]

    def subset(self, mask: np.ndarray) -> "FeatureMatrix":
        idx = np.flatnonzero(mask)
        return FeatureMatrix(
            column_names=list(self.column_names),
            X=self.X[idx],
            y=self.y[idx],
            dates=[self.dates[i] for i in idx],
            slots=self.slots[idx],
        )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.column_names + ["target", "timestamp"])
            for i in range(self.n):
                stamp = "%sT%02d:%02d" % (
                    self.dates[i].isoformat(),
                    self.slots[i] // 2,
                    (self.slots[i] % 2) * 30,
                )
                writer.writerow(
                    [repr(float(v)) for v in self.X[i]]
                    + [repr(float(self.y[i])), stamp]
                )


def read_matrix_csv(path) -> FeatureMatrix:
    """Read a matrix written by :meth:`FeatureMatrix.to_csv`."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) < 3 or header[-2:] != ["target", "timestamp"]:
            raise ValueError("not a feature matrix CSV")
        column_names = header[:-2]
        rows, targets, dates, slots = [], [], [], []
        for cells in reader:
            if not cells:
                continue
            rows.append([float(v) for v in cells[: len(column_names)]])
            targets.append(float(cells[-2]))
            stamp = cells[-1]
            date = dt.date.fromisoformat(stamp[:10])
            hour, minute = int(stamp[11:13]), int(stamp[14:16])
            dates.append(date)
            slots.append(hour * 2 + minute // 30)
    if not rows:
        raise EmptyMatrixError("feature matrix CSV has no rows")
    return FeatureMatrix(
        column_names=column_names,
        X=np.asarray(rows, dtype=np.float64),
        y=np.asarray(targets, dtype=np.float64),
        dates=dates,
        slots=np.asarray(slots, dtype=np.int64),
    )


def build_matrix(
    series: LoadSeries, calendar: HolidayCalendar, spec: FeatureSpec
) -> FeatureMatrix:
    """Build the full feature matrix for every index with enough history.

    Rows whose target, lags or previous-day window touch a missing entry
    are dropped. Lag and min/max features live on the transformed scale,
    like the target.

    Raises:
        EmptyMatrixError: no index survives the history requirements.
    """
    n = len(series)
    tv = apply_transform(series.values, spec)
    offsets = series.first_slot + np.arange(n)
    slots = offsets % SLOTS_PER_DAY
    day_idx = offsets // SLOTS_PER_DAY

    n_days = int(day_idx[-1]) + 1
    dates_by_day = [series.first_date + dt.timedelta(days=int(d)) for d in range(n_days)]
    months = np.asarray([d.month for d in dates_by_day])
    dows = np.asarray([d.weekday() for d in dates_by_day])
    holidays = np.asarray([calendar.is_holiday(d) for d in dates_by_day])

    # pad the transformed series into a (n_days, 48) grid; plain min/max
    # propagate NaN, which is exactly the all-present requirement
    grid = np.full(n_days * SLOTS_PER_DAY, np.nan)
    grid[series.first_slot : series.first_slot + n] = tv
    by_day = grid.reshape(n_days, SLOTS_PER_DAY)
    day_min = by_day.min(axis=1)
    day_max = by_day.max(axis=1)

    cols: dict[str, np.ndarray] = {"day_hour_index": slots.astype(float)}
    for m in range(1, 13):
        cols[f"month_{m}"] = (months[day_idx] == m).astype(float)
    for i, name in enumerate(_DOW_NAMES):
        cols[f"dow_{name}"] = (dows[day_idx] == i).astype(float)
    cols["is_weekend"] = (dows[day_idx] >= 5).astype(float)
    cols["is_holiday"] = holidays[day_idx].astype(float)
    b0, b1, b2, b3 = spec.time_part_boundaries
    cols["tp_morning"] = ((slots >= b0) & (slots < b1)).astype(float)
    cols["tp_afternoon"] = ((slots >= b1) & (slots < b2)).astype(float)
    cols["tp_evening"] = ((slots >= b2) & (slots < b3)).astype(float)
    cols["tp_night"] = ((slots >= b3) | (slots < b0)).astype(float)

    keep = ~np.isnan(tv)
    for l in spec.effective_lags:
        col = np.full(n, np.nan)
        col[l:] = tv[: n - l]
        cols[f"lag_{l}"] = col
        keep &= ~np.isnan(col)
    if spec.include_prev_day_min_max:
        prev = day_idx - 1
        valid_prev = prev >= 0
        mn = np.full(n, np.nan)
        mx = np.full(n, np.nan)
        mn[valid_prev] = day_min[prev[valid_prev]]
        mx[valid_prev] = day_max[prev[valid_prev]]
        cols["prev_day_min"] = mn
        cols["prev_day_max"] = mx
        keep &= ~np.isnan(mn)

    if not keep.any():
        raise EmptyMatrixError("no row has enough history for the requested features")

    names = feature_names(spec)
    X = np.column_stack([cols[name] for name in names])[keep]
    idx = np.flatnonzero(keep)
    return FeatureMatrix(
        column_names=names,
        X=X,
        y=tv[keep],
        dates=[dates_by_day[int(day_idx[i])] for i in idx],
        slots=slots[keep],
    )
