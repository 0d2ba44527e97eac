"""Two-tier gap repair for half-hourly load series.

Missing entries are located as maximal runs (run-length encoding of the
missingness mask). Runs short enough to bridge are filled by linear
interpolation between their flanking readings; longer runs, and runs
touching the series boundary, are filled entry-by-entry with the mean of
the same half hour one day earlier and one week earlier. Runs are
processed chronologically so that earlier fills can serve as references
for later ones, and whole passes repeat until no further entry is
fillable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoFlankError, NoHistoryError
from .ingest import SLOTS_PER_DAY, WEEK_SLOTS, LoadSeries

#: Longest gap (in half-hour slots) still bridged by linear interpolation.
DEFAULT_SHORT_GAP_THRESHOLD = 4


@dataclass(frozen=True)
class MissingRun:
    """A maximal run of consecutive missing entries."""

    start_index: int
    length: int

    @property
    def stop_index(self) -> int:
        """One past the last missing index."""
        return self.start_index + self.length


@dataclass(frozen=True)
class ImputationReport:
    total_entries: int
    missing_before: int
    filled_linear: int
    filled_history: int
    unfilled: int

    @property
    def missing_fraction_before(self) -> float:
        return self.missing_before / self.total_entries if self.total_entries else 0.0

    def __post_init__(self):
        if self.filled_linear + self.filled_history + self.unfilled != self.missing_before:
            raise ValueError("fill counts do not add up to missing_before")


def missingness_runs(series: LoadSeries) -> list[MissingRun]:
    """Maximal runs of missing entries, ordered by start index."""
    mask = series.missing_mask
    # pad with present sentinels so every run has a detectable start and end
    padded = np.concatenate(([False], mask, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    starts, stops = edges[0::2], edges[1::2]
    return [MissingRun(int(a), int(b - a)) for a, b in zip(starts, stops)]


def impute_short_gap(series: LoadSeries, run: MissingRun) -> np.ndarray:
    """Values for ``run`` on the straight line between its flanking readings.

    Raises:
        NoFlankError: the run touches the series boundary, or a flanking
            entry is itself missing (the caller should fall through to the
            history rule).
    """
    lo, hi = run.start_index - 1, run.stop_index
    if lo < 0 or hi >= len(series):
        raise NoFlankError(f"run at {run.start_index} touches the series boundary")
    left, right = series.values[lo], series.values[hi]
    if np.isnan(left) or np.isnan(right):
        raise NoFlankError(f"run at {run.start_index} has a missing flank")
    # interior points of linspace over the closed flank-to-flank span
    return np.linspace(left, right, run.length + 2)[1:-1]


def history_fill_value(values: np.ndarray, index: int) -> float:
    """Mean of the same-slot readings one day and one week earlier.

    Uses whichever of the two references is present; with both present this
    is their plain mean.

    Raises:
        NoHistoryError: neither reference exists (out of range or missing).
    """
    refs = []
    for back in (SLOTS_PER_DAY, WEEK_SLOTS):
        j = index - back
        if j >= 0 and not np.isnan(values[j]):
            refs.append(values[j])
    if not refs:
        raise NoHistoryError(f"no day-1 or week-1 reference for index {index}")
    return float(sum(refs) / len(refs))


def impute_long_gap(series: LoadSeries, run: MissingRun) -> np.ndarray:
    """Fill ``run`` entry-by-entry from day-1/week-1 references.

    Entries are processed in chronological order against a working copy of
    the series, so a fill early in a long run can serve as the day-1
    reference for an entry 48 slots later in the same run. Entries with no
    available reference stay NaN.
    """
    values = series.values.copy()
    out = np.full(run.length, np.nan)
    for k, i in enumerate(range(run.start_index, run.stop_index)):
        try:
            filled = history_fill_value(values, i)
        except NoHistoryError:
            continue
        values[i] = filled
        out[k] = filled
    return out


def _impute_pass(work: LoadSeries, short_gap_threshold: int) -> tuple[int, int]:
    """One sweep over the current runs, filling ``work.values`` in place.

    Returns (filled_linear, filled_history) counts for the sweep.
    """
    values = work.values
    filled_linear = filled_history = 0
    for run in missingness_runs(work):
        fills = None
        if run.length <= short_gap_threshold:
            try:
                fills = impute_short_gap(work, run)
                filled_linear += run.length
            except NoFlankError:
                fills = None
        if fills is None:
            fills = impute_long_gap(work, run)
            filled_history += int(np.count_nonzero(~np.isnan(fills)))
        sl = slice(run.start_index, run.stop_index)
        values[sl] = np.where(np.isnan(fills), values[sl], fills)
    return filled_linear, filled_history


def impute(
    series: LoadSeries, short_gap_threshold: int = DEFAULT_SHORT_GAP_THRESHOLD
) -> tuple[LoadSeries, ImputationReport]:
    """Repair every fillable gap in ``series``.

    Passes repeat until a fixpoint: a history fill in one pass can turn a
    previously unfillable entry into one with a valid reference (or give a
    short remnant run fresh flanks), so sweeping once would leave values
    the policy can in fact determine. Present input values are never
    touched.
    """
    work = series.with_values(series.values)
    missing_before = int(np.isnan(work.values).sum())
    filled_linear = filled_history = 0
    while True:
        lin, hist = _impute_pass(work, short_gap_threshold)
        filled_linear += lin
        filled_history += hist
        if lin == 0 and hist == 0:
            break
    report = ImputationReport(
        total_entries=len(work),
        missing_before=missing_before,
        filled_linear=filled_linear,
        filled_history=filled_history,
        unfilled=int(np.isnan(work.values).sum()),
    )
    return work, report
