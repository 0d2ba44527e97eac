"""Parsing of wide-format meter CSVs and holiday calendars.

The meter file carries one row per day: site metadata, 48 half-hour
consumption cells, a daily total, and the date. ``to_long_series``
transposes those day rows into a single dense, period-indexed series in
which every half hour between the first and last date is explicitly
present or explicitly missing.
"""

from __future__ import annotations

import csv
import datetime as dt
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DuplicateDateError,
    MalformedHeaderError,
    MalformedRowError,
    TotalMismatchWarning,
    UnitMismatchWarning,
    UnparseableDateError,
    UnparseableValueError,
)

SLOTS_PER_DAY = 48
WEEK_SLOTS = 7 * SLOTS_PER_DAY

#: Column layout of the wide meter CSV: three metadata columns, one column
#: per half-hour slot, the daily total, and the date.
WIDE_COLUMNS = 3 + SLOTS_PER_DAY + 2

#: Allowed aliases for the named (non-slot) header cells, compared after
#: lowercasing and stripping spaces/underscores.
_HEADER_ALIASES = {
    0: {"sitename", "site"},
    1: {"utility"},
    2: {"unit"},
    WIDE_COLUMNS - 2: {"total"},
    WIDE_COLUMNS - 1: {"date"},
}

#: Tokens (lowercased) treated as a missing consumption cell.
_MISSING_TOKENS = {"", "na"}

#: Tolerance for the daily-total sanity check, in kWh.
_TOTAL_TOLERANCE = 0.5


def slot_label(slot: int) -> str:
    """Header label for a half-hour slot, e.g. slot 3 -> ``01:30``."""
    return f"{slot // 2:02d}:{(slot % 2) * 30:02d}"


def wide_header() -> list[str]:
    """The canonical header row for a wide meter CSV."""
    return (
        ["Site Name", "Utility", "Unit"]
        + [slot_label(s) for s in range(SLOTS_PER_DAY)]
        + ["Total", "Date"]
    )


@dataclass
class WideDayRecord:
    """One day of metered consumption in the wide (one-row-per-day) layout."""

    site_name: str
    utility: str
    unit: str
    date: dt.date
    slots: list[float | None]
    total: float | None = None

    def __post_init__(self):
        if len(self.slots) != SLOTS_PER_DAY:
            raise ValueError(
                f"expected {SLOTS_PER_DAY} slots, got {len(self.slots)}"
            )


@dataclass
class LoadSeries:
    """Dense half-hourly consumption series.

    ``values[i]`` is the consumption (kWh) for the half hour starting
    ``first_slot + i`` slots after midnight of ``first_date``; missing
    readings are NaN. Density is structural: there is exactly one entry
    per half hour, so gaps are NaN entries rather than absent rows.
    """

    first_date: dt.date
    values: np.ndarray
    first_slot: int = 0
    slot_minutes: int = 30

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if not 0 <= self.first_slot < SLOTS_PER_DAY:
            raise ValueError("first_slot must be in 0..47")

    def __len__(self) -> int:
        return self.values.shape[0]

    def timestamp(self, i: int) -> tuple[dt.date, int]:
        """(date, slot-of-day) of entry ``i``."""
        total = self.first_slot + i
        return (
            self.first_date + dt.timedelta(days=total // SLOTS_PER_DAY),
            total % SLOTS_PER_DAY,
        )

    def try_index(self, date: dt.date, slot: int) -> int | None:
        """Index of (date, slot), or None when it falls outside the series."""
        i = (date - self.first_date).days * SLOTS_PER_DAY + slot - self.first_slot
        return i if 0 <= i < len(self) else None

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)

    def with_values(self, values: np.ndarray) -> "LoadSeries":
        """Copy of this series with a replaced value array."""
        return replace(self, values=np.asarray(values, dtype=np.float64).copy())


@dataclass(frozen=True)
class HolidayEntry:
    date: dt.date
    is_holiday: bool
    name: str


@dataclass
class HolidayCalendar:
    """Date-keyed holiday lookup; dates absent from the calendar are non-holidays."""

    entries: dict[dt.date, HolidayEntry] = field(default_factory=dict)

    def is_holiday(self, date: dt.date) -> bool:
        entry = self.entries.get(date)
        return entry.is_holiday if entry is not None else False

    def name(self, date: dt.date) -> str:
        entry = self.entries.get(date)
        return entry.name if entry is not None else ""


def parse_date(token: str, row: int) -> dt.date:
    """Parse an ISO (YYYY-MM-DD) or UK (DD/MM/YYYY) date cell."""
    token = token.strip()
    for fmt in ("%Y-%m-%d", "%d/%m/%Y"):
        try:
            return dt.datetime.strptime(token, fmt).date()
        except ValueError:
            continue
    raise UnparseableDateError(row, token)


def _parse_optional_float(token: str, row: int) -> float | None:
    token = token.strip()
    if token.lower() in _MISSING_TOKENS:
        return None
    try:
        return float(token)
    except ValueError:
        raise UnparseableValueError(row, token) from None


def _norm_header_cell(cell: str) -> str:
    return cell.strip().lower().replace(" ", "").replace("_", "")


def _check_wide_header(header: list[str]) -> None:
    if len(header) != WIDE_COLUMNS:
        raise MalformedHeaderError(
            f"expected {WIDE_COLUMNS} columns, got {len(header)}"
        )
    for pos, allowed in _HEADER_ALIASES.items():
        if _norm_header_cell(header[pos]) not in allowed:
            raise MalformedHeaderError(
                f"column {pos} should be one of {sorted(allowed)}, "
                f"got {header[pos]!r}"
            )


def parse_wide_csv(path) -> list[WideDayRecord]:
    """Parse a wide meter CSV into one record per day row.

    Blank or ``NA`` consumption cells become missing values. A unit cell
    other than kWh raises a :class:`UnitMismatchWarning` (values are kept),
    and a daily total that disagrees with the sum of the present slots by
    more than 0.5 kWh raises a :class:`TotalMismatchWarning`.

    Raises:
        MalformedHeaderError: wrong column count or header names.
        MalformedRowError: a data row with the wrong column count.
        UnparseableDateError / UnparseableValueError: bad cells, reported
            with their 1-based row number.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedHeaderError("empty file") from None
        _check_wide_header(header)

        records = []
        for row_no, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != WIDE_COLUMNS:
                raise MalformedRowError(
                    row_no, f"expected {WIDE_COLUMNS} cells, got {len(cells)}"
                )
            unit = cells[2].strip()
            if unit and unit.lower() != "kwh":
                warnings.warn(
                    f"row {row_no}: unit {unit!r} is not kWh; values kept as-is",
                    UnitMismatchWarning,
                    stacklevel=2,
                )
            slots = [
                _parse_optional_float(cells[3 + s], row_no)
                for s in range(SLOTS_PER_DAY)
            ]
            total = _parse_optional_float(cells[WIDE_COLUMNS - 2], row_no)
            date = parse_date(cells[WIDE_COLUMNS - 1], row_no)
            present_sum = sum(v for v in slots if v is not None)
            if total is not None and abs(total - present_sum) > _TOTAL_TOLERANCE:
                warnings.warn(
                    f"row {row_no} ({date}): total {total} differs from slot "
                    f"sum {present_sum:.3f} by more than {_TOTAL_TOLERANCE} kWh",
                    TotalMismatchWarning,
                    stacklevel=2,
                )
            records.append(
                WideDayRecord(
                    site_name=cells[0].strip(),
                    utility=cells[1].strip(),
                    unit=unit,
                    date=date,
                    slots=slots,
                    total=total,
                )
            )
    return records


def to_long_series(records: list[WideDayRecord]) -> LoadSeries:
    """Transpose day records into one dense half-hourly series.

    Dates between the earliest and latest record that have no row of their
    own appear as 48 missing entries, so downstream gap logic always sees
    an unbroken period index.

    Raises:
        DuplicateDateError: two records share a date.
        ValueError: ``records`` is empty.
    """
    if not records:
        raise ValueError("records must be non-empty")
    by_date: dict[dt.date, WideDayRecord] = {}
    for rec in records:
        if rec.date in by_date:
            raise DuplicateDateError(f"duplicate date {rec.date}")
        by_date[rec.date] = rec

    first = min(by_date)
    n_days = (max(by_date) - first).days + 1
    values = np.full(n_days * SLOTS_PER_DAY, np.nan)
    for date, rec in by_date.items():
        base = (date - first).days * SLOTS_PER_DAY
        for s, v in enumerate(rec.slots):
            if v is not None:
                values[base + s] = v
    return LoadSeries(first_date=first, values=values)


def parse_holiday_calendar(path) -> HolidayCalendar:
    """Parse a ``date,is_holiday,name`` CSV into a holiday calendar.

    The boolean column accepts true/false/1/0 case-insensitively.
    """
    truthy = {"true", "1"}
    falsy = {"false", "0"}
    entries: dict[dt.date, HolidayEntry] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedHeaderError("empty file") from None
        normed = [_norm_header_cell(c) for c in header]
        if normed[:3] != ["date", "isholiday", "name"]:
            raise MalformedHeaderError(
                f"expected header date,is_holiday,name, got {header!r}"
            )
        for row_no, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) < 3:
                raise MalformedRowError(row_no, "expected 3 cells")
            date = parse_date(cells[0], row_no)
            flag_token = cells[1].strip().lower()
            if flag_token in truthy:
                flag = True
            elif flag_token in falsy:
                flag = False
            else:
                raise UnparseableValueError(row_no, cells[1])
            if date in entries:
                raise DuplicateDateError(f"row {row_no}: duplicate date {date}")
            entries[date] = HolidayEntry(date, flag, cells[2].strip())
    return HolidayCalendar(entries)


def write_wide_csv(path, series: LoadSeries, site_name: str = "synthetic",
                   utility: str = "Electricity", unit: str = "kWh") -> None:
    """Write a series as a wide meter CSV (inverse of parse_wide_csv).

    The series must start at slot 0 and span whole days. Missing cells are
    written blank; the daily total sums the present cells.
    """
    if series.first_slot != 0 or len(series) % SLOTS_PER_DAY != 0:
        raise ValueError("series must cover whole days starting at slot 0")
    grid = series.values.reshape(-1, SLOTS_PER_DAY)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(wide_header())
        for d in range(grid.shape[0]):
            day = grid[d]
            date = series.first_date + dt.timedelta(days=d)
            cells = ["" if np.isnan(v) else repr(float(v)) for v in day]
            total = float(np.nansum(day)) if not np.all(np.isnan(day)) else ""
            writer.writerow(
                [site_name, utility, unit, *cells,
                 total if total == "" else repr(total), date.isoformat()]
            )


def write_holiday_csv(path, calendar: HolidayCalendar) -> None:
    """Write a calendar as a ``date,is_holiday,name`` CSV, sorted by date."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "is_holiday", "name"])
        for date in sorted(calendar.entries):
            entry = calendar.entries[date]
            writer.writerow(
                [date.isoformat(), "true" if entry.is_holiday else "false", entry.name]
            )


def write_long_csv(path, series: LoadSeries) -> None:
    """Write a series as a ``date,slot,value`` CSV (blank cell = missing)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "slot", "value"])
        for i, v in enumerate(series.values):
            date, slot = series.timestamp(i)
            writer.writerow([date.isoformat(), slot, "" if np.isnan(v) else repr(float(v))])


def read_long_csv(path) -> LoadSeries:
    """Read a ``date,slot,value`` CSV back into a series (inverse of write_long_csv)."""
    dates: list[dt.date] = []
    slots: list[int] = []
    vals: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [_norm_header_cell(c) for c in header[:3]] != ["date", "slot", "value"]:
            raise MalformedHeaderError(f"expected header date,slot,value, got {header!r}")
        for row_no, cells in enumerate(reader, start=2):
            if not cells:
                continue
            dates.append(parse_date(cells[0], row_no))
            slots.append(int(cells[1]))
            v = _parse_optional_float(cells[2], row_no)
            vals.append(np.nan if v is None else v)
    if not dates:
        raise ValueError("empty series file")
    series = LoadSeries(
        first_date=dates[0], values=np.asarray(vals), first_slot=slots[0]
    )
    for i, (d, s) in enumerate(zip(dates, slots)):
        if series.timestamp(i) != (d, s):
            raise MalformedRowError(i + 2, "timestamps are not dense/ordered")
    return series
