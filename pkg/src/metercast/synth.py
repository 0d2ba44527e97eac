"""Synthetic half-hourly consumption generator for tests and demos.

The generated building has an office-like profile: a sigmoidal morning
ramp and evening decay on working days, strongly reduced weekend and
holiday load, an annual seasonal swing, and multiplicative noise. Gaps
are punched as missing runs with a mix of short and long lengths, which
exercises both imputation tiers.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .ingest import SLOTS_PER_DAY, HolidayCalendar, HolidayEntry, LoadSeries

#: Fixed (month, day) public holidays observed every synthetic year.
HOLIDAY_DATES = (
    (1, 1, "New Year"),
    (4, 18, "Spring Holiday"),
    (5, 1, "May Day"),
    (5, 26, "Late May Holiday"),
    (8, 25, "Summer Holiday"),
    (12, 25, "Christmas"),
    (12, 26, "Boxing Day"),
    (12, 31, "New Year's Eve"),
)


@dataclass(frozen=True)
class SynthConfig:
    """Shape and corruption knobs of a synthetic series."""

    start_date: dt.date = dt.date(2011, 1, 1)
    n_days: int = 365
    seed: int = 0
    gap_fraction: float = 0.05
    short_gap_share: float = 0.7
    noise_scale: float = 0.05
    base_load: float = 0.45
    peak_load: float = 1.8
    weekend_factor: float = 0.27
    holiday_factor: float = 0.35
    seasonal_swing: float = 0.22
    amplitude: float = 8.5

    def __post_init__(self):
        if self.n_days < 1:
            raise ValueError("n_days must be at least 1")
        if not 0.0 <= self.gap_fraction < 1.0:
            raise ValueError("gap_fraction must lie in [0, 1)")


def synthetic_calendar(first_year: int, last_year: int) -> HolidayCalendar:
    """Holiday calendar with the fixed synthetic holidays of each year."""
    entries = {}
    for year in range(first_year, last_year + 1):
        for month, day, name in HOLIDAY_DATES:
            date = dt.date(year, month, day)
            entries[date] = HolidayEntry(date, True, name)
    return HolidayCalendar(entries)


def _clean_profile(config: SynthConfig, calendar: HolidayCalendar) -> np.ndarray:
    n = config.n_days * SLOTS_PER_DAY
    idx = np.arange(n)
    slot_h = (idx % SLOTS_PER_DAY) / 2.0  # hour of day

    rise = 1.0 / (1.0 + np.exp(-(slot_h - 8.0) * 1.8))
    fall = 1.0 / (1.0 + np.exp((slot_h - 17.5) * 1.6))
    occupied = rise * fall

    day_idx = idx // SLOTS_PER_DAY
    dates = [config.start_date + dt.timedelta(days=int(d)) for d in range(config.n_days)]
    dow = np.asarray([d.weekday() for d in dates])
    holiday = np.asarray([calendar.is_holiday(d) for d in dates])
    day_factor = np.ones(config.n_days)
    day_factor[dow >= 5] = config.weekend_factor
    day_factor[holiday] = config.holiday_factor

    doy = np.asarray([d.timetuple().tm_yday for d in dates], dtype=np.float64)
    seasonal = 1.0 + config.seasonal_swing * np.cos(2.0 * np.pi * (doy - 15.0) / 365.25)

    shape = config.base_load + (config.peak_load - config.base_load) * occupied * day_factor[day_idx]
    return config.amplitude / 1.4 * shape * seasonal[day_idx]


def _punch_gaps(values: np.ndarray, config: SynthConfig, rng: np.random.Generator) -> None:
    n = values.shape[0]
    budget = int(round(config.gap_fraction * n))
    punched = 0
    guard = 0
    while punched < budget and guard < 100 * budget + 100:
        guard += 1
        if rng.random() < config.short_gap_share:
            length = int(rng.integers(1, 5))
        else:
            length = int(rng.integers(5, 41))
        start = int(rng.integers(0, n))
        stop = min(start + length, n)
        fresh = np.count_nonzero(~np.isnan(values[start:stop]))
        values[start:stop] = np.nan
        punched += fresh
    return None


def synthetic_series(config: SynthConfig) -> tuple[LoadSeries, HolidayCalendar]:
    """Generate a gappy half-hourly series and its holiday calendar."""
    last_date = config.start_date + dt.timedelta(days=config.n_days - 1)
    calendar = synthetic_calendar(config.start_date.year, last_date.year)
    clean = _clean_profile(config, calendar)
    rng = np.random.default_rng(config.seed)
    noisy = clean * (1.0 + config.noise_scale * rng.standard_normal(clean.shape[0]))
    noisy += 0.02 * rng.standard_normal(clean.shape[0])
    np.clip(noisy, 0.0, None, out=noisy)
    _punch_gaps(noisy, config, rng)
    return LoadSeries(first_date=config.start_date, values=noisy), calendar
