"""Generate a synthetic meter CSV and holiday calendar for pipeline runs.

The output matches the wide ingest format: one row per day, 48 half-hour
columns, blank cells where the meter dropped readings.
"""

import argparse
import datetime as dt
from pathlib import Path

from metercast.ingest import write_holiday_csv, write_wide_csv
from metercast.synth import SynthConfig, synthetic_series


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default=".", help="where to write the CSVs")
    parser.add_argument("--start", default="2011-01-01", help="first day (ISO)")
    parser.add_argument("--days", type=int, default=365 * 3)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--gap-fraction", type=float, default=0.05)
    args = parser.parse_args()

    config = SynthConfig(
        start_date=dt.date.fromisoformat(args.start),
        n_days=args.days,
        seed=args.seed,
        gap_fraction=args.gap_fraction,
    )
    series, calendar = synthetic_series(config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_wide_csv(out / "meter.csv", series)
    write_holiday_csv(out / "holidays.csv", calendar)
    print(f"wrote {out / 'meter.csv'} ({args.days} days, seed {args.seed})")
    print(f"wrote {out / 'holidays.csv'} ({len(calendar.entries)} entries)")


if __name__ == "__main__":
    main()
