"""Wide-CSV parsing, densification, and holiday calendar tests."""

import csv
import datetime as dt

import numpy as np
import pytest

from metercast.errors import (
    DuplicateDateError,
    MalformedHeaderError,
    MalformedRowError,
    TotalMismatchWarning,
    UnitMismatchWarning,
    UnparseableDateError,
    UnparseableValueError,
)
from metercast.ingest import (
    SLOTS_PER_DAY,
    HolidayCalendar,
    HolidayEntry,
    LoadSeries,
    WideDayRecord,
    parse_holiday_calendar,
    parse_wide_csv,
    read_long_csv,
    to_long_series,
    wide_header,
    write_long_csv,
)


def write_wide(path, rows, header=None):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header if header is not None else wide_header())
        writer.writerows(rows)


def day_row(date_str, values, unit="kWh", total=None, site="Office A"):
    cells = [site, "Electricity", unit] + list(values)
    if total is None:
        present = []
        for v in values:
            try:
                present.append(float(v))
            except (TypeError, ValueError):
                pass
        total = sum(present)
    cells.append(total)
    cells.append(date_str)
    return cells


class TestParseWideCsv:
    def test_roundtrip_single_day(self, tmp_path):
        p = tmp_path / "meter.csv"
        vals = [round(0.5 + 0.01 * s, 3) for s in range(SLOTS_PER_DAY)]
        write_wide(p, [day_row("2012-03-05", vals)])
        records = parse_wide_csv(p)
        assert len(records) == 1
        rec = records[0]
        assert rec.site_name == "Office A"
        assert rec.date == dt.date(2012, 3, 5)
        assert rec.slots == pytest.approx(vals)
        assert rec.total == pytest.approx(sum(vals))

    def test_missing_cells_blank_and_na(self, tmp_path):
        p = tmp_path / "meter.csv"
        vals = [1.0] * SLOTS_PER_DAY
        vals[0] = ""
        vals[5] = "NA"
        vals[6] = "na"
        write_wide(p, [day_row("2012-03-05", vals, total=45.0)])
        rec = parse_wide_csv(p)[0]
        assert rec.slots[0] is None
        assert rec.slots[5] is None
        assert rec.slots[6] is None
        assert rec.slots[1] == 1.0

    def test_uk_date_format(self, tmp_path):
        p = tmp_path / "meter.csv"
        write_wide(p, [day_row("05/03/2012", [1.0] * SLOTS_PER_DAY)])
        assert parse_wide_csv(p)[0].date == dt.date(2012, 3, 5)

    def test_bad_date_reports_row(self, tmp_path):
        p = tmp_path / "meter.csv"
        write_wide(
            p,
            [
                day_row("2012-03-05", [1.0] * SLOTS_PER_DAY),
                day_row("not-a-date", [1.0] * SLOTS_PER_DAY),
            ],
        )
        with pytest.raises(UnparseableDateError) as exc:
            parse_wide_csv(p)
        assert exc.value.row == 3

    def test_bad_value_reports_row_and_token(self, tmp_path):
        p = tmp_path / "meter.csv"
        vals = [1.0] * SLOTS_PER_DAY
        vals[10] = "oops"
        write_wide(p, [day_row("2012-03-05", vals, total=47.0)])
        with pytest.raises(UnparseableValueError) as exc:
            parse_wide_csv(p)
        assert exc.value.row == 2
        assert exc.value.token == "oops"

    def test_wrong_column_count_header(self, tmp_path):
        p = tmp_path / "meter.csv"
        write_wide(p, [], header=["Site Name", "Utility", "Date"])
        with pytest.raises(MalformedHeaderError):
            parse_wide_csv(p)

    def test_misnamed_header_cell(self, tmp_path):
        p = tmp_path / "meter.csv"
        header = wide_header()
        header[0] = "Meter ID"
        write_wide(p, [], header=header)
        with pytest.raises(MalformedHeaderError):
            parse_wide_csv(p)

    def test_short_row_raises(self, tmp_path):
        p = tmp_path / "meter.csv"
        write_wide(p, [["Office A", "Electricity", "kWh", "2012-03-05"]])
        with pytest.raises(MalformedRowError):
            parse_wide_csv(p)

    def test_unit_mismatch_warns_but_keeps_values(self, tmp_path):
        p = tmp_path / "meter.csv"
        write_wide(p, [day_row("2012-03-05", [2.0] * SLOTS_PER_DAY, unit="MWh")])
        with pytest.warns(UnitMismatchWarning):
            rec = parse_wide_csv(p)[0]
        assert rec.slots[0] == 2.0

    def test_total_mismatch_warns(self, tmp_path):
        p = tmp_path / "meter.csv"
        write_wide(p, [day_row("2012-03-05", [1.0] * SLOTS_PER_DAY, total=1.0)])
        with pytest.warns(TotalMismatchWarning):
            parse_wide_csv(p)

    def test_total_within_half_kwh_is_quiet(self, tmp_path, recwarn):
        p = tmp_path / "meter.csv"
        write_wide(p, [day_row("2012-03-05", [1.0] * SLOTS_PER_DAY, total=48.4)])
        parse_wide_csv(p)
        assert not [w for w in recwarn if issubclass(w.category, TotalMismatchWarning)]


class TestToLongSeries:
    def mk(self, date, fill=1.0):
        return WideDayRecord(
            "Office A", "Electricity", "kWh", date, [fill] * SLOTS_PER_DAY
        )

    def test_dense_and_ordered(self):
        records = [
            self.mk(dt.date(2012, 3, 6), fill=2.0),
            self.mk(dt.date(2012, 3, 5), fill=1.0),
        ]
        series = to_long_series(records)
        assert series.first_date == dt.date(2012, 3, 5)
        assert len(series) == 2 * SLOTS_PER_DAY
        assert series.values[0] == 1.0
        assert series.values[SLOTS_PER_DAY] == 2.0

    def test_absent_day_becomes_48_missing(self):
        records = [self.mk(dt.date(2012, 3, 5)), self.mk(dt.date(2012, 3, 7))]
        series = to_long_series(records)
        assert len(series) == 3 * SLOTS_PER_DAY
        middle = series.values[SLOTS_PER_DAY : 2 * SLOTS_PER_DAY]
        assert np.isnan(middle).all()
        assert series.missing_mask.sum() == SLOTS_PER_DAY

    def test_none_slots_become_nan(self):
        rec = self.mk(dt.date(2012, 3, 5))
        rec.slots[7] = None
        series = to_long_series([rec])
        assert np.isnan(series.values[7])

    def test_duplicate_date_raises(self):
        records = [self.mk(dt.date(2012, 3, 5)), self.mk(dt.date(2012, 3, 5))]
        with pytest.raises(DuplicateDateError):
            to_long_series(records)

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            to_long_series([])


class TestLoadSeries:
    def test_timestamp_and_try_index_inverse(self):
        series = LoadSeries(dt.date(2012, 3, 5), np.arange(100.0), first_slot=40)
        for i in (0, 7, 8, 55, 99):
            date, slot = series.timestamp(i)
            assert series.try_index(date, slot) == i
        assert series.timestamp(0) == (dt.date(2012, 3, 5), 40)
        assert series.timestamp(8) == (dt.date(2012, 3, 6), 0)

    def test_try_index_out_of_range(self):
        series = LoadSeries(dt.date(2012, 3, 5), np.arange(48.0))
        assert series.try_index(dt.date(2012, 3, 4), 47) is None
        assert series.try_index(dt.date(2012, 3, 6), 0) is None

    def test_with_values_copies(self):
        series = LoadSeries(dt.date(2012, 3, 5), np.arange(48.0))
        fresh = np.zeros(48)
        out = series.with_values(fresh)
        fresh[0] = 99.0
        assert out.values[0] == 0.0
        assert out.first_date == series.first_date


class TestHolidayCalendar:
    def test_parse_and_lookup(self, tmp_path):
        p = tmp_path / "holidays.csv"
        p.write_text(
            "date,is_holiday,name\n"
            "2012-12-25,true,Christmas Day\n"
            "2012-12-26,1,Boxing Day\n"
            "2012-12-27,false,\n"
        )
        cal = parse_holiday_calendar(p)
        assert cal.is_holiday(dt.date(2012, 12, 25))
        assert cal.is_holiday(dt.date(2012, 12, 26))
        assert not cal.is_holiday(dt.date(2012, 12, 27))
        assert not cal.is_holiday(dt.date(2012, 7, 1))
        assert cal.name(dt.date(2012, 12, 25)) == "Christmas Day"

    def test_bad_flag_raises(self, tmp_path):
        p = tmp_path / "holidays.csv"
        p.write_text("date,is_holiday,name\n2012-12-25,maybe,X\n")
        with pytest.raises(UnparseableValueError):
            parse_holiday_calendar(p)

    def test_bad_header_raises(self, tmp_path):
        p = tmp_path / "holidays.csv"
        p.write_text("day,holiday,label\n")
        with pytest.raises(MalformedHeaderError):
            parse_holiday_calendar(p)

    def test_default_calendar_is_empty(self):
        cal = HolidayCalendar()
        assert not cal.is_holiday(dt.date(2012, 1, 2))

    def test_entries_are_frozen(self):
        entry = HolidayEntry(dt.date(2012, 12, 25), True, "Christmas Day")
        with pytest.raises(AttributeError):
            entry.is_holiday = False


class TestLongCsvRoundtrip:
    def test_roundtrip_preserves_values_and_gaps(self, tmp_path):
        values = np.arange(96.0)
        values[13] = np.nan
        series = LoadSeries(dt.date(2012, 3, 5), values)
        p = tmp_path / "long.csv"
        write_long_csv(p, series)
        back = read_long_csv(p)
        assert back.first_date == series.first_date
        assert back.first_slot == series.first_slot
        np.testing.assert_array_equal(back.values, series.values)
