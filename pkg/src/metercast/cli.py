"""Command-line front end.

Subcommands chain through files in the output directory: ingest writes a
long-form series, impute repairs it, featurize turns it into a matrix,
tune/train produce JSON artifacts, predict/evaluate/report consume them.
Every JSON artifact embeds the effective config hash and the seed, and
repeated runs with the same inputs and seed are byte-identical.

Exit codes: 0 success, 1 data errors, 2 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import sys
from pathlib import Path

import numpy as np

from . import impute as impute_mod
from . import ingest, metrics, tuning
from .config import PipelineConfig, config_hash, load_config
from .errors import EmptyWindowError, InconsistentFixtureError, MeterCastError
from .featurize import (
    FeatureMatrix,
    build_matrix,
    invert_transform,
    read_matrix_csv,
)
from .persist import ModelBundle, forecast_series, load_bundle, save_bundle
from .stacking import fit_stack
from .trees import HyperParams, fit_forest, fit_gbdt

SERIES_NAME = "series_long.csv"
IMPUTED_NAME = "imputed_long.csv"
FEATURES_NAME = "features.csv"
TUNING_NAME = "tuning_result.json"
BUNDLE_NAME = "model_bundle.json"
PREDICTIONS_NAME = "predictions.csv"
METRICS_NAME = "metrics_report.json"
PLOT_NAME = "plot_data.csv"
WEEK_DAYS = 7


class UsageError(Exception):
    """Bad or missing flags; reported on stderr with exit status 2."""


def _write_json(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _provenance(config: PipelineConfig, seed) -> dict:
    return {"config_hash": config_hash(config), "seed": seed}


def _out_dir(args, config: PipelineConfig) -> Path:
    out = Path(args.out if args.out is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require_seed(args, config: PipelineConfig) -> int:
    seed = args.seed if args.seed is not None else config.seed
    if seed is None:
        raise UsageError("--seed is required (randomized command, no seed in config)")
    return int(seed)


def _load_calendar(args, config: PipelineConfig) -> ingest.HolidayCalendar:
    path = getattr(args, "holidays", None) or config.holiday_csv
    if path is None:
        return ingest.HolidayCalendar()
    return ingest.parse_holiday_calendar(path)


def _train_side(matrix: FeatureMatrix, split_year) -> FeatureMatrix:
    if split_year is None:
        return matrix
    train, _ = tuning.temporal_split(matrix, int(split_year))
    return train


def _read_point_csv(path) -> dict[tuple[str, int], float]:
    """Read any pipeline CSV into a (date, slot) -> value mapping.

    Accepts long series CSVs (``value`` column), prediction CSVs
    (``predicted_kwh``/``predicted``) and feature matrices (``target``
    plus a trailing timestamp). The first matching column wins, so a
    file compared against itself always yields identical values.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        points: dict[tuple[str, int], float] = {}
        if len(header) >= 2 and header[-2:] == ["target", "timestamp"]:
            value_col = len(header) - 2
            for cells in reader:
                if not cells:
                    continue
                stamp = cells[-1]
                slot = int(stamp[11:13]) * 2 + int(stamp[14:16]) // 30
                points[(stamp[:10], slot)] = float(cells[value_col])
            return points
        for name in ("value", "predicted_kwh", "predicted"):
            if name in header:
                value_col = header.index(name)
                break
        else:
            raise ValueError(f"{path}: no value-bearing column found in header {header}")
        date_col = header.index("date")
        slot_col = header.index("slot")
        for cells in reader:
            if not cells:
                continue
            text = cells[value_col]
            if text == "":
                continue
            points[(cells[date_col], int(cells[slot_col]))] = float(text)
    return points


def _aligned(pred_points, actual_points):
    keys = sorted(set(pred_points) & set(actual_points))
    pred = np.asarray([pred_points[k] for k in keys])
    actual = np.asarray([actual_points[k] for k in keys])
    return keys, pred, actual


def emit_plot_data(path, predictions, actuals, start: dt.date, days: int = WEEK_DAYS,
                   scale: float = 1.0) -> int:
    """Write the plot-ready CSV for a window of aligned half hours.

    ``predictions`` and ``actuals`` map (iso date, slot) to values on the
    original consumption scale; rows cover keys present in both, with
    ``period_index`` counting half hours from the window start. Returns
    the number of rows written.

    Raises:
        EmptyWindowError: no aligned point falls inside the window.
    """
    end = start + dt.timedelta(days=days)
    keys = sorted(set(predictions) & set(actuals))
    rows = []
    for date_text, slot in keys:
        date = dt.date.fromisoformat(date_text)
        if not start <= date < end:
            continue
        index = (date - start).days * ingest.SLOTS_PER_DAY + slot
        rows.append((index, actuals[(date_text, slot)] * scale,
                     predictions[(date_text, slot)] * scale))
    if not rows:
        raise EmptyWindowError(
            f"no aligned data in [{start.isoformat()}, {end.isoformat()})"
        )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["period_index", "actual_scaled", "predicted_scaled"])
        for index, actual, pred in rows:
            writer.writerow([index, repr(float(actual)), repr(float(pred))])
    return len(rows)


def _cmd_ingest(args, config: PipelineConfig) -> int:
    meter = args.meter or config.meter_csv
    if meter is None:
        raise UsageError("--meter is required (no meter_csv in config)")
    out = _out_dir(args, config)
    records = ingest.parse_wide_csv(meter)
    series = ingest.to_long_series(records)
    ingest.write_long_csv(out / SERIES_NAME, series)
    missing = int(np.isnan(series.values).sum())
    _write_json(out / "ingest_report.json", {
        **_provenance(config, config.seed),
        "source": str(meter),
        "days": len(series) // ingest.SLOTS_PER_DAY,
        "entries": len(series),
        "missing_entries": missing,
        "missing_fraction": missing / len(series) if len(series) else 0.0,
        "first_date": series.first_date.isoformat(),
    })
    return 0


def _cmd_impute(args, config: PipelineConfig) -> int:
    out = _out_dir(args, config)
    source = args.series or out / SERIES_NAME
    series = ingest.read_long_csv(source)
    repaired, report = impute_mod.impute(series, args.short_gap_threshold)
    ingest.write_long_csv(out / IMPUTED_NAME, repaired)
    _write_json(out / "impute_report.json", {
        **_provenance(config, config.seed),
        "source": str(source),
        "total_entries": report.total_entries,
        "missing_before": report.missing_before,
        "missing_fraction_before": report.missing_fraction_before,
        "filled_linear": report.filled_linear,
        "filled_history": report.filled_history,
        "unfilled": report.unfilled,
        "short_gap_threshold": args.short_gap_threshold,
    })
    return 0


def _cmd_featurize(args, config: PipelineConfig) -> int:
    out = _out_dir(args, config)
    source = args.series or out / IMPUTED_NAME
    series = ingest.read_long_csv(source)
    calendar = _load_calendar(args, config)
    matrix = build_matrix(series, calendar, config.features)
    matrix.to_csv(out / FEATURES_NAME)
    _write_json(out / "featurize_report.json", {
        **_provenance(config, config.seed),
        "source": str(source),
        "rows": matrix.n,
        "columns": matrix.column_names,
        "feature_spec": config.features.to_dict(),
        "first_timestamp": matrix.dates[0].isoformat(),
        "last_timestamp": matrix.dates[-1].isoformat(),
    })
    return 0


def _cmd_tune(args, config: PipelineConfig) -> int:
    out = _out_dir(args, config)
    seed = _require_seed(args, config)
    source = args.features or out / FEATURES_NAME
    matrix = _train_side(read_matrix_csv(source), config.split_year)
    result = tuning.random_search(
        matrix,
        space=config.space,
        m=int(config.tune_m),
        resampling=config.resampling,
        metric=config.selection_metric,
        seed=seed,
    )
    _write_json(out / TUNING_NAME, {**_provenance(config, seed), **result.to_dict()})
    return 0


def _cmd_train(args, config: PipelineConfig) -> int:
    out = _out_dir(args, config)
    seed = _require_seed(args, config)
    source = args.features or out / FEATURES_NAME
    matrix = _train_side(read_matrix_csv(source), config.split_year)
    params = config.train_params
    if args.from_tuning is not None:
        with open(args.from_tuning, encoding="utf-8") as fh:
            params = HyperParams.from_dict(json.load(fh)["best"])
    gbdt = fit_gbdt(matrix, params)
    forest = fit_forest(
        matrix,
        tree_count=config.forest_trees,
        num_leaves=config.forest_num_leaves,
        min_leaf_instances=config.forest_min_leaf,
        seed=seed,
        bootstrap=config.bootstrap,
    )
    stack = fit_stack(gbdt.predict(matrix.X), forest.predict(matrix.X), matrix.y)
    bundle = ModelBundle(
        feature_spec=config.features,
        calendar=_load_calendar(args, config),
        gbdt=gbdt,
        forest=forest,
        stack=stack,
        seed=seed,
        config_hash=config_hash(config),
    )
    save_bundle(out / BUNDLE_NAME, bundle)
    return 0


def _cmd_predict(args, config: PipelineConfig) -> int:
    out = _out_dir(args, config)
    bundle = load_bundle(args.model)
    if args.series is not None:
        matrix, pred = forecast_series(bundle, ingest.read_long_csv(args.series))
    else:
        source = args.features or out / FEATURES_NAME
        matrix = read_matrix_csv(source)
        pred = bundle.predict(matrix.X)
    kwh = invert_transform(pred, bundle.feature_spec)
    with open(out / PREDICTIONS_NAME, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "slot", "predicted", "predicted_kwh"])
        for i in range(matrix.n):
            writer.writerow([
                matrix.dates[i].isoformat(),
                int(matrix.slots[i]),
                repr(float(pred[i])),
                repr(float(kwh[i])),
            ])
    return 0


def _cmd_evaluate(args, config: PipelineConfig) -> int:
    out = _out_dir(args, config)
    keys, pred, actual = _aligned(
        _read_point_csv(args.pred), _read_point_csv(args.actual)
    )
    report = metrics.compute_report(
        actual, pred, normalizer=args.normalizer or config.nrmse_normalizer
    )
    doc = {
        **_provenance(config, config.seed),
        "pred": str(args.pred),
        "actual": str(args.actual),
        "aligned_points": len(keys),
        **report.to_dict(),
    }
    _write_json(out / METRICS_NAME, doc)
    print(json.dumps(doc, sort_keys=True, indent=2))
    return 0


def _cmd_report(args, config: PipelineConfig) -> int:
    out = _out_dir(args, config)
    pred_points = _read_point_csv(args.pred)
    actual_points = _read_point_csv(args.actual)
    shared = sorted(set(pred_points) & set(actual_points))
    if args.start is not None:
        start = dt.date.fromisoformat(args.start)
    elif shared:
        start = dt.date.fromisoformat(shared[0][0])
    else:
        raise EmptyWindowError("prediction and actual series share no timestamps")
    scale = args.scale_factor
    if scale is None:
        scale = config.features.scale_factor
    rows = emit_plot_data(
        out / PLOT_NAME, pred_points, actual_points, start, args.days, float(scale)
    )
    _write_json(out / "report_summary.json", {
        **_provenance(config, config.seed),
        "rows": rows,
        "window_start": start.isoformat(),
        "window_days": args.days,
        "scale_factor": float(scale),
    })
    return 0


def _cmd_validate_fixture(args, config: PipelineConfig) -> int:
    if args.fixture is not None:
        rows = metrics.load_fixture(args.fixture)
    else:
        rows = metrics.load_fixture()
    report = metrics.validate_fixture(rows)
    print(json.dumps(report.to_dict(), sort_keys=True, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metercast",
        description="Half-hourly electricity consumption forecasting pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, text: str) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=text, description=text)
        cmd.add_argument("--config", help="TOML config file")
        cmd.add_argument("--out", help="output directory (default from config)")
        return cmd

    cmd = add("ingest", "Parse a wide meter CSV into a long half-hourly series.")
    cmd.add_argument("--meter", help="wide-format meter CSV")

    cmd = add("impute", "Fill gaps in a long series.")
    cmd.add_argument("--series", help="long series CSV (default: out/series_long.csv)")
    cmd.add_argument("--short-gap-threshold", type=int,
                     default=impute_mod.DEFAULT_SHORT_GAP_THRESHOLD)

    cmd = add("featurize", "Build the feature matrix from an imputed series.")
    cmd.add_argument("--series", help="long series CSV (default: out/imputed_long.csv)")
    cmd.add_argument("--holidays", help="holiday calendar CSV")

    cmd = add("tune", "Random-search hyperparameters with rolling-origin folds.")
    cmd.add_argument("--features", help="feature matrix CSV (default: out/features.csv)")
    cmd.add_argument("--m", type=int, help="number of sampled candidates")
    cmd.add_argument("--seed", type=int, help="RNG seed (required)")
    cmd.add_argument("--metric", choices=("mae", "rmse"))
    cmd.add_argument("--resampling", help="fold count (int) or holdout fraction (float)")
    cmd.add_argument("--split-year", type=int, dest="split_year",
                     help="tune on rows with year <= this")

    cmd = add("train", "Fit the boosted, bagged and stacked models.")
    cmd.add_argument("--features", help="feature matrix CSV (default: out/features.csv)")
    cmd.add_argument("--seed", type=int, help="RNG seed (required)")
    cmd.add_argument("--split-year", type=int, dest="split_year")
    cmd.add_argument("--from-tuning", dest="from_tuning",
                     help="tuning_result.json to take hyperparameters from")
    cmd.add_argument("--holidays", help="holiday calendar CSV to embed in the bundle")

    cmd = add("predict", "Forecast with a saved model bundle.")
    cmd.add_argument("--model", required=True, help="model_bundle.json")
    cmd.add_argument("--series", help="long series CSV to featurize and forecast")
    cmd.add_argument("--features", help="pre-built feature matrix CSV")

    cmd = add("evaluate", "Compute the error metric suite on aligned series.")
    cmd.add_argument("--pred", required=True)
    cmd.add_argument("--actual", required=True)
    cmd.add_argument("--normalizer", choices=metrics.NORMALIZERS)

    cmd = add("report", "Emit plot-ready actual/predicted CSV for a window.")
    cmd.add_argument("--pred", required=True)
    cmd.add_argument("--actual", required=True)
    cmd.add_argument("--start", help="window start date (default: first aligned date)")
    cmd.add_argument("--days", type=int, default=WEEK_DAYS)
    cmd.add_argument("--scale-factor", type=float, dest="scale_factor")

    cmd = add("validate-fixture", "Check a reference table for internal consistency.")
    cmd.add_argument("fixture", nargs="?", help="fixture CSV (default: packaged table)")

    return parser


_HANDLERS = {
    "ingest": _cmd_ingest,
    "impute": _cmd_impute,
    "featurize": _cmd_featurize,
    "tune": _cmd_tune,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "evaluate": _cmd_evaluate,
    "report": _cmd_report,
    "validate-fixture": _cmd_validate_fixture,
}


def _config_overrides(args) -> dict:
    overrides: dict = {}
    if getattr(args, "out", None) is not None:
        overrides["output_dir"] = args.out
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "split_year", None) is not None:
        overrides["split_year"] = args.split_year
    if getattr(args, "metric", None) is not None:
        overrides["selection_metric"] = args.metric
    if getattr(args, "normalizer", None) is not None:
        overrides["nrmse_normalizer"] = args.normalizer
    if getattr(args, "resampling", None) is not None:
        overrides["resampling"] = args.resampling
    if getattr(args, "m", None) is not None:
        overrides["tune_m"] = args.m
    return overrides


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        config = load_config(args.config, _config_overrides(args))
        return _HANDLERS[args.command](args, config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except InconsistentFixtureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.report is not None:
            print(json.dumps(exc.report.to_dict(), sort_keys=True, indent=2),
                  file=sys.stderr)
        return 1
    except (MeterCastError, FileNotFoundError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
