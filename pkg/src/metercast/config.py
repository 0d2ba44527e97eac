"""Pipeline configuration: TOML file, command-line overrides, hashing.

Precedence is defaults < config file < command line. Every JSON artifact
embeds the sha256 hash of the fully merged configuration, so artifacts
from different effective configs are never byte-identical by accident.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .featurize import FeatureSpec
from .trees import HyperParams
from .tuning import ParamSpace

CONFIG_SECTIONS = ("paths", "pipeline", "features", "space", "train")


@dataclass(frozen=True)
class PipelineConfig:
    """Everything the CLI pipeline needs beyond its input files."""

    meter_csv: str | None = None
    holiday_csv: str | None = None
    output_dir: str = "out"
    split_year: int | None = None
    seed: int | None = None
    selection_metric: str = "mae"
    nrmse_normalizer: str = "mean"
    resampling: int | float = 3
    tune_m: int = 10
    features: FeatureSpec = field(default_factory=FeatureSpec)
    space: ParamSpace = field(default_factory=ParamSpace)
    train_params: HyperParams = field(default_factory=HyperParams)
    forest_trees: int = 50
    forest_num_leaves: int = 32
    forest_min_leaf: int = 10
    bootstrap: bool = True

    def __post_init__(self):
        if self.seed is not None and not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.selection_metric not in ("mae", "rmse"):
            raise ValueError("selection_metric must be 'mae' or 'rmse'")
        if self.nrmse_normalizer not in ("mean", "range", "std"):
            raise ValueError("nrmse_normalizer must be mean, range or std")

    def to_dict(self) -> dict:
        return {
            "paths": {
                "meter_csv": self.meter_csv,
                "holiday_csv": self.holiday_csv,
                "output_dir": self.output_dir,
            },
            "pipeline": {
                "split_year": self.split_year,
                "seed": self.seed,
                "selection_metric": self.selection_metric,
                "nrmse_normalizer": self.nrmse_normalizer,
                "resampling": self.resampling,
                "tune_m": self.tune_m,
            },
            "features": self.features.to_dict(),
            "space": self.space.to_dict(),
            "train": {
                **self.train_params.to_dict(),
                "forest_trees": self.forest_trees,
                "forest_num_leaves": self.forest_num_leaves,
                "forest_min_leaf": self.forest_min_leaf,
                "bootstrap": self.bootstrap,
            },
        }


def config_hash(config: PipelineConfig) -> str:
    canonical = json.dumps(config.to_dict(), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _parse_resampling(raw) -> int | float:
    if isinstance(raw, bool):
        raise ValueError("resampling must be a fold count or a fraction")
    if isinstance(raw, (int, float)):
        return raw if isinstance(raw, int) else float(raw)
    text = str(raw)
    try:
        return int(text)
    except ValueError:
        return float(text)


def load_config(path=None, overrides: dict | None = None) -> PipelineConfig:
    """Build the effective config from an optional TOML file plus overrides.

    ``overrides`` maps PipelineConfig field names to values (the parsed
    command-line flags); None values are ignored.
    """
    doc: dict = {}
    if path is not None:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    unknown = set(doc) - set(CONFIG_SECTIONS)
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")

    paths = doc.get("paths", {})
    pipeline = doc.get("pipeline", {})
    feat = doc.get("features", {})
    space = doc.get("space", {})
    train = dict(doc.get("train", {}))

    kwargs: dict = {}
    for key in ("meter_csv", "holiday_csv", "output_dir"):
        if key in paths:
            kwargs[key] = paths[key]
    for key in ("split_year", "seed", "selection_metric", "nrmse_normalizer", "tune_m"):
        if key in pipeline:
            kwargs[key] = pipeline[key]
    if "resampling" in pipeline:
        kwargs["resampling"] = _parse_resampling(pipeline["resampling"])

    if feat:
        base = FeatureSpec().to_dict()
        base.update(feat)
        kwargs["features"] = FeatureSpec.from_dict(base)
    if space:
        space_kwargs = {k: tuple(v) for k, v in space.items()}
        kwargs["space"] = ParamSpace(**space_kwargs)
    if train:
        for key in ("forest_trees", "forest_num_leaves", "forest_min_leaf", "bootstrap"):
            if key in train:
                kwargs[key] = train.pop(key)
        if train:
            base = HyperParams().to_dict()
            base.update(train)
            kwargs["train_params"] = HyperParams.from_dict(base)

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "resampling":
            value = _parse_resampling(value)
        kwargs[key] = value
    return PipelineConfig(**kwargs)
