"""Model bundle persistence.

A bundle is one JSON document holding everything `predict` needs:
both component models, the stack combiner, the feature recipe with its
transform parameters, and the holiday calendar. Loading a bundle and a
load series is enough to forecast; no other run artifacts are consulted.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass

import numpy as np

from .featurize import FeatureMatrix, FeatureSpec, build_matrix
from .ingest import HolidayCalendar, HolidayEntry, LoadSeries
from .stacking import StackModel
from .trees import ForestModel, GbdtModel

BUNDLE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ModelBundle:
    feature_spec: FeatureSpec
    calendar: HolidayCalendar
    gbdt: GbdtModel
    forest: ForestModel
    stack: StackModel
    seed: int
    config_hash: str

    def predict_components(self, X) -> tuple[np.ndarray, np.ndarray]:
        return self.gbdt.predict(X), self.forest.predict(X)

    def predict(self, X) -> np.ndarray:
        b, d = self.predict_components(X)
        return self.stack.predict(b, d)

    def to_dict(self) -> dict:
        entries = sorted(self.calendar.entries.values(), key=lambda e: e.date)
        return {
            "format_version": BUNDLE_FORMAT_VERSION,
            "kind": "bundle",
            "config_hash": self.config_hash,
            "seed": int(self.seed),
            "feature_spec": self.feature_spec.to_dict(),
            "calendar": [
                {"date": e.date.isoformat(), "is_holiday": e.is_holiday, "name": e.name}
                for e in entries
            ],
            "gbdt": self.gbdt.to_dict(),
            "forest": self.forest.to_dict(),
            "stack": self.stack.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelBundle":
        if doc.get("kind") != "bundle":
            raise ValueError(f"not a model bundle: kind={doc.get('kind')!r}")
        calendar = HolidayCalendar()
        for item in doc["calendar"]:
            date = dt.date.fromisoformat(item["date"])
            calendar.entries[date] = HolidayEntry(
                date=date, is_holiday=bool(item["is_holiday"]), name=str(item["name"])
            )
        return cls(
            feature_spec=FeatureSpec.from_dict(doc["feature_spec"]),
            calendar=calendar,
            gbdt=GbdtModel.from_dict(doc["gbdt"]),
            forest=ForestModel.from_dict(doc["forest"]),
            stack=StackModel.from_dict(doc["stack"]),
            seed=int(doc["seed"]),
            config_hash=str(doc["config_hash"]),
        )


def save_bundle(path, bundle: ModelBundle) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(bundle.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_bundle(path) -> ModelBundle:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return ModelBundle.from_dict(doc)


def forecast_series(bundle: ModelBundle, series: LoadSeries) -> tuple[FeatureMatrix, np.ndarray]:
    """Featurize ``series`` with the bundled recipe and run the stack."""
    matrix = build_matrix(series, bundle.calendar, bundle.feature_spec)
    return matrix, bundle.predict(matrix.X)
