"""Time tree fitting on realistic feature matrices of increasing size.

Reports milliseconds per boosted stage so hyperparameter budgets
(candidates x folds x trees) can be planned against a wall-clock limit.
"""

import argparse
import datetime as dt
import time

from metercast.featurize import FeatureSpec, build_matrix
from metercast.impute import impute
from metercast.synth import SynthConfig, synthetic_series
from metercast.trees import HyperParams, fit_gbdt, warm_up


def bench(days: int, trees: int, seed: int) -> tuple[int, float]:
    config = SynthConfig(start_date=dt.date(2011, 1, 1), n_days=days, seed=seed)
    series, calendar = synthetic_series(config)
    series, _ = impute(series)
    matrix = build_matrix(series, calendar, FeatureSpec())
    params = HyperParams(num_leaves=32, min_leaf_instances=10,
                         learning_rate=0.1, num_trees=trees)
    start = time.perf_counter()
    model = fit_gbdt(matrix, params)
    elapsed = time.perf_counter() - start
    return matrix.n, 1000.0 * elapsed / len(model.trees)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trees", type=int, default=60)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--days", type=int, nargs="*", default=[183, 365, 548, 730])
    args = parser.parse_args()

    warm_up()
    print(f"{'rows':>8}  {'ms/tree':>8}")
    for days in args.days:
        n, ms = bench(days, args.trees, args.seed)
        print(f"{n:>8}  {ms:>8.2f}")


if __name__ == "__main__":
    main()
