"""Half-hourly smart-meter load forecasting toolkit.

Pipeline stages: parse wide meter CSVs into a dense half-hourly series,
repair gaps, build a calendar/lag feature matrix, fit boosted and bagged
regression trees (tuned by random search over temporal holdouts), blend
them with a least-squares stack, and score everything with a suite of
scale-dependent and relative error metrics.
"""

__version__ = "0.1.0"

from .errors import MeterCastError

__all__ = ["MeterCastError", "__version__"]
