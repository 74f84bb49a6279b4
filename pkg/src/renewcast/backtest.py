"""Chronological train/test evaluation of either model family."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from renewcast import knn, sarima
from renewcast.metrics import ErrorReport
from renewcast.series import SplitSpec, TimeSeries, chronological_split


@dataclass
class BacktestResult:
    report: ErrorReport
    selected: dict
    periods: list[int]
    actual: list[float]
    predicted: list[float]
    search: dict | None = field(default=None, repr=False)

    def to_dict(self, include_search: bool = False) -> dict:
        out = {
            "report": self.report.to_dict(),
            "selected": self.selected,
            "periods": self.periods,
            "actual": self.actual,
            "predicted": self.predicted,
        }
        if include_search and self.search is not None:
            out["search"] = self.search
        return out


def model_tag(model_spec) -> str:
    if isinstance(model_spec, (sarima.SarimaOrder, sarima.OrderGrid)):
        return "SARIMA"
    if isinstance(model_spec, (knn.KnnConfig, knn.KnnGrid)):
        return "KNN"
    raise TypeError(f"unsupported model specification {type(model_spec).__name__}")


def fit_and_forecast(train: TimeSeries, model_spec, horizon: int, criterion: str = "aic", n_jobs: int = 1,
                     include_constant: bool = True):
    """Select/fit on ``train`` only and forecast ``horizon`` steps past it.

    Returns ``(point_forecasts, selected_description, search_summary)``.
    """
    if isinstance(model_spec, sarima.OrderGrid):
        result = sarima.grid_search(train, model_spec, criterion=criterion, include_constant=include_constant,
                                    n_jobs=n_jobs)
        model = result.best
        search = {"criterion": criterion, "leaderboard": [e.to_dict() for e in result.leaderboard]}
    elif isinstance(model_spec, sarima.SarimaOrder):
        model = sarima.fit(train, model_spec, include_constant=include_constant)
        search = None
    else:
        model = None
    if model is not None:
        fc = sarima.forecast(model, train, horizon=horizon)
        selected = {"order": model.order.to_dict(), "params": model.params.to_dict(), "aic": model.aic,
                    "bic": model.bic, "converged": model.converged}
        return np.asarray(fc.point), selected, search

    if isinstance(model_spec, knn.KnnGrid):
        selection = model_spec.select(train)
        config = selection.best
        search = {"criterion": "rolling-origin-mse", "leaderboard": [e.to_dict() for e in selection.leaderboard]}
    elif isinstance(model_spec, knn.KnnConfig):
        config, search = model_spec, None
    else:
        raise TypeError(f"unsupported model specification {type(model_spec).__name__}")
    return knn.forecast_recursive(train, config, horizon), {"config": config.to_dict()}, search


def backtest_detail(series: TimeSeries, model_spec, split: SplitSpec | None = None,
                    criterion: str = "aic", n_jobs: int = 1, include_constant: bool = True) -> BacktestResult:
    train, test = chronological_split(series, split or SplitSpec())
    pred, selected, search = fit_and_forecast(train, model_spec, len(test), criterion=criterion, n_jobs=n_jobs,
                                              include_constant=include_constant)
    report = ErrorReport.from_forecast(test.values, pred, model_tag=model_tag(model_spec), parameter_tag=series.name)
    return BacktestResult(
        report=report,
        selected=selected,
        periods=[int(p) for p in test.periods],
        actual=[float(v) for v in test.values],
        predicted=[float(v) for v in pred],
        search=search,
    )


def backtest(series: TimeSeries, model_spec, split: SplitSpec | None = None, criterion: str = "aic") -> ErrorReport:
    """Fit on the leading part of ``series``, forecast the rest in one multi-step run, and score it.

    ``model_spec`` is a fixed :class:`~renewcast.sarima.SarimaOrder` or
    :class:`~renewcast.knn.KnnConfig`, or a search space
    (:class:`~renewcast.sarima.OrderGrid`, :class:`~renewcast.knn.KnnGrid`)
    which is then searched on the training side only.
    """
    return backtest_detail(series, model_spec, split, criterion).report
