"""Lag-embedding k-nearest-neighbour forecaster.

A series is turned into (window of ``w`` consecutive values -> next value)
pairs. A prediction averages the targets of the ``k`` stored windows closest
to the query. Multi-step forecasts are recursive: each prediction is pushed
into the query window, while the stored pairs stay purely observed data.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from renewcast.exceptions import GridSearchError, InsufficientDataError, ModelSpecError
from renewcast.series import TimeSeries, round_half_up

DISTANCES = ("euclidean", "manhattan")
WEIGHTINGS = ("uniform", "inverse-distance")
DEFAULT_WINDOW = 5
DEFAULT_K = 3
CV_START_FRACTION = 0.7


@dataclass(frozen=True)
class KnnConfig:
    k: int = DEFAULT_K
    window: int = DEFAULT_WINDOW
    distance: str = "euclidean"
    weighting: str = "uniform"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ModelSpecError(f"k must be a positive integer, got {self.k!r}")
        if int(self.window) != self.window or self.window < 1:
            raise ModelSpecError(f"window must be a positive integer, got {self.window!r}")
        if self.distance not in DISTANCES:
            raise ModelSpecError(f"distance must be one of {DISTANCES}")
        if self.weighting not in WEIGHTINGS:
            raise ModelSpecError(f"weighting must be one of {WEIGHTINGS}")

    def to_dict(self) -> dict:
        return asdict(self)

    def __str__(self):
        return f"knn(k={self.k},w={self.window})"


@dataclass(frozen=True, eq=False)
class LagEmbedding:
    window: int
    lags: np.ndarray
    targets: np.ndarray

    def __len__(self):
        return self.targets.size

    @property
    def pairs(self):
        return list(zip(self.lags, self.targets))


def _values(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=float).reshape(-1)


def embed(series, window: int) -> LagEmbedding:
    values = _values(series)
    n = values.size
    if window < 1:
        raise ValueError("window must be positive")
    if n <= window:
        raise InsufficientDataError(f"a window of {window} needs more than {window} observations, got {n}")
    lags = np.lib.stride_tricks.sliding_window_view(values[:-1], window).copy()
    targets = values[window:].copy()
    lags.setflags(write=False)
    targets.setflags(write=False)
    return LagEmbedding(window=window, lags=lags, targets=targets)


def _distances(lags, query, metric) -> np.ndarray:
    diff = lags - query
    if metric == "manhattan":
        return np.abs(diff).sum(axis=1)
    return np.sqrt((diff * diff).sum(axis=1))


def predict_one(embedding: LagEmbedding, query, config: KnnConfig) -> float:
    """Average the targets of the ``k`` stored windows nearest to ``query``.

    Equal distances are resolved in favour of the earlier window. With
    inverse-distance weighting, exact matches (distance 0) take all the
    weight.
    """
    query = np.asarray(query, dtype=float).reshape(-1)
    if query.size != embedding.window:
        raise ValueError(f"query has length {query.size}, expected {embedding.window}")
    if config.k > len(embedding):
        raise ModelSpecError(f"k={config.k} exceeds the {len(embedding)} available pairs")
    dist = _distances(embedding.lags, query, config.distance)
    nearest = np.argsort(dist, kind="stable")[: config.k]
    targets = embedding.targets[nearest]
    if config.weighting == "uniform":
        return float(np.mean(targets))
    near = dist[nearest]
    exact = near == 0
    if exact.any():
        return float(np.mean(targets[exact]))
    weights = 1.0 / near
    return float(np.dot(weights, targets) / weights.sum())


def forecast_recursive(series, config: KnnConfig, horizon: int) -> np.ndarray:
    if horizon < 1:
        raise ValueError("horizon must be a positive integer")
    values = _values(series)
    emb = embed(values, config.window)
    query = list(values[-config.window:])
    out = np.empty(horizon)
    for h in range(horizon):
        out[h] = predict_one(emb, query[-config.window:], config)
        query.append(out[h])
    return out


@dataclass(frozen=True)
class CvEntry:
    config: KnnConfig
    mean_error: float
    folds: int
    status: str = "ok"
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "k": self.config.k,
            "window": self.config.window,
            "mean_error": None if not math.isfinite(self.mean_error) else self.mean_error,
            "folds": self.folds,
            "status": self.status,
            "reason": self.reason,
        }


@dataclass
class KnnSelection:
    best: KnnConfig
    leaderboard: list[CvEntry]

    def to_dict(self) -> dict:
        return {"best": self.best.to_dict(), "leaderboard": [e.to_dict() for e in self.leaderboard]}


def cv_score(series, config: KnnConfig, start_fraction: float = CV_START_FRACTION) -> tuple[float, int]:
    """Rolling-origin one-step mean squared error.

    Origins run from ``round_half_up(start_fraction * n)`` to ``n - 1``; at
    each origin the model sees only the prefix before it.
    """
    values = _values(series)
    n = values.size
    first = max(round_half_up(start_fraction * n), 1)
    if first >= n:
        raise InsufficientDataError("series too short for rolling-origin evaluation")
    if first - config.window < config.k:
        raise InsufficientDataError(
            f"{config} needs {config.window + config.k} observations before the first origin, has {first}"
        )
    errors = []
    for t in range(first, n):
        emb = embed(values[:t], config.window)
        pred = predict_one(emb, values[t - config.window:t], config)
        errors.append((values[t] - pred) ** 2)
    return float(np.mean(errors)), len(errors)


def select_config(
    series,
    k_grid=(1, 2, 3, 5),
    w_grid=(DEFAULT_WINDOW,),
    distance: str = "euclidean",
    weighting: str = "uniform",
    start_fraction: float = CV_START_FRACTION,
) -> KnnSelection:
    """Choose ``(k, window)`` by rolling-origin cross-validation.

    Ties go to the smaller ``k``, then the smaller window. Candidates that
    cannot be evaluated on the series are listed as skipped.
    """
    k_grid, w_grid = sorted(set(k_grid)), sorted(set(w_grid))
    if not k_grid or not w_grid:
        raise ValueError("k_grid and w_grid must be non-empty")
    entries = []
    for k, w in itertools.product(k_grid, w_grid):
        config = KnnConfig(k=k, window=w, distance=distance, weighting=weighting)
        try:
            err, folds = cv_score(series, config, start_fraction)
        except (InsufficientDataError, ModelSpecError) as exc:
            entries.append(CvEntry(config, math.inf, 0, "skipped", str(exc)))
            continue
        entries.append(CvEntry(config, err, folds))
    entries.sort(key=lambda e: (e.status != "ok", e.mean_error, e.config.k, e.config.window))
    if entries[0].status != "ok":
        raise GridSearchError(
            "no feasible (k, window) candidate", reasons={str(e.config): e.reason for e in entries}
        )
    return KnnSelection(best=entries[0].config, leaderboard=entries)


@dataclass(frozen=True)
class KnnGrid:
    """Candidate sets handed to :func:`select_config`."""

    k_grid: tuple[int, ...] = (1, 2, 3, 5)
    w_grid: tuple[int, ...] = (DEFAULT_WINDOW,)
    distance: str = "euclidean"
    weighting: str = "uniform"

    def select(self, series) -> KnnSelection:
        return select_config(series, self.k_grid, self.w_grid, self.distance, self.weighting)
