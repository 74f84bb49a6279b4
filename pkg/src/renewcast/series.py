"""Univariate time-series container, differencing and chronological splits."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Sequence

import numpy as np

from renewcast.exceptions import InsufficientDataError

__all__ = [
    "TimeSeries",
    "SplitSpec",
    "difference",
    "seasonal_difference",
    "differencing_polynomial",
    "integrate",
    "chronological_split",
    "round_half_up",
]


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Ordered observations at a fixed cadence.

    Parameters
    ----------
    values : sequence of float
        Observations; must be finite and non-empty.
    start_period : int
        Label of the first observation, typically a calendar year.
    cadence : int
        Step between consecutive period labels.
    name : str
        Optional label, e.g. the source column.
    """

    values: np.ndarray
    start_period: int = 0
    cadence: int = 1
    name: str = ""

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).reshape(-1)
        if arr.size < 1:
            raise InsufficientDataError("a time series needs at least one observation")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise ValueError(f"non-finite value at position {bad}; gaps must be handled before construction")
        if int(self.cadence) < 1:
            raise ValueError("cadence must be a positive integer")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "start_period", int(self.start_period))
        object.__setattr__(self, "cadence", int(self.cadence))

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.start_period == other.start_period
            and self.cadence == other.cadence
            and self.name == other.name
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    @property
    def periods(self) -> np.ndarray:
        return self.start_period + self.cadence * np.arange(len(self))

    @property
    def end_period(self) -> int:
        return self.start_period + self.cadence * (len(self) - 1)

    def with_values(self, values, start_period=None) -> "TimeSeries":
        """Same cadence and name, new values (and optionally a new start)."""
        start = self.start_period if start_period is None else start_period
        return TimeSeries(values, start_period=start, cadence=self.cadence, name=self.name)

    def slice(self, start: int, stop: int | None = None) -> "TimeSeries":
        stop = len(self) if stop is None else stop
        return self.with_values(self.values[start:stop], self.start_period + start * self.cadence)

    def shift(self, offset: float) -> "TimeSeries":
        return self.with_values(self.values + offset)


@dataclass(frozen=True)
class SplitSpec:
    train_ratio: float = 0.8

    def __post_init__(self):
        if not 0.0 < float(self.train_ratio) < 1.0:
            raise ValueError(f"train_ratio must lie in (0, 1), got {self.train_ratio}")


def round_half_up(x: float) -> int:
    # Decimal(str(.)) avoids binary artefacts such as 0.8 * 56 = 44.800000000000004
    return int(Decimal(str(x)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def _as_values(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=float)


def difference(series: TimeSeries, d: int = 1) -> TimeSeries:
    """Apply first differencing ``d`` times.

    Each pass maps ``v[t] -> v[t] - v[t-1]`` and drops the first element, so
    the result has ``len(series) - d`` observations.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    n = len(series)
    if n <= d:
        raise InsufficientDataError(f"cannot difference {n} observations {d} times")
    if d == 0:
        return series
    values = np.diff(series.values, n=d)
    return series.with_values(values, series.start_period + d * series.cadence)


def seasonal_difference(series: TimeSeries, D: int = 1, s: int = 1) -> TimeSeries:
    """Apply lag-``s`` differencing ``D`` times; output length ``n - D*s``."""
    if D < 0:
        raise ValueError("D must be non-negative")
    if s < 1:
        raise ValueError("seasonal period s must be >= 1")
    n = len(series)
    if n <= D * s:
        raise InsufficientDataError(f"cannot seasonally difference {n} observations with D={D}, s={s}")
    if D == 0:
        return series
    values = series.values
    for _ in range(D):
        values = values[s:] - values[:-s]
    return series.with_values(values, series.start_period + D * s * series.cadence)


def differencing_polynomial(d: int, D: int = 0, s: int = 0) -> np.ndarray:
    """Coefficients of ``(1 - B)^d (1 - B^s)^D`` in increasing powers of B."""
    poly = np.array([1.0])
    for _ in range(d):
        poly = np.convolve(poly, [1.0, -1.0])
    if D:
        if s < 1:
            raise ValueError("seasonal differencing needs s >= 1")
        seasonal = np.zeros(s + 1)
        seasonal[0], seasonal[s] = 1.0, -1.0
        for _ in range(D):
            poly = np.convolve(poly, seasonal)
    return poly


def integrate(differenced_forecasts, history, d: int, D: int = 0, s: int = 0) -> np.ndarray:
    """Undo ``d`` regular and ``D`` seasonal differences.

    ``differenced_forecasts`` are values of the differenced process that
    directly follow ``history``; the return value is those same steps on the
    original scale. The inverse uses the last ``d + D*s`` observations of
    ``history`` as seeds.
    """
    if d < 0 or D < 0:
        raise ValueError("differencing orders must be non-negative")
    w = np.asarray(differenced_forecasts, dtype=float).reshape(-1)
    hist = _as_values(history)
    delta = differencing_polynomial(d, D, s)
    seeds = delta.size - 1
    if hist.size < seeds:
        raise InsufficientDataError(f"integration needs {seeds} history values, got {hist.size}")
    if seeds == 0:
        return w.copy()
    # x[t] = w[t] - sum_{i>=1} delta[i] * x[t-i]
    buf = np.concatenate([hist[hist.size - seeds:], np.empty(w.size)])
    tail = -delta[1:]
    for h in range(w.size):
        t = seeds + h
        buf[t] = w[h] + np.dot(tail, buf[t - 1::-1][:seeds])
    return buf[seeds:]


def chronological_split(series: TimeSeries, spec: SplitSpec | None = None) -> tuple[TimeSeries, TimeSeries]:
    """Split into leading train and trailing test parts without shuffling.

    The train side gets ``round_half_up(train_ratio * n)`` observations,
    e.g. 45 of 56 annual points at ratio 0.8.
    """
    spec = spec or SplitSpec()
    n = len(series)
    n_train = round_half_up(spec.train_ratio * n)
    if n_train < 1 or n_train >= n:
        raise InsufficientDataError(
            f"train_ratio {spec.train_ratio} on {n} observations leaves an empty side"
        )
    return series.slice(0, n_train), series.slice(n_train)


def as_series(values: Sequence[float] | TimeSeries, start_period: int = 0) -> TimeSeries:
    if isinstance(values, TimeSeries):
        return values
    return TimeSeries(values, start_period=start_period)
