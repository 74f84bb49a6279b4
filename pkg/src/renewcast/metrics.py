"""Point-forecast error metrics and their tabular rendering."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

METRIC_NAMES = ("mae", "mse", "rmse", "mape")


def _pair(actual, predicted) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(actual, dtype=float).reshape(-1)
    p = np.asarray(predicted, dtype=float).reshape(-1)
    if a.size != p.size:
        raise ValueError(f"length mismatch: {a.size} actual vs {p.size} predicted values")
    if a.size == 0:
        raise ValueError("metrics need at least one value")
    return a, p


def mae(actual, predicted) -> float:
    a, p = _pair(actual, predicted)
    return float(np.mean(np.abs(a - p)))


def mse(actual, predicted) -> float:
    a, p = _pair(actual, predicted)
    return float(np.mean((a - p) ** 2))


def rmse(actual, predicted) -> float:
    return math.sqrt(mse(actual, predicted))


def mape(actual, predicted) -> float:
    """Mean absolute percentage error in percent; zero actuals are an error."""
    a, p = _pair(actual, predicted)
    zeros = np.flatnonzero(a == 0)
    if zeros.size:
        raise ValueError(f"MAPE is undefined: actual value at index {int(zeros[0])} is zero")
    return float(100.0 * np.mean(np.abs(a - p) / np.abs(a)))


@dataclass(frozen=True)
class ErrorReport:
    mae: float
    mse: float
    rmse: float
    mape: float | None
    n: int
    model_tag: str = ""
    parameter_tag: str = ""

    @classmethod
    def from_forecast(cls, actual, predicted, model_tag="", parameter_tag="") -> "ErrorReport":
        a, p = _pair(actual, predicted)
        try:
            pct = mape(a, p)
        except ValueError:
            pct = None
        return cls(
            mae=mae(a, p),
            mse=mse(a, p),
            rmse=rmse(a, p),
            mape=pct,
            n=int(a.size),
            model_tag=model_tag,
            parameter_tag=parameter_tag,
        )

    def to_dict(self) -> dict:
        return asdict(self)


def _fmt(value, digits) -> str:
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return "--"
    return f"{value:.{digits}f}"


def render_table(rows, metrics=METRIC_NAMES, digits: int = 3, title: str | None = None) -> str:
    """Aligned text table: one row per report, one column per metric.

    ``rows`` holds :class:`ErrorReport` objects or plain dicts with the same
    keys. Missing metrics (``None`` or absent keys) print as ``--``.
    """
    header = ["Parameter", "Model"] + [m.upper() for m in metrics]
    body = []
    for row in rows:
        rec = row.to_dict() if hasattr(row, "to_dict") else dict(row)
        body.append(
            [rec.get("parameter_tag", ""), rec.get("model_tag", "")]
            + [_fmt(rec.get(m), digits) for m in metrics]
        )
    widths = [max(len(str(r[i])) for r in [header] + body) for i in range(len(header))]

    def line(cells):
        left = [str(c).ljust(w) for c, w in zip(cells[:2], widths[:2])]
        right = [str(c).rjust(w) for c, w in zip(cells[2:], widths[2:])]
        return "  ".join(left + right).rstrip()

    out = []
    if title:
        out.append(title)
    out.append(line(header))
    out.append("  ".join("-" * w for w in widths))
    out.extend(line(r) for r in body)
    return "\n".join(out) + "\n"
