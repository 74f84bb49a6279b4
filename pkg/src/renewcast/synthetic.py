"""Seeded synthetic annual energy-share series used for demos and tests.

The bundled ``data/synthetic_renewables.csv`` is exactly
``write_csv(generate())``; regenerate it with
``python -m renewcast.synthetic``.
"""

from __future__ import annotations

import csv
import io
from importlib import resources
from pathlib import Path

import numpy as np

DEFAULT_SEED = 20251204
FIRST_YEAR = 1968
LAST_YEAR = 2023
BUNDLED_NAME = "synthetic_renewables.csv"


def logistic(t, ceiling, midpoint, rate, floor=0.0):
    return floor + (ceiling - floor) / (1.0 + np.exp(-rate * (t - midpoint)))


def _ar1_noise(rng, n, phi, scale):
    e = rng.normal(0.0, scale, size=n + 50)
    out = np.zeros_like(e)
    for t in range(1, e.size):
        out[t] = phi * out[t - 1] + e[t]
    return out[50:]


def generate(seed: int = DEFAULT_SEED, first_year: int = FIRST_YEAR, last_year: int = LAST_YEAR) -> dict[str, np.ndarray]:
    """Return ``{"year": ..., column: values}`` with four share-like series (percent)."""
    rng = np.random.default_rng(seed)
    years = np.arange(first_year, last_year + 1)
    n = years.size
    renewables = logistic(years, 22.0, 2004.0, 0.28, floor=6.0) + rng.normal(0.0, 0.35, n)
    hydro = 17.0 - 0.02 * (years - first_year) + _ar1_noise(rng, n, 0.6, 0.45)
    wind = logistic(years, 12.0, 2012.0, 0.35, floor=0.05) + rng.normal(0.0, 0.12, n)
    solar = logistic(years, 8.0, 2018.0, 0.45, floor=0.02) * (1.0 + rng.normal(0.0, 0.03, n))
    cols = {
        "year": years,
        "renewables_share": renewables,
        "hydro_share": hydro,
        "wind_share": np.abs(wind) + 0.01,
        "solar_share": np.abs(solar) + 0.01,
    }
    return {k: (v if k == "year" else np.round(v, 4)) for k, v in cols.items()}


def write_csv(columns: dict[str, np.ndarray], out=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    writer.writerow(names)
    for i in range(len(columns["year"])):
        writer.writerow([int(columns["year"][i])] + [f"{columns[c][i]:.4f}" for c in names[1:]])
    text = buf.getvalue()
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    return text


def bundled_path() -> Path:
    return Path(str(resources.files("renewcast") / "data" / BUNDLED_NAME))


if __name__ == "__main__":
    write_csv(generate(), bundled_path())
    print(bundled_path())
