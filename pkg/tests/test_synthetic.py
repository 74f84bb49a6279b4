import numpy as np

from renewcast.ingest import load_series
from renewcast.synthetic import bundled_path, generate, write_csv


def test_bundled_file_is_reproducible():
    assert bundled_path().read_text(encoding="utf-8") == write_csv(generate())


def test_bundled_shape():
    series, report = load_series(str(bundled_path()))
    assert list(series) == ["renewables_share", "hydro_share", "wind_share", "solar_share"]
    assert report.year_range == (1968, 2023) and not report.dropped_columns
    share = series["renewables_share"].values
    assert len(share) == 56 and np.all(share > 0)
    # logistic growth: the last decade sits well above the first
    assert share[-10:].mean() > 2 * share[:10].mean()


def test_seed_changes_noise():
    a, b = generate(seed=1), generate(seed=2)
    assert not np.array_equal(a["renewables_share"], b["renewables_share"])
    np.testing.assert_array_equal(a["year"], b["year"])
