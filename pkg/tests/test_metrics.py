import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from renewcast.metrics import ErrorReport, mae, mape, mse, render_table, rmse

vec = st.lists(st.floats(-1e4, 1e4, allow_nan=False), min_size=1, max_size=50)


def test_perfect_forecast():
    a = [1.0, 2.0, 3.0]
    assert (mae(a, a), mse(a, a), rmse(a, a), mape(a, a)) == (0.0, 0.0, 0.0, 0.0)


def test_direct_formula():
    a, p = [100.0, 200.0], [110.0, 190.0]
    assert mae(a, p) == 10.0
    assert mse(a, p) == 100.0
    assert rmse(a, p) == 10.0
    assert mape(a, p) == pytest.approx(7.5)


def test_table_two_identity():
    # reported MSE 1.13 and RMSE 1.06 agree to two decimals
    assert round(math.sqrt(1.13), 2) == 1.06


def test_length_mismatch():
    with pytest.raises(ValueError, match="length mismatch"):
        mae([1.0, 2.0], [1.0])


def test_mape_zero_actual_names_index():
    with pytest.raises(ValueError, match="index 1"):
        mape([1.0, 0.0, 2.0], [1.0, 1.0, 1.0])


@given(st.data())
def test_properties(data):
    n = data.draw(st.integers(1, 40))
    a = np.array(data.draw(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=n, max_size=n)))
    p = np.array(data.draw(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=n, max_size=n)))
    assert rmse(a, p) ** 2 == pytest.approx(mse(a, p), rel=1e-9, abs=1e-300)
    assert mae(a, p) <= rmse(a, p) * (1 + 1e-12) + 1e-12
    perm = np.random.default_rng(n).permutation(n)
    assert mae(a[perm], p[perm]) == pytest.approx(mae(a, p))
    assert mse(a[perm], p[perm]) == pytest.approx(mse(a, p))


@given(vec, st.floats(0.01, 100.0))
def test_scaling(values, c):
    a = np.array(values) + 1e4 + 1.0  # keep actuals away from zero
    p = a + np.linspace(-3, 3, a.size)
    assert mae(c * a, c * p) == pytest.approx(c * mae(a, p))
    assert rmse(c * a, c * p) == pytest.approx(c * rmse(a, p))
    assert mse(c * a, c * p) == pytest.approx(c * c * mse(a, p))
    assert mape(c * a, c * p) == pytest.approx(mape(a, p))


def test_report_handles_zero_actual():
    r = ErrorReport.from_forecast([0.0, 1.0], [0.5, 1.0], "KNN", "wind")
    assert r.mape is None and r.n == 2
    assert "--" in render_table([r])


def test_table_layout():
    rows = [
        ErrorReport(0.57, 1.13, 1.06, 9.11, 11, "SARIMA", "Renewables (% equiv. primary)"),
        {"parameter_tag": "Hydro (% equiv. primary)", "model_tag": "SARIMA", "mae": 0.29, "mse": 0.42,
         "rmse": None, "mape": 5.42},
    ]
    text = render_table(rows, digits=2)
    lines = text.splitlines()
    assert lines[0].split() == ["Parameter", "Model", "MAE", "MSE", "RMSE", "MAPE"]
    assert lines[3].endswith("0.29  0.42    --  5.42")


def test_table_subset_of_metrics():
    text = render_table([ErrorReport(0.447, 0.313, 0.559, 2.0, 7, "KNN", "Renewables")], metrics=("mse", "mae"))
    assert text.splitlines()[0].split()[-2:] == ["MSE", "MAE"]
