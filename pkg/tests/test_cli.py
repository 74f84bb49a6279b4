import json
import subprocess
import sys

import numpy as np
import pytest

from renewcast.cli import main
from renewcast.synthetic import bundled_path

FAST_GRID = ["--p-max", "1", "--d-max", "1", "--q-max", "1", "--k-grid", "1,3", "--w-grid", "2,3"]


def write_csv(path, years, columns):
    lines = ["year," + ",".join(columns)]
    for i, year in enumerate(years):
        lines.append(f"{year}," + ",".join(str(v[i]) for v in columns.values()))
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def two_columns(tmp_path):
    rng = np.random.default_rng(8)
    years = list(range(1990, 2025))
    return write_csv(tmp_path / "two.csv", years, {
        "a": np.round(np.linspace(5, 15, 35) + rng.normal(0, 0.3, 35), 4),
        "b": np.round(10 + np.cumsum(rng.normal(0, 0.5, 35)), 4),
    })


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestIngest:
    def test_valid(self, capsys, two_columns):
        code, out, _ = run(capsys, "ingest", "--input", str(two_columns))
        data = json.loads(out)
        assert code == 0 and data["report"]["kept_columns"] == ["a", "b"]
        assert data["command"] == "ingest" and data["seed"] == 0

    def test_unreadable_file(self, capsys, tmp_path):
        missing = tmp_path / "nope.csv"
        code, out, err = run(capsys, "ingest", "--input", str(missing))
        assert code == 2 and out == ""
        assert str(missing) in json.loads(err)["error"]

    def test_malformed(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("year,a\n2000,1\n2001,x\n")
        code, _, err = run(capsys, "ingest", "--input", str(bad))
        assert code == 2 and "row 3" in json.loads(err)["error"]

    def test_everything_dropped(self, capsys, tmp_path):
        path = write_csv(tmp_path / "short.csv", range(2000, 2005), {"a": [1, 2, 3, 4, 5]})
        code, _, err = run(capsys, "ingest", "--input", str(path))
        payload = json.loads(err)
        assert code == 3 and payload["report"]["dropped_columns"][0]["reason"] == "too short"

    def test_unknown_column(self, capsys, two_columns):
        code, _, _ = run(capsys, "ingest", "--input", str(two_columns), "--columns", "zzz")
        assert code == 2


class TestBacktest:
    def test_both_models(self, capsys, two_columns):
        code, out, _ = run(capsys, "backtest", "--input", str(two_columns), "--model", "both", *FAST_GRID)
        rows = json.loads(out)["rows"]
        assert code == 0 and len(rows) == 4
        assert {(r["series"], r["model"]) for r in rows} == {(s, m) for s in "ab" for m in ("SARIMA", "KNN")}
        for r in rows:
            rep = r["report"]
            assert rep["rmse"] ** 2 == pytest.approx(rep["mse"])

    def test_per_series_error_does_not_abort(self, capsys, tmp_path):
        years = range(2000, 2015)
        path = write_csv(tmp_path / "mixed.csv", years, {"long": np.arange(15.0) + 1})
        code, out, err = run(capsys, "backtest", "--input", str(path), "--train-ratio", "0.99",
                             "--model", "both", *FAST_GRID)
        data = json.loads(out)
        assert code == 1 and data["rows"] == [] and len(data["errors"]) == 2
        assert "long" in err

    def test_byte_identical(self, capsys, two_columns):
        argv = ["backtest", "--input", str(two_columns), "--seed", "5", *FAST_GRID]
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second

    def test_table_and_csv(self, capsys, two_columns):
        code, out, _ = run(capsys, "backtest", "--input", str(two_columns), "--format", "table", "--model", "knn",
                           "--k", "2", "--window", "3")
        assert code == 0 and "Parameter" in out and "KNN" in out
        code, out, _ = run(capsys, "backtest", "--input", str(two_columns), "--format", "csv", "--model", "knn",
                           "--k", "2", "--window", "3")
        assert out.splitlines()[0] == "parameter,model,mae,mse,rmse,mape,n"
        assert len(out.splitlines()) == 3

    def test_bad_ratio_is_usage_error(self, capsys, two_columns):
        with pytest.raises(SystemExit) as info:
            main(["backtest", "--input", str(two_columns), "--train-ratio", "1.5"])
        assert info.value.code == 2


class TestForecast:
    def test_periods_follow_history(self, capsys, two_columns):
        code, out, _ = run(capsys, "forecast", "--input", str(two_columns), "--horizon", "7", "--model", "knn",
                           "--k", "2", "--window", "3")
        results = json.loads(out)["results"]
        assert code == 0 and results[0]["periods"] == list(range(2025, 2032))

    def test_zero_horizon_rejected(self, two_columns):
        with pytest.raises(SystemExit) as info:
            main(["forecast", "--input", str(two_columns), "--horizon", "0"])
        assert info.value.code == 2

    def test_random_walk_order(self, capsys, two_columns, tmp_path):
        plot = tmp_path / "plot.csv"
        code, out, _ = run(capsys, "forecast", "--input", str(two_columns), "--columns", "b", "--model", "sarima",
                           "--order", "0,1,0", "--no-constant", "--horizon", "5", "--plot-out", str(plot))
        fc = json.loads(out)["results"][0]["forecast"]
        assert code == 0
        last = float(two_columns.read_text().splitlines()[-1].split(",")[2])
        assert fc["point"] == pytest.approx([last] * 5, abs=1e-9)
        width = np.subtract(fc["upper"], fc["lower"])
        assert np.all(np.diff(width) > 0)
        np.testing.assert_allclose(width / width[0], np.sqrt(np.arange(1, 6)), rtol=1e-9)
        rows = plot.read_text().splitlines()
        assert rows[0] == "series,model,period,actual,point,lower,upper"
        assert len(rows) == 1 + 35 + 5


class TestGridsearch:
    def test_singleton(self, capsys, two_columns):
        code, out, _ = run(capsys, "gridsearch", "--input", str(two_columns), "--model", "sarima", "--order", "1,1,0")
        res = json.loads(out)["results"]
        assert code == 0 and all(len(r["leaderboard"]) == 1 for r in res)
        assert res[0]["best"]["order"]["p"] == 1

    @pytest.mark.parametrize("criterion", ["aic", "bic"])
    def test_deterministic(self, capsys, two_columns, criterion):
        argv = ["gridsearch", "--input", str(two_columns), "--criterion", criterion, *FAST_GRID]
        code, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert code == 0 and first == second

    def test_leaderboard_table(self, capsys, two_columns):
        code, out, _ = run(capsys, "gridsearch", "--input", str(two_columns), "--format", "table", *FAST_GRID)
        assert code == 0 and "a / SARIMA (aic)" in out and "k=1 w=2" in out


class TestReport:
    def test_renders_backtest_json(self, capsys, two_columns, tmp_path):
        bt = tmp_path / "bt.json"
        code, _, _ = run(capsys, "backtest", "--input", str(two_columns), "--out", str(bt), *FAST_GRID)
        assert code == 0
        code, out, _ = run(capsys, "report", "--input", str(bt), "--format", "table", "--metrics", "mse,mape",
                           "--digits", "2")
        assert code == 0
        assert "Error metrics (KNN)" in out and "Error metrics (SARIMA)" in out
        assert "MSE" in out and "MAPE" in out and "MAE " not in out

    def test_not_a_backtest(self, capsys, tmp_path):
        path = tmp_path / "x.json"
        path.write_text("{}")
        code, _, _ = run(capsys, "report", "--input", str(path))
        assert code == 2


def test_writes_only_requested_paths(tmp_path, two_columns, capsys):
    before = {p.name for p in tmp_path.iterdir()}
    out = tmp_path / "out.json"
    main(["backtest", "--input", str(two_columns), "--out", str(out), "--model", "knn", "--k", "1", "--window", "2"])
    capsys.readouterr()
    assert {p.name for p in tmp_path.iterdir()} - before == {"out.json"}


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "renewcast", "ingest", "--input", str(bundled_path()),
                           "--format", "table"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "renewables_share" in proc.stdout
