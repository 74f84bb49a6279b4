import json

import numpy as np
import pytest

from renewcast.exceptions import EmptyDatasetError, ParseError
from renewcast.ingest import RawTable, clean, parse_csv


def test_minimal_file():
    table = parse_csv(b"year,hydro\n1992,17.0\n1993,16.2")
    assert table.years == (1992, 1993)
    assert table.columns == ("hydro",)
    assert table.rows == ((17.0,), (16.2,))


@pytest.mark.parametrize("token", ["..", "NA", "n/a", "-", "", " .. "])
def test_sentinels_become_missing(token):
    table = parse_csv(f"year,a,b\n2000,1.0,{token}\n2001,2.0,3.0\n".encode())
    assert table.rows[0] == (1.0, None)


def test_world_bank_gap_marks_column_dropped():
    rows = "\n".join(f"{1990 + i},{i}.5,{'..' if i == 3 else i}" for i in range(12))
    table = parse_csv(f"year,full,gappy\n{rows}\n".encode())
    _, report = clean(table)
    assert report.dropped_columns == (("gappy", "missing values"),)


def test_quoted_fields():
    table = parse_csv(b'"Year","Wind (% electricity)"\n"2000","1.5"\n"2001","2.5"\n')
    assert table.columns == ("Wind (% electricity)",)


def test_non_monotone_years():
    with pytest.raises(ParseError, match="must increase") as info:
        parse_csv(b"year,x\n1993,1\n1992,2\n")
    assert info.value.row == 3 and info.value.column == 0


def test_duplicate_years():
    with pytest.raises(ParseError, match="duplicate period"):
        parse_csv(b"year,x\n1993,1\n1993,2\n")


def test_unparseable_cell_position():
    with pytest.raises(ParseError) as info:
        parse_csv(b"year,x,y\n2000,1,2\n2001,3,abc\n")
    assert (info.value.row, info.value.column) == (3, 2)


def test_ragged_row():
    with pytest.raises(ParseError, match="expected 2 fields"):
        parse_csv(b"year,x\n2000,1,2\n")


def test_reads_path(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("year,x\n2000,1\n", encoding="utf-8")
    assert parse_csv(path).source_path == str(path)


def _table(n=30, **columns):
    years = tuple(range(1990, 1990 + n))
    names = tuple(columns)
    rows = tuple(tuple(columns[c][i] for c in names) for i in range(n))
    return RawTable(header=("year",) + names, years=years, rows=rows)


class TestClean:
    def test_single_missing_cell_drops_column(self):
        vals = [float(i) for i in range(30)]
        gappy = list(vals)
        gappy[17] = None
        series, report = clean(_table(full=vals, gappy=gappy))
        assert list(series) == ["full"]
        assert report.dropped_columns == (("gappy", "missing values"),)

    def test_full_column_kept_unchanged(self):
        vals = [float(i) ** 1.5 for i in range(30)]
        series, report = clean(_table(a=vals))
        assert series["a"].values.tolist() == vals
        assert series["a"].start_period == 1990
        assert report.year_range == (1990, 2019)

    def test_too_short(self):
        with pytest.raises(EmptyDatasetError) as info:
            clean(_table(n=5, a=[1.0] * 5), min_length=10)
        assert info.value.report.dropped_columns == (("a", "too short"),)

    def test_all_dropped(self):
        with pytest.raises(EmptyDatasetError):
            clean(_table(n=12, a=[None] * 12))

    def test_counts_and_idempotence(self):
        rng = np.random.default_rng(0)
        cols = {}
        for j in range(6):
            vals = rng.normal(size=30).tolist()
            if j % 2:
                vals[rng.integers(30)] = None
            cols[f"c{j}"] = vals
        table = _table(**cols)
        series, report = clean(table)
        assert len(report.kept_columns) + len(report.dropped_columns) == 6
        again, report2 = clean(RawTable.from_series(series))
        assert report2.kept_columns == report.kept_columns
        assert report2.dropped_columns == ()
        for name in series:
            assert again[name] == series[name]

    def test_report_is_json_serializable(self):
        _, report = clean(_table(a=[1.0] * 30, b=[None] * 30))
        data = json.loads(json.dumps(report.to_dict()))
        assert data["dropped_columns"] == [{"name": "b", "reason": "missing values"}]
