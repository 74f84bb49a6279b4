"""Command-line front end.

Exit codes: 0 success, 1 computation failure, 2 I/O or invalid arguments,
3 empty result (nothing survived cleaning / every series failed to parse).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from renewcast import __version__, knn, sarima
from renewcast.backtest import backtest_detail, model_tag
from renewcast.exceptions import EmptyDatasetError, GridSearchError, ParseError, RenewcastError
from renewcast.ingest import DEFAULT_MIN_LENGTH, DEFAULT_SENTINELS, clean, parse_csv
from renewcast.metrics import METRIC_NAMES, render_table
from renewcast.series import SplitSpec, TimeSeries

EXIT_OK, EXIT_COMPUTE, EXIT_IO, EXIT_EMPTY = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_COMPUTE, **extra):
        super().__init__(message)
        self.code = code
        self.extra = extra


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("grid values must be positive integers")
    return values


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _ratio(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {value}")
    return value


def _order(text: str) -> sarima.SarimaOrder:
    try:
        return sarima.SarimaOrder.parse(text)
    except RenewcastError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="renewcast", description="SARIMA and KNN forecasting for annual energy-share series.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="CSV file (ingest/backtest/gridsearch/forecast) or backtest JSON (report)")
    common.add_argument("--columns", type=lambda s: [c.strip() for c in s.split(",") if c.strip()], default=None)
    common.add_argument("--out", default=None, help="write the primary output here instead of stdout")
    common.add_argument("--format", choices=("json", "table", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--sentinels", default=",".join(DEFAULT_SENTINELS),
                        help="comma-separated tokens treated as missing (default: '%(default)s')")
    common.add_argument("--min-length", type=_positive_int, default=DEFAULT_MIN_LENGTH)

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", choices=("sarima", "knn", "both"), default="both")
    model.add_argument("--order", type=_order, default=None, help="p,d,q or p,d,q,P,D,Q,s; skips the order search")
    model.add_argument("--p-max", type=_nonneg_int, default=3)
    model.add_argument("--d-max", type=_nonneg_int, default=2)
    model.add_argument("--q-max", type=_nonneg_int, default=3)
    model.add_argument("--P-max", dest="P_max", type=_nonneg_int, default=2)
    model.add_argument("--D-max", dest="D_max", type=_nonneg_int, default=1)
    model.add_argument("--Q-max", dest="Q_max", type=_nonneg_int, default=2)
    model.add_argument("--season", type=_nonneg_int, default=0, help="seasonal period s; 0 searches plain ARIMA")
    model.add_argument("--criterion", choices=sarima.selection.CRITERIA, default="aic")
    model.add_argument("--no-constant", dest="include_constant", action="store_false",
                       help="fit SARIMA without a constant (no drift when differenced)")
    model.add_argument("--restarts", type=_nonneg_int, default=0, help="extra seeded Nelder-Mead starts per fit")
    model.add_argument("--jobs", type=_positive_int, default=1)
    model.add_argument("--k", type=_positive_int, default=knn.DEFAULT_K)
    model.add_argument("--window", type=_positive_int, default=knn.DEFAULT_WINDOW)
    model.add_argument("--k-grid", type=_int_list, default=None)
    model.add_argument("--w-grid", type=_int_list, default=None)
    model.add_argument("--distance", choices=knn.DISTANCES, default="euclidean")
    model.add_argument("--weighting", choices=knn.WEIGHTINGS, default="uniform")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="parse and clean a CSV, report kept/dropped columns")

    p = sub.add_parser("backtest", parents=[common, model], help="chronological train/test evaluation")
    p.add_argument("--train-ratio", type=_ratio, default=0.8)

    p = sub.add_parser("gridsearch", parents=[common, model], help="rank SARIMA orders or KNN configurations")
    p.add_argument("--holdout-ratio", type=_ratio, default=0.8, help="inner split for --criterion holdout-mse")

    p = sub.add_parser("forecast", parents=[common, model], help="fit on the full series and project forward")
    p.add_argument("--horizon", type=_positive_int, default=10)
    p.add_argument("--level", type=_ratio, default=0.95)
    p.add_argument("--plot-out", default=None, help="also write plot-ready CSV here")

    p = sub.add_parser("report", parents=[common], help="render a backtest JSON as a metrics table")
    p.add_argument("--metrics", type=lambda s: [m.strip().lower() for m in s.split(",")], default=list(METRIC_NAMES))
    p.add_argument("--digits", type=_nonneg_int, default=3)
    return parser


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror or exc}", EXIT_IO, path=out) from None


def _load(args) -> tuple[dict[str, TimeSeries], dict]:
    sentinels = [s.strip() for s in args.sentinels.split(",")]
    if "" not in sentinels:
        sentinels.append("")
    try:
        table = parse_csv(args.input, sentinels=sentinels)
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc.strerror or exc}", EXIT_IO, path=args.input) from None
    except ParseError as exc:
        raise CliError(f"{args.input}: {exc}", EXIT_IO, path=args.input) from None
    try:
        series, report = clean(table, min_length=args.min_length)
    except EmptyDatasetError as exc:
        raise CliError(str(exc), EXIT_EMPTY, report=exc.report.to_dict() if exc.report else None) from None
    if args.columns:
        unknown = [c for c in args.columns if c not in table.columns]
        if unknown:
            raise CliError(f"unknown column(s): {', '.join(unknown)}", EXIT_IO, path=args.input)
        dropped = [c for c in args.columns if c not in series]
        if dropped and len(dropped) == len(args.columns):
            raise CliError(f"selected column(s) were dropped during cleaning: {', '.join(dropped)}",
                           EXIT_EMPTY, report=report.to_dict())
        series = {c: series[c] for c in args.columns if c in series}
    return series, report.to_dict()


def _sarima_spec(args):
    if args.order is not None:
        return args.order
    s = args.season
    grid = sarima.OrderGrid.from_max(
        p=args.p_max, d=args.d_max, q=args.q_max,
        P=args.P_max if s else 0, D=args.D_max if s else 0, Q=args.Q_max if s else 0, s=s,
    )
    return grid


def _knn_spec(args):
    if args.k_grid or args.w_grid:
        return knn.KnnGrid(
            k_grid=tuple(args.k_grid or [args.k]),
            w_grid=tuple(args.w_grid or [args.window]),
            distance=args.distance,
            weighting=args.weighting,
        )
    return knn.KnnConfig(k=args.k, window=args.window, distance=args.distance, weighting=args.weighting)


def _model_specs(args) -> list:
    specs = []
    if args.model in ("sarima", "both"):
        specs.append(_sarima_spec(args))
    if args.model in ("knn", "both"):
        specs.append(_knn_spec(args))
    return specs


def _header(args) -> dict:
    return {"command": args.command, "input": args.input, "seed": args.seed}


def cmd_ingest(args) -> int:
    _, report = _load(args)
    out = _header(args) | {"report": report}
    if args.format == "table":
        lines = [f"years {report['year_range'][0]}-{report['year_range'][1]}", "kept:"]
        lines += [f"  {c}" for c in report["kept_columns"]]
        lines.append("dropped:")
        lines += [f"  {d['name']}: {d['reason']}" for d in report["dropped_columns"]]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(dumps(out), args.out)
    return EXIT_OK


def cmd_backtest(args) -> int:
    series, clean_report = _load(args)
    split = SplitSpec(args.train_ratio)
    rows, errors = [], []
    for name, ts in series.items():
        for spec in _model_specs(args):
            tag = model_tag(spec)
            try:
                result = backtest_detail(ts, spec, split, criterion=args.criterion, n_jobs=args.jobs,
                                         include_constant=args.include_constant)
            except (RenewcastError, ValueError) as exc:
                errors.append({"series": name, "model": tag, "error": type(exc).__name__, "message": str(exc)})
                continue
            rows.append({"series": name, "model": tag} | result.to_dict())
    out = _header(args) | {"train_ratio": args.train_ratio, "criterion": args.criterion,
                           "rows": rows, "errors": errors}
    if args.format == "table":
        text = render_table([r["report"] for r in rows], title=f"Backtest (train ratio {args.train_ratio})")
        for e in errors:
            text += f"! {e['series']} / {e['model']}: {e['message']}\n"
        _emit(text, args.out)
    elif args.format == "csv":
        _emit(_reports_csv([r["report"] for r in rows]), args.out)
    else:
        _emit(dumps(out), args.out)
    if errors:
        for e in errors:
            print(f"renewcast: {e['series']} / {e['model']}: {e['message']}", file=sys.stderr)
    return EXIT_OK if rows else EXIT_COMPUTE


def _reports_csv(reports, metrics=METRIC_NAMES) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["parameter", "model", *metrics, "n"])
    for r in reports:
        writer.writerow([r["parameter_tag"], r["model_tag"], *["" if r.get(m) is None else repr(r[m]) for m in metrics], r["n"]])
    return buf.getvalue()


def cmd_gridsearch(args) -> int:
    series, _ = _load(args)
    results, errors = [], []
    for name, ts in series.items():
        for spec in _model_specs(args):
            tag = model_tag(spec)
            try:
                if tag == "SARIMA":
                    grid = sarima.OrderGrid.single(spec) if isinstance(spec, sarima.SarimaOrder) else spec
                    res = sarima.grid_search(ts, grid, criterion=args.criterion, holdout_ratio=args.holdout_ratio,
                                             include_constant=args.include_constant,
                                             restarts=args.restarts, seed=args.seed, n_jobs=args.jobs)
                    entry = {"series": name, "model": tag, "criterion": args.criterion,
                             "best": {"order": res.best.order.to_dict(), "params": res.best.params.to_dict(),
                                      "aic": res.best.aic, "bic": res.best.bic, "loglik": res.best.loglik},
                             "leaderboard": [e.to_dict() for e in res.leaderboard]}
                else:
                    grid = spec if isinstance(spec, knn.KnnGrid) else knn.KnnGrid((spec.k,), (spec.window,),
                                                                                  spec.distance, spec.weighting)
                    sel = grid.select(ts)
                    entry = {"series": name, "model": tag, "criterion": "rolling-origin-mse",
                             "best": sel.best.to_dict(), "leaderboard": [e.to_dict() for e in sel.leaderboard]}
            except GridSearchError as exc:
                errors.append({"series": name, "model": tag, "error": "GridSearchError",
                               "message": str(exc), "reasons": exc.reasons})
                continue
            except (RenewcastError, ValueError) as exc:
                errors.append({"series": name, "model": tag, "error": type(exc).__name__, "message": str(exc)})
                continue
            results.append(entry)
    out = _header(args) | {"results": results, "errors": errors}
    if args.format == "table":
        _emit(_leaderboard_text(results, errors), args.out)
    else:
        _emit(dumps(out), args.out)
    for e in errors:
        print(f"renewcast: {e['series']} / {e['model']}: {e['message']}", file=sys.stderr)
    return EXIT_OK if results else EXIT_COMPUTE


def _fmt(v):
    return "--" if v is None else (f"{v:.4f}" if isinstance(v, float) else str(v))


def _leaderboard_text(results, errors) -> str:
    lines = []
    for res in results:
        lines.append(f"{res['series']} / {res['model']} ({res['criterion']})")
        for rank, e in enumerate(res["leaderboard"], start=1):
            if res["model"] == "SARIMA":
                o = e["order"]
                label = f"({o['p']},{o['d']},{o['q']})" + (f"({o['P']},{o['D']},{o['Q']},{o['s']})" if o["s"] else "")
                score = e["score"]
            else:
                label = f"k={e['k']} w={e['window']}"
                score = e["mean_error"]
            note = f"  [{e['status']}: {e['reason']}]" if e["status"] != "ok" else ""
            lines.append(f"  {rank:>3}  {label:<22} {_fmt(score):>14}{note}")
    for e in errors:
        lines.append(f"! {e['series']} / {e['model']}: {e['message']}")
    return "\n".join(lines) + "\n"


def _forecast_one(ts: TimeSeries, spec, args) -> dict:
    tag = model_tag(spec)
    if tag == "SARIMA":
        if isinstance(spec, sarima.SarimaOrder):
            model = sarima.fit(ts, spec, include_constant=args.include_constant, restarts=args.restarts,
                               seed=args.seed)
        else:
            model = sarima.grid_search(ts, spec, criterion=args.criterion, include_constant=args.include_constant,
                                       restarts=args.restarts,
                                       seed=args.seed, n_jobs=args.jobs).best
        fc = sarima.forecast(model, ts, horizon=args.horizon, level=args.level)
        fitted = sarima.fitted_values(model, ts)
        return {"model": tag, "selected": model.to_dict() | {"residuals": None}, "forecast": fc.to_dict(),
                "fitted": [None if np.isnan(v) else float(v) for v in fitted]}
    config = spec.select(ts).best if isinstance(spec, knn.KnnGrid) else spec
    point = knn.forecast_recursive(ts, config, args.horizon)
    return {"model": tag, "selected": config.to_dict(),
            "forecast": {"horizon": args.horizon, "point": [float(v) for v in point], "lower": None,
                         "upper": None, "level": None},
            "fitted": None}


def cmd_forecast(args) -> int:
    series, _ = _load(args)
    results, errors = [], []
    for name, ts in series.items():
        future = [int(ts.end_period + ts.cadence * h) for h in range(1, args.horizon + 1)]
        for spec in _model_specs(args):
            try:
                res = _forecast_one(ts, spec, args)
            except (RenewcastError, ValueError) as exc:
                errors.append({"series": name, "model": model_tag(spec), "error": type(exc).__name__,
                               "message": str(exc)})
                continue
            res["selected"] = {k: v for k, v in res["selected"].items() if v is not None}
            results.append({"series": name, "periods": future, "history_periods": [int(p) for p in ts.periods],
                            "history": [float(v) for v in ts.values]} | res)
    out = _header(args) | {"horizon": args.horizon, "level": args.level, "results": results, "errors": errors}
    plot_csv = _plot_csv(results)
    if args.plot_out:
        try:
            Path(args.plot_out).write_text(plot_csv, encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot write {args.plot_out}: {exc.strerror or exc}", EXIT_IO, path=args.plot_out) from None
    if args.format == "csv":
        _emit(plot_csv, args.out)
    elif args.format == "table":
        lines = []
        for r in results:
            lines.append(f"{r['series']} / {r['model']}")
            fc = r["forecast"]
            for i, period in enumerate(r["periods"]):
                band = "" if fc["lower"] is None else f"  [{fc['lower'][i]:.4f}, {fc['upper'][i]:.4f}]"
                lines.append(f"  {period}  {fc['point'][i]:.4f}{band}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(dumps(out), args.out)
    for e in errors:
        print(f"renewcast: {e['series']} / {e['model']}: {e['message']}", file=sys.stderr)
    return EXIT_OK if results else EXIT_COMPUTE


def _plot_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["series", "model", "period", "actual", "point", "lower", "upper"])
    num = lambda v: "" if v is None else repr(float(v))
    for r in results:
        fitted = r.get("fitted") or [None] * len(r["history"])
        for period, actual, fit_value in zip(r["history_periods"], r["history"], fitted):
            writer.writerow([r["series"], r["model"], period, num(actual), num(fit_value), "", ""])
        fc = r["forecast"]
        for i, period in enumerate(r["periods"]):
            lower = None if fc["lower"] is None else fc["lower"][i]
            upper = None if fc["upper"] is None else fc["upper"][i]
            writer.writerow([r["series"], r["model"], period, "", num(fc["point"][i]), num(lower), num(upper)])
    return buf.getvalue()


def cmd_report(args) -> int:
    try:
        payload = json.loads(Path(args.input).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc.strerror or exc}", EXIT_IO, path=args.input) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.input} is not valid JSON: {exc}", EXIT_IO, path=args.input) from None
    rows = payload.get("rows")
    if rows is None:
        raise CliError(f"{args.input} is not a backtest result (no 'rows')", EXIT_IO, path=args.input)
    unknown = [m for m in args.metrics if m not in METRIC_NAMES]
    if unknown:
        raise CliError(f"unknown metric(s): {', '.join(unknown)}", EXIT_IO)
    reports = [r["report"] for r in rows]
    if args.columns:
        reports = [r for r in reports if r["parameter_tag"] in args.columns]
    if not reports:
        raise CliError("no report rows to render", EXIT_EMPTY)
    if args.format == "csv":
        _emit(_reports_csv(reports, args.metrics), args.out)
    elif args.format == "json":
        _emit(dumps({"command": "report", "input": args.input, "seed": payload.get("seed"), "rows": reports}), args.out)
    else:
        text = ""
        for tag in sorted({r["model_tag"] for r in reports}):
            subset = [r for r in reports if r["model_tag"] == tag]
            text += render_table(subset, metrics=args.metrics, digits=args.digits,
                                 title=f"Error metrics ({tag})") + "\n"
        _emit(text, args.out)
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "backtest": cmd_backtest,
    "gridsearch": cmd_gridsearch,
    "forecast": cmd_forecast,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        message = {"error": str(exc), "exit_code": exc.code} | exc.extra
        sys.stderr.write(dumps(message))
        return exc.code
    except RenewcastError as exc:
        sys.stderr.write(dumps({"error": str(exc), "exit_code": EXIT_COMPUTE}))
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
