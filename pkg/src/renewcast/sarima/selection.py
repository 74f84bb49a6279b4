"""Information-criterion grid search over SARIMA orders."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from renewcast.exceptions import GridSearchError, InsufficientDataError, ModelSpecError
from renewcast.metrics import mse
from renewcast.sarima.model import MAX_ARMA_TERMS, FittedSarima, SarimaOrder, fit, forecast
from renewcast.series import SplitSpec, TimeSeries, chronological_split

CRITERIA = ("aic", "bic", "holdout-mse")


@dataclass(frozen=True)
class OrderGrid:
    """Inclusive ranges for each order field plus the seasonal periods to try.

    ``s=(0,)`` (the default) searches plain ARIMA models only.
    """

    p: tuple[int, ...] = (0, 1, 2, 3)
    d: tuple[int, ...] = (0, 1, 2)
    q: tuple[int, ...] = (0, 1, 2, 3)
    P: tuple[int, ...] = (0, 1, 2)
    D: tuple[int, ...] = (0, 1)
    Q: tuple[int, ...] = (0, 1, 2)
    s: tuple[int, ...] = (0,)
    max_terms: int = MAX_ARMA_TERMS

    @classmethod
    def from_max(cls, p=3, d=2, q=3, P=2, D=1, Q=2, s=0, max_terms=MAX_ARMA_TERMS) -> "OrderGrid":
        rng = lambda hi: tuple(range(hi + 1))
        return cls(rng(p), rng(d), rng(q), rng(P), rng(D), rng(Q), (s,), max_terms)

    @classmethod
    def single(cls, order: SarimaOrder) -> "OrderGrid":
        o = order
        return cls((o.p,), (o.d,), (o.q,), (o.P,), (o.D,), (o.Q,), (o.s,))

    def orders(self) -> list[SarimaOrder]:
        """Valid orders in lexicographic ``(p,d,q,P,D,Q,s)`` order.

        Seasonal fields collapse to zero when ``s == 0``; orders with more
        than ``max_terms`` ARMA coefficients are left out.
        """
        seen = set()
        for s in self.s:
            seasonal = itertools.product(self.P, self.D, self.Q) if s else [(0, 0, 0)]
            seasonal = list(seasonal)
            for p, d, q in itertools.product(self.p, self.d, self.q):
                for P, D, Q in seasonal:
                    key = (p, d, q, P, D, Q, s)
                    if key in seen or p + q + P + Q > self.max_terms:
                        continue
                    seen.add(key)
        return [SarimaOrder(*key, max_terms=self.max_terms) for key in sorted(seen)]


@dataclass
class LeaderboardEntry:
    order: SarimaOrder
    status: str
    score: float = math.inf
    aic: float | None = None
    bic: float | None = None
    loglik: float | None = None
    k: int | None = None
    n_scored: int | None = None
    converged: bool | None = None
    reason: str = ""
    model: FittedSarima | None = field(default=None, repr=False)

    @property
    def sort_key(self):
        return (self.status != "ok", self.score, self.k if self.k is not None else 0, self.order.as_tuple)

    def to_dict(self) -> dict:
        return {
            "order": self.order.to_dict(),
            "status": self.status,
            "score": None if not math.isfinite(self.score) else self.score,
            "aic": self.aic,
            "bic": self.bic,
            "loglik": self.loglik,
            "k": self.k,
            "n_scored": self.n_scored,
            "converged": self.converged,
            "reason": self.reason,
        }


@dataclass
class GridSearchResult:
    best: FittedSarima
    leaderboard: list[LeaderboardEntry]
    criterion: str

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "best": self.best.to_dict(),
            "leaderboard": [e.to_dict() for e in self.leaderboard],
        }


def _evaluate(args) -> LeaderboardEntry:
    values, order, criterion, include_constant, n_condition, holdout_ratio, restarts, seed = args
    k = order.n_params(include_constant)
    try:
        if criterion == "holdout-mse":
            series = TimeSeries(values)
            train, test = chronological_split(series, SplitSpec(holdout_ratio))
            model = fit(train, order, include_constant=include_constant, restarts=restarts, seed=seed)
            pred = forecast(model, train, horizon=len(test)).point
            score = mse(test.values, pred)
        else:
            cond = None if n_condition is None else n_condition - order.n_diff
            model = fit(values, order, include_constant=include_constant, n_condition=cond,
                        restarts=restarts, seed=seed)
            score = model.aic if criterion == "aic" else model.bic
    except (InsufficientDataError, ModelSpecError) as exc:
        return LeaderboardEntry(order, "skipped", k=k, reason=str(exc))
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return LeaderboardEntry(order, "failed", k=k, reason=f"{type(exc).__name__}: {exc}")
    if not math.isfinite(score):
        return LeaderboardEntry(order, "failed", k=k, reason="non-finite criterion value")
    return LeaderboardEntry(
        order,
        "ok",
        score=float(score),
        aic=model.aic,
        bic=model.bic,
        loglik=model.loglik,
        k=k,
        n_scored=model.n_scored,
        converged=model.converged,
        model=model,
    )


def common_start(orders) -> int:
    """First original-scale index that every order can score.

    Candidates with different AR degree or differencing would otherwise be
    scored on different numbers of points, which biases the comparison.
    """
    return max(o.n_diff + o.ar_degree for o in orders)


def grid_search(
    series,
    grid: OrderGrid | None = None,
    criterion: str = "aic",
    include_constant: bool = True,
    common_sample: bool = True,
    holdout_ratio: float = 0.8,
    restarts: int = 0,
    seed: int | None = None,
    n_jobs: int = 1,
) -> GridSearchResult:
    """Fit every order in ``grid`` and rank them by ``criterion``.

    Ranking uses the criterion value, then fewer parameters, then the
    lexicographic order tuple, so the result does not depend on evaluation
    order or ``n_jobs``. With ``common_sample`` the AIC/BIC fits all
    condition on the same leading observations; the returned ``best`` is
    then refitted with its own default conditioning. ``holdout-mse`` scores
    each order by the MSE of a multi-step forecast over the last
    ``1 - holdout_ratio`` of ``series`` and refits the winner on all of it.

    Raises
    ------
    GridSearchError
        When no order could be fitted; ``reasons`` lists why.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    grid = grid or OrderGrid()
    orders = grid.orders()
    if not orders:
        raise GridSearchError("the grid contains no valid order")
    values = np.asarray(series.values if isinstance(series, TimeSeries) else series, dtype=float)

    n_condition = None
    if common_sample and criterion != "holdout-mse":
        start = common_start(orders)
        n_condition = start if values.size - start >= 1 else None

    jobs = [
        (values, o, criterion, include_constant, n_condition, holdout_ratio, restarts, seed)
        for o in orders
    ]
    if n_jobs and n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            entries = list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * n_jobs))))
    else:
        entries = [_evaluate(job) for job in jobs]

    entries.sort(key=lambda e: e.sort_key)
    ok = [e for e in entries if e.status == "ok"]
    if not ok:
        raise GridSearchError(
            f"all {len(entries)} candidate orders failed",
            reasons={str(e.order): e.reason for e in entries},
        )
    winner = ok[0].order
    if criterion == "holdout-mse" or n_condition is not None:
        best = fit(values, winner, include_constant=include_constant, restarts=restarts, seed=seed)
    else:
        best = ok[0].model
    for e in entries:
        e.model = None
    return GridSearchResult(best=best, leaderboard=entries, criterion=criterion)
