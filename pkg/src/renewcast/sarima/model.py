"""SARIMA(p,d,q)(P,D,Q,s) estimation by conditional sum of squares and forecasting.

Conventions: the differenced series ``w`` follows

    phi(B) Phi(B^s) w[t] = c + theta(B) Theta(B^s) e[t]

with ``phi(B) = 1 - sum phi_i B^i`` and ``theta(B) = 1 + sum theta_j B^j``
(seasonal factors alike). ``constant`` is the intercept ``c``, so the mean of
``w`` is ``c / phi(1) Phi(1)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from statistics import NormalDist

import numpy as np
from scipy.signal import lfilter

from renewcast.exceptions import InsufficientDataError, ModelSpecError
from renewcast.sarima.optimize import nelder_mead
from renewcast.sarima.transform import (
    inverse_invertible_transform,
    inverse_stationarity_transform,
    invertible_transform,
    stationarity_transform,
)
from renewcast.series import TimeSeries, difference, differencing_polynomial, integrate, seasonal_difference

MAX_ARMA_TERMS = 8
MAX_HORIZON = 100
MIN_MARGIN = 5
DEGENERATE_SIGMA2 = 1e-12
_SIGMA2_FLOOR = 1e-300
_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SarimaOrder:
    p: int = 0
    d: int = 0
    q: int = 0
    P: int = 0
    D: int = 0
    Q: int = 0
    s: int = 0
    max_terms: int = field(default=MAX_ARMA_TERMS, compare=False, repr=False)

    def __post_init__(self):
        for name in ("p", "d", "q", "P", "D", "Q", "s"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ModelSpecError(f"order field {name} must be a non-negative integer, got {value!r}")
        if self.s == 0 and (self.P or self.D or self.Q):
            raise ModelSpecError("seasonal orders P, D, Q require a seasonal period s > 0")
        if self.p + self.q + self.P + self.Q > self.max_terms:
            raise ModelSpecError(
                f"p+q+P+Q = {self.p + self.q + self.P + self.Q} exceeds the maximum of {self.max_terms}"
            )

    @classmethod
    def parse(cls, text: str) -> "SarimaOrder":
        """Parse ``"p,d,q"`` or ``"p,d,q,P,D,Q,s"``."""
        try:
            parts = [int(x) for x in text.replace(" ", "").split(",")]
        except ValueError:
            raise ModelSpecError(f"cannot parse order {text!r}") from None
        if len(parts) not in (3, 7):
            raise ModelSpecError(f"order needs 3 or 7 integers, got {len(parts)}")
        return cls(*parts)

    @property
    def as_tuple(self) -> tuple[int, int, int, int, int, int, int]:
        return (self.p, self.d, self.q, self.P, self.D, self.Q, self.s)

    @property
    def n_arma(self) -> int:
        return self.p + self.q + self.P + self.Q

    @property
    def ar_degree(self) -> int:
        return self.p + self.P * self.s

    @property
    def ma_degree(self) -> int:
        return self.q + self.Q * self.s

    @property
    def n_diff(self) -> int:
        """Observations lost to differencing."""
        return self.d + self.D * self.s

    def n_params(self, include_constant: bool = True) -> int:
        return self.n_arma + 1 + int(include_constant)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("p", "d", "q", "P", "D", "Q", "s")}

    def __str__(self):
        text = f"({self.p},{self.d},{self.q})"
        if self.s:
            text += f"({self.P},{self.D},{self.Q},{self.s})"
        return text


@dataclass(frozen=True)
class SarimaParams:
    phi: tuple[float, ...] = ()
    theta: tuple[float, ...] = ()
    Phi: tuple[float, ...] = ()
    Theta: tuple[float, ...] = ()
    constant: float = 0.0
    sigma2: float = 1.0

    def __post_init__(self):
        for name in ("phi", "theta", "Phi", "Theta"):
            object.__setattr__(self, name, tuple(float(v) for v in np.atleast_1d(getattr(self, name))))
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "sigma2", float(self.sigma2))
        if not self.sigma2 > 0:
            raise ModelSpecError("sigma2 must be positive")

    def check(self, order: SarimaOrder):
        dims = {"phi": order.p, "theta": order.q, "Phi": order.P, "Theta": order.Q}
        for name, expected in dims.items():
            got = len(getattr(self, name))
            if got != expected:
                raise ModelSpecError(f"{name} has {got} coefficients but the order requires {expected}")

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


@dataclass(frozen=True, eq=False)
class FittedSarima:
    order: SarimaOrder
    params: SarimaParams
    loglik: float
    aic: float
    bic: float
    n_effective: int
    residuals: np.ndarray
    n_conditioned: int = 0
    include_constant: bool = True
    converged: bool = True
    degenerate: bool = False
    seed: int | None = None

    @property
    def n_params(self) -> int:
        return self.order.n_params(self.include_constant)

    @property
    def n_scored(self) -> int:
        return self.n_effective - self.n_conditioned

    def to_dict(self) -> dict:
        return {
            "order": self.order.to_dict(),
            "params": self.params.to_dict(),
            "loglik": self.loglik,
            "aic": self.aic,
            "bic": self.bic,
            "n_effective": self.n_effective,
            "residuals": [float(v) for v in self.residuals],
            "n_conditioned": self.n_conditioned,
            "include_constant": self.include_constant,
            "converged": self.converged,
            "degenerate": self.degenerate,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class ForecastResult:
    horizon: int
    point: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    level: float = 0.95

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "point": list(self.point),
            "lower": list(self.lower),
            "upper": list(self.upper),
            "level": self.level,
        }


def expand_polynomials(order: SarimaOrder, params: SarimaParams) -> tuple[np.ndarray, np.ndarray]:
    """Multiply out the regular and seasonal lag polynomials.

    Returns ``(ar_full, ma_full)`` where ``ar_full[i-1]`` is the coefficient
    on ``w[t-i]`` in ``w[t] = c + sum ar_full_i w[t-i] + ...`` and
    ``ma_full[j-1]`` the coefficient on ``e[t-j]``. Lengths are
    ``p + P*s`` and ``q + Q*s``.
    """
    params.check(order)
    s = order.s
    ar = np.convolve(_lag_poly(params.phi, 1, -1.0), _lag_poly(params.Phi, s, -1.0))
    ma = np.convolve(_lag_poly(params.theta, 1, 1.0), _lag_poly(params.Theta, s, 1.0))
    return -ar[1:], ma[1:]


def _lag_poly(coefs, lag, sign) -> np.ndarray:
    poly = np.zeros(len(coefs) * lag + 1)
    poly[0] = 1.0
    for i, c in enumerate(coefs, start=1):
        poly[i * lag] = sign * c
    return poly


def differenced_values(series, order: SarimaOrder) -> np.ndarray:
    ts = series if isinstance(series, TimeSeries) else TimeSeries(series)
    ts = difference(ts, order.d)
    if order.D:
        ts = seasonal_difference(ts, order.D, order.s)
    return np.asarray(ts.values)


def css_residuals(w, ar_full, ma_full, constant: float, n_condition: int | None = None) -> np.ndarray:
    """Residual recursion with presample residuals fixed at zero.

    Positions before ``n_condition`` (default: the AR degree) are
    conditioning values and get residual 0.
    """
    w = np.asarray(w, dtype=float)
    ar_full = np.asarray(ar_full, dtype=float)
    m = ar_full.size if n_condition is None else n_condition
    if m < ar_full.size:
        raise ValueError("cannot condition on fewer points than the AR degree")
    n = w.size
    e = np.zeros(n)
    if n <= m:
        return e
    u = w[m:] - constant
    for i, a in enumerate(ar_full, start=1):
        if a:
            u = u - a * w[m - i:n - i]
    if ma_full is not None and len(ma_full) and np.any(ma_full):
        e[m:] = lfilter([1.0], np.concatenate([[1.0], ma_full]), u)
    else:
        e[m:] = u
    return e


def gaussian_loglik(css: float, n_scored: int, sigma2: float) -> float:
    return -0.5 * n_scored * (_LOG_2PI + math.log(sigma2)) - css / (2.0 * sigma2)


def css_loglik(series_differenced, order: SarimaOrder, params: SarimaParams, n_condition: int | None = None) -> float:
    """Conditional Gaussian log-likelihood of an already differenced series.

    The first ``n_condition`` points (default ``p + P*s``) are conditioned
    on; the remaining ``n'`` points contribute
    ``-(n'/2)(ln 2pi + ln sigma2) - CSS / (2 sigma2)``. Explosive trial
    coefficients that overflow yield ``-inf``.
    """
    w = np.asarray(series_differenced.values if isinstance(series_differenced, TimeSeries) else series_differenced, dtype=float)
    ar_full, ma_full = expand_polynomials(order, params)
    m = ar_full.size if n_condition is None else n_condition
    if w.size <= m:
        raise InsufficientDataError(f"{w.size} differenced points cannot support AR degree {m}")
    with np.errstate(all="ignore"):
        e = css_residuals(w, ar_full, ma_full, params.constant, m)
        css = float(np.dot(e[m:], e[m:]))
    if not math.isfinite(css):
        return -math.inf
    return gaussian_loglik(css, w.size - m, params.sigma2)


class _Layout:
    """Packs the optimizer vector: transformed phi, theta, Phi, Theta, then the mean."""

    def __init__(self, order: SarimaOrder, include_constant: bool):
        self.order = order
        self.include_constant = include_constant
        o = order
        self.cuts = np.cumsum([o.p, o.q, o.P, o.Q])
        self.dim = int(self.cuts[-1]) + int(include_constant)

    def unpack(self, x):
        phi_u, theta_u, sphi_u, stheta_u = np.split(x[: self.cuts[-1]], self.cuts[:-1])
        phi = stationarity_transform(phi_u)
        theta = invertible_transform(theta_u)
        sphi = stationarity_transform(sphi_u)
        stheta = invertible_transform(stheta_u)
        mean = float(x[-1]) if self.include_constant else 0.0
        # intercept = mean * phi(1) * Phi(1)
        constant = mean * (1.0 - phi.sum()) * (1.0 - sphi.sum())
        return phi, theta, sphi, stheta, constant

    def pack(self, params: SarimaParams):
        parts = [
            inverse_stationarity_transform(params.phi),
            inverse_invertible_transform(params.theta),
            inverse_stationarity_transform(params.Phi),
            inverse_invertible_transform(params.Theta),
        ]
        if self.include_constant:
            denom = (1.0 - sum(params.phi)) * (1.0 - sum(params.Phi))
            parts.append([params.constant / denom])
        return np.concatenate(parts)


def fit(
    series,
    order: SarimaOrder,
    include_constant: bool = True,
    n_condition: int | None = None,
    restarts: int = 0,
    seed: int | None = None,
    max_iter: int | None = None,
) -> FittedSarima:
    """Fit a SARIMA model by maximizing the CSS log-likelihood.

    Coefficients are searched with Nelder-Mead in a space that maps onto
    the stationary / invertible region, starting from zero coefficients and
    the sample mean. ``sigma2`` is concentrated out as ``CSS / n'``.

    Parameters
    ----------
    series : TimeSeries or array_like
        Observations on the original (undifferenced) scale.
    order : SarimaOrder
    include_constant : bool
        Estimate an intercept. Counted as one parameter in AIC/BIC.
    n_condition : int, optional
        Number of leading differenced points to condition on. Defaults to
        the AR degree ``p + P*s``; model comparison may pass a larger,
        common value so that every candidate is scored on the same points.
    restarts : int
        Extra Nelder-Mead runs from perturbations of the best point found,
        drawn from a generator seeded with ``seed``.

    Raises
    ------
    InsufficientDataError
        If fewer than ``k + 5`` points remain after differencing.
    """
    values = series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    if values.size <= order.n_diff:
        raise InsufficientDataError(f"{values.size} observations cannot be differenced with {order}")
    w = differenced_values(values, order)
    k = order.n_params(include_constant)
    m = order.ar_degree if n_condition is None else int(n_condition)
    if m < order.ar_degree:
        raise ValueError("n_condition must be at least the AR degree")
    if w.size < k + MIN_MARGIN or w.size - m < 1:
        raise InsufficientDataError(
            f"order {order} needs at least {max(k + MIN_MARGIN, m + 1)} points after differencing, got {w.size}"
        )
    n_scored = w.size - m
    layout = _Layout(order, include_constant)

    def objective(x):
        phi, theta, sphi, stheta, c = layout.unpack(x)
        ar = -np.convolve(_lag_poly(phi, 1, -1.0), _lag_poly(sphi, order.s, -1.0))[1:]
        ma = np.convolve(_lag_poly(theta, 1, 1.0), _lag_poly(stheta, order.s, 1.0))[1:]
        with np.errstate(all="ignore"):
            e = css_residuals(w, ar, ma, c, m)
            css = float(np.dot(e[m:], e[m:]))
        if not math.isfinite(css):
            return math.inf
        sigma2 = max(css / n_scored, _SIGMA2_FLOOR)
        return 0.5 * n_scored * (_LOG_2PI + math.log(sigma2) + 1.0)

    x0 = np.zeros(layout.dim)
    steps = np.full(layout.dim, 0.25)
    if include_constant:
        x0[-1] = float(np.mean(w))
        scale = float(np.std(w))
        steps[-1] = 0.5 * scale if scale > 0 else 1e-3 * max(1.0, abs(x0[-1]))

    result = nelder_mead(objective, x0, step=steps, max_iter=max_iter)
    best_x, best_f, converged = result.x, result.fun, result.converged
    if restarts:
        rng = np.random.default_rng(seed)
        for _ in range(restarts):
            start = best_x + steps * rng.normal(0.0, 2.0, size=layout.dim)
            trial = nelder_mead(objective, start, step=steps, max_iter=max_iter)
            if trial.fun < best_f:
                best_x, best_f, converged = trial.x, trial.fun, trial.converged

    phi, theta, sphi, stheta, c = layout.unpack(best_x)
    ar_full = -np.convolve(_lag_poly(phi, 1, -1.0), _lag_poly(sphi, order.s, -1.0))[1:]
    ma_full = np.convolve(_lag_poly(theta, 1, 1.0), _lag_poly(stheta, order.s, 1.0))[1:]
    e = css_residuals(w, ar_full, ma_full, c, m)
    css = float(np.dot(e[m:], e[m:]))
    raw_sigma2 = css / n_scored
    sigma2 = max(raw_sigma2, _SIGMA2_FLOOR)
    params = SarimaParams(phi=phi, theta=theta, Phi=sphi, Theta=stheta, constant=c, sigma2=sigma2)
    loglik = gaussian_loglik(css, n_scored, sigma2)
    return FittedSarima(
        order=order,
        params=params,
        loglik=loglik,
        aic=information_criterion(loglik, k, n_scored, "aic"),
        bic=information_criterion(loglik, k, w.size, "bic"),
        n_effective=int(w.size),
        residuals=e,
        n_conditioned=m,
        include_constant=include_constant,
        converged=converged,
        degenerate=raw_sigma2 < DEGENERATE_SIGMA2,
        seed=seed if restarts else None,
    )


def information_criterion(loglik: float, k: int, n: int, kind: str) -> float:
    if kind == "aic":
        return -2.0 * loglik + 2.0 * k
    if kind == "bic":
        return -2.0 * loglik + k * math.log(n)
    raise ValueError(f"unknown criterion {kind!r}")


def psi_weights(ar_poly, ma_poly, n: int) -> np.ndarray:
    """First ``n`` MA(infinity) weights of ``ma_poly(B) / ar_poly(B)``.

    Both polynomials are given in increasing powers of B with leading 1.
    """
    ar_poly = np.asarray(ar_poly, dtype=float)
    ma_poly = np.asarray(ma_poly, dtype=float)
    psi = np.zeros(n)
    for j in range(n):
        acc = ma_poly[j] if j < ma_poly.size else 0.0
        upper = min(j, ar_poly.size - 1)
        for i in range(1, upper + 1):
            acc -= ar_poly[i] * psi[j - i]
        psi[j] = acc
    return psi


def forecast(
    model: FittedSarima,
    history,
    horizon: int = 10,
    level: float = 0.95,
    max_horizon: int = MAX_HORIZON,
) -> ForecastResult:
    """Multi-step forecast with symmetric Gaussian bands.

    Point forecasts iterate the ARMA recursion on the differenced scale with
    future innovations at zero, then undo the differencing using
    ``history``. The band half-width at step h is
    ``z * sigma * sqrt(psi_0^2 + ... + psi_{h-1}^2)``, with psi the
    MA(infinity) weights of the model including its differencing factors.
    """
    if int(horizon) != horizon or horizon < 1:
        raise ValueError("horizon must be a positive integer")
    if horizon > max_horizon:
        raise ValueError(f"horizon {horizon} exceeds the maximum of {max_horizon}")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    order, params = model.order, model.params
    values = history.values if isinstance(history, TimeSeries) else np.asarray(history, dtype=float)
    w = differenced_values(values, order)
    ar_full, ma_full = expand_polynomials(order, params)
    if w.size < ar_full.size:
        raise InsufficientDataError("history is shorter than the AR degree")
    e = css_residuals(w, ar_full, ma_full, params.constant)

    ext_w = np.concatenate([w, np.zeros(horizon)])
    ext_e = np.concatenate([e, np.zeros(horizon)])
    n = w.size
    for h in range(horizon):
        t = n + h
        acc = params.constant
        for i, a in enumerate(ar_full, start=1):
            acc += a * ext_w[t - i]
        for j, b in enumerate(ma_full, start=1):
            if t - j >= 0:
                acc += b * ext_e[t - j]
        ext_w[t] = acc
    point = integrate(ext_w[n:], values, order.d, order.D, order.s)

    ar_poly = np.concatenate([[1.0], -ar_full])
    full_ar = np.convolve(ar_poly, differencing_polynomial(order.d, order.D, order.s))
    psi = psi_weights(full_ar, np.concatenate([[1.0], ma_full]), horizon)
    z = NormalDist().inv_cdf(0.5 + level / 2.0)
    half = z * math.sqrt(params.sigma2) * np.sqrt(np.cumsum(psi**2))
    return ForecastResult(
        horizon=int(horizon),
        point=tuple(float(v) for v in point),
        lower=tuple(float(v) for v in point - half),
        upper=tuple(float(v) for v in point + half),
        level=float(level),
    )


def fitted_values(model: FittedSarima, series) -> np.ndarray:
    """In-sample one-step predictions on the original scale (NaN where conditioned)."""
    values = series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    order = model.order
    w = differenced_values(values, order)
    ar_full, ma_full = expand_polynomials(order, model.params)
    e = css_residuals(w, ar_full, ma_full, model.params.constant)
    out = np.full(values.size, np.nan)
    skip = order.n_diff + ar_full.size
    out[skip:] = values[skip:] - e[ar_full.size:]
    return out


def simulate(
    order: SarimaOrder,
    params: SarimaParams,
    n: int,
    seed: int | None = None,
    burn_in: int = 200,
    initial_level: float = 0.0,
) -> np.ndarray:
    """Draw ``n`` observations from the model with Gaussian innovations."""
    rng = np.random.default_rng(seed)
    ar_full, ma_full = expand_polynomials(order, params)
    total = n + burn_in
    e = rng.normal(0.0, math.sqrt(params.sigma2), size=total)
    ma_part = lfilter(np.concatenate([[1.0], ma_full]), [1.0], e)
    w = lfilter([1.0], np.concatenate([[1.0], -ar_full]), ma_part + params.constant)
    w = w[burn_in:]
    if order.n_diff == 0:
        return w
    seeds = np.full(order.n_diff, float(initial_level))
    return integrate(w, seeds, order.d, order.D, order.s)[: n]
