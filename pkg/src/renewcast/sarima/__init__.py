from renewcast.sarima.model import (
    FittedSarima,
    ForecastResult,
    SarimaOrder,
    SarimaParams,
    css_loglik,
    css_residuals,
    expand_polynomials,
    fit,
    fitted_values,
    forecast,
    information_criterion,
    psi_weights,
    simulate,
)
from renewcast.sarima.optimize import SimplexResult, nelder_mead
from renewcast.sarima.selection import GridSearchResult, LeaderboardEntry, OrderGrid, grid_search
from renewcast.sarima.transform import (
    inverse_stationarity_transform,
    is_stationary,
    stationarity_transform,
)

__all__ = [
    "FittedSarima",
    "ForecastResult",
    "GridSearchResult",
    "LeaderboardEntry",
    "OrderGrid",
    "SarimaOrder",
    "SarimaParams",
    "SimplexResult",
    "css_loglik",
    "css_residuals",
    "expand_polynomials",
    "fit",
    "fitted_values",
    "forecast",
    "grid_search",
    "information_criterion",
    "inverse_stationarity_transform",
    "is_stationary",
    "nelder_mead",
    "psi_weights",
    "simulate",
    "stationarity_transform",
]
