"""Map unconstrained vectors onto stationary AR coefficient vectors and back.

Each unconstrained value is squashed into a partial autocorrelation in
(-1, 1) with ``tanh``; the Durbin-Levinson recursion then turns the
partial autocorrelations into coefficients ``phi`` of ``1 - sum phi_i B^i``,
whose roots are guaranteed to lie outside the unit circle.
"""

from __future__ import annotations

import numpy as np


def pacf_to_ar(pacf) -> np.ndarray:
    r = np.asarray(pacf, dtype=float)
    phi = np.zeros(0)
    for k, rk in enumerate(r):
        nxt = np.empty(k + 1)
        nxt[:k] = phi - rk * phi[::-1]
        nxt[k] = rk
        phi = nxt
    return phi


def ar_to_pacf(phi) -> np.ndarray:
    """Step-down recursion; raises ``ValueError`` if ``phi`` is not stationary."""
    phi = np.asarray(phi, dtype=float).copy()
    p = phi.size
    r = np.empty(p)
    for k in range(p - 1, -1, -1):
        rk = phi[k]
        if not abs(rk) < 1.0:
            raise ValueError("coefficients are not stationary (partial autocorrelation outside (-1, 1))")
        r[k] = rk
        if k:
            head = phi[:k]
            phi = (head + rk * head[::-1]) / (1.0 - rk * rk)
    return r


def stationarity_transform(unconstrained) -> np.ndarray:
    """Unconstrained reals to stationary AR coefficients."""
    return pacf_to_ar(np.tanh(np.asarray(unconstrained, dtype=float)))


def inverse_stationarity_transform(coefficients) -> np.ndarray:
    return np.arctanh(ar_to_pacf(coefficients))


def invertible_transform(unconstrained) -> np.ndarray:
    """Unconstrained reals to MA coefficients ``theta`` of ``1 + sum theta_i B^i`` with roots outside the unit circle."""
    return -stationarity_transform(unconstrained)


def inverse_invertible_transform(coefficients) -> np.ndarray:
    return inverse_stationarity_transform(-np.asarray(coefficients, dtype=float))


def is_stationary(phi) -> bool:
    """Root check for ``1 - sum phi_i z^i`` independent of the recursion above."""
    phi = np.asarray(phi, dtype=float)
    if phi.size == 0 or not np.any(phi):
        return True
    # numpy.roots wants the highest power first
    poly = np.concatenate([-phi[::-1], [1.0]])
    roots = np.roots(np.trim_zeros(poly, "f"))
    return bool(np.all(np.abs(roots) > 1.0))
