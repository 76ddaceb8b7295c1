"""Probability weights behind the discrete operators.

Binomial weights follow the multiplicative recurrence
``w[k+1] = w[k] * (n-k)/(k+1) * x/(1-x)``.  The recurrence is started from
the endpoint with the larger endpoint mass, which keeps the starting value
representable (it is at least 2**-n) for every n up to the log-gamma cutoff.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import stats
from scipy.special import gammaln

from .errors import ParameterError

LOGGAMMA_CUTOFF = 1000


def binomial_weights(n: int, x: float) -> np.ndarray:
    """Return ``C(n,k) x^k (1-x)^(n-k)`` for ``k = 0..n``."""
    if n < 0:
        raise ParameterError(f"binomial order must be nonnegative, got {n}")
    if not 0.0 <= x <= 1.0:
        raise ParameterError(f"binomial parameter must lie in [0, 1], got {x}")
    w = np.zeros(n + 1)
    if x == 0.0:
        w[0] = 1.0
        return w
    if x == 1.0:
        w[n] = 1.0
        return w
    if n > LOGGAMMA_CUTOFF:
        k = np.arange(n + 1)
        logw = (
            gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
            + k * math.log(x) + (n - k) * math.log1p(-x)
        )
        return np.exp(logw)
    if x <= 0.5:
        ratio = x / (1.0 - x)
        w[0] = (1.0 - x) ** n
        for k in range(n):
            w[k + 1] = w[k] * (n - k) / (k + 1) * ratio
    else:
        ratio = (1.0 - x) / x
        w[n] = x**n
        for k in range(n, 0, -1):
            w[k - 1] = w[k] * k / (n - k + 1) * ratio
    return w


def _window(dist, tail: float, pad: int) -> tuple[int, int]:
    lo = int(dist.ppf(tail)) - pad
    hi = int(dist.isf(tail)) + pad
    return max(lo, 0), hi


def poisson_window(mean: float, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Integer support window and Poisson(mean) weights with outside mass below ``tol``.

    The window is padded by a few standard deviations past the quantile cut so
    that terms multiplied by test functions of moderate exponential growth are
    still negligible at the edge.
    """
    if mean == 0.0:
        return np.array([0]), np.array([1.0])
    dist = stats.poisson(mean)
    pad = 10 + int(6 * math.sqrt(mean))
    lo, hi = _window(dist, tol * 1e-3, pad)
    k = np.arange(lo, hi + 1)
    return k, dist.pmf(k)


def negbinom_window(n: int, x: float, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Weights ``C(n+k-1,k) x^k / (1+x)^(n+k)`` on a window with outside mass below ``tol``."""
    if x == 0.0:
        return np.array([0]), np.array([1.0])
    dist = stats.nbinom(n, 1.0 / (1.0 + x))
    sd = math.sqrt(n * x * (1.0 + x))
    pad = 10 + int(6 * sd)
    lo, hi = _window(dist, tol * 1e-3, pad)
    k = np.arange(lo, hi + 1)
    return k, dist.pmf(k)
