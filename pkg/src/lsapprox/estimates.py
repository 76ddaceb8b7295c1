"""Moduli of continuity and error bounds for transformed operators.

Each bound is reported as ``bound = base + constant * scaled``.  Bounds with
an explicit constant have ``scaled == 0``.  For bounds whose constant is only
known to exist (Ditzian-Totik K, weighted M, exponential M(f)), callers fit
the constant on one range of n with :func:`calibrate_constant` and check
dominance on a disjoint range with :meth:`ErrorBoundReport.with_constant`.

Grid moduli underestimate the true modulus.  Wherever a function carries a
closed-form modulus, :func:`omega` uses it instead of a grid.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    GrowthError,
    MetadataError,
    NeedsWindowError,
    ParameterError,
    UnsupportedFamilyError,
)
from .functions import Interval, ScalarFunction
from .moments import GrowthConstants, WeightFunctionG, bernoulli_factor, check_condition_G
from .operators import Family, exponential_coefficient
from .transform import TransformedOperator, transform_apply

__all__ = [
    "BoundKind",
    "ModulusEstimate",
    "ErrorBoundReport",
    "modulus",
    "dt_modulus",
    "omega",
    "omega_prime",
    "error_bound_pointwise",
    "error_bound_weighted",
    "exp_cosh_bound",
    "ditzian_totik_bound",
    "calibrate_constant",
    "local_window",
    "SLACK_REL",
    "SLACK_ABS",
]

SLACK_REL = 1e-6
SLACK_ABS = 1e-9
MAX_GRID = 200_001


class BoundKind(str, enum.Enum):
    OMEGA = "omega"
    DERIVATIVE = "derivative"
    DERIVATIVE_H1 = "derivative_H1"
    DITZIAN_TOTIK = "ditzian_totik"
    WEIGHTED_1DIS = "weighted_1dis"
    WEIGHTED_2DIS = "weighted_2dis"
    EXP_COSH = "exp_cosh"


@dataclass(frozen=True)
class ModulusEstimate:
    delta: float
    value: float
    grid_step: float
    lower_bound: bool = True  # grid estimates never exceed the true modulus


@dataclass(frozen=True)
class ErrorBoundReport:
    x: float
    n: int
    actual_error: float
    bound: float
    bound_kind: BoundKind
    base: float = 0.0
    scaled: float = 0.0
    constant: float = 0.0
    warnings: tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return self.actual_error <= self.bound * (1.0 + SLACK_REL) + SLACK_ABS

    def with_constant(self, c: float) -> "ErrorBoundReport":
        return replace(self, constant=float(c), bound=self.base + float(c) * self.scaled)


# ---------------------------------------------------------------------------
# moduli


def _grid(a: float, b: float, step: float) -> tuple[np.ndarray, float]:
    m = min(MAX_GRID, int(math.ceil((b - a) / step)) + 1)
    m = max(m, 2)
    return np.linspace(a, b, m), (b - a) / (m - 1)


def _grid_modulus(F: Callable, delta: float, a: float, b: float, step: float) -> tuple[float, float]:
    u, h = _grid(a, b, step)
    vals = np.asarray(F(u), dtype=float)
    best = 0.0
    jmax = min(len(u) - 1, int(math.floor(delta / h + 1e-9)))
    for j in range(1, jmax + 1):
        best = max(best, float(np.max(np.abs(vals[j:] - vals[:-j]))))
    # pairs exactly delta apart catch the sup when delta is not a grid multiple
    if delta < b - a:
        left = u[u + delta <= b]
        right = u[u - delta >= a]
        if left.size:
            best = max(best, float(np.max(np.abs(np.asarray(F(left + delta)) - np.asarray(F(left))))))
        if right.size:
            best = max(best, float(np.max(np.abs(np.asarray(F(right)) - np.asarray(F(right - delta))))))
    return best, h


def modulus(f: ScalarFunction, delta: float, interval: Interval, step: float) -> ModulusEstimate:
    """Grid estimate of ``sup |f(u) - f(v)|`` over ``|u - v| <= delta`` in ``interval``."""
    if not delta > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    if not interval.bounded:
        raise NeedsWindowError(f"modulus over unbounded {interval} needs an explicit window")
    if not 0 < step <= delta / 16:
        raise ParameterError(f"grid step {step} must be positive and at most delta/16 = {delta / 16}")
    value, h = _grid_modulus(f, delta, interval.lo, interval.hi, step)
    return ModulusEstimate(float(delta), value, h)


def dt_modulus(
    f: ScalarFunction,
    delta: float,
    phi: Callable[[np.ndarray], np.ndarray],
    interval: Interval,
    step: float,
    domain: Optional[Interval] = None,
    h_points: int = 33,
) -> ModulusEstimate:
    """Grid estimate of ``sup |f(x - h phi(x)) - 2 f(x) + f(x + h phi(x))|`` over ``0 <= h <= delta``.

    ``x`` ranges over a grid of ``interval``; a pair ``(x, h)`` is admissible
    when both ``x +- h phi(x)`` lie in ``domain`` (default: ``interval``).
    """
    if not delta > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    if not interval.bounded:
        raise NeedsWindowError(f"Ditzian-Totik modulus over unbounded {interval} needs a window")
    if not step > 0:
        raise ParameterError("grid step must be positive")
    dom = interval if domain is None else domain
    xs, hx = _grid(interval.lo, interval.hi, step)
    ph = np.asarray(phi(xs), dtype=float)
    if np.any(ph < 0):
        raise ParameterError("phi must be nonnegative on the interval")
    hs = np.linspace(0.0, delta, h_points)
    left = xs[:, None] - hs[None, :] * ph[:, None]
    right = xs[:, None] + hs[None, :] * ph[:, None]
    ok = (left >= dom.lo) & (right <= dom.hi)
    fx = np.asarray(f(xs), dtype=float)[:, None]
    safe_l = np.where(ok, left, xs[:, None])
    safe_r = np.where(ok, right, xs[:, None])
    d2 = np.abs(np.asarray(f(safe_l)) - 2 * fx + np.asarray(f(safe_r)))
    value = float(np.max(np.where(ok, d2, 0.0)))
    return ModulusEstimate(float(delta), value, hx)


def omega(f: ScalarFunction, delta: float, interval: Interval, step: Optional[float] = None) -> float:
    """First modulus of f on ``interval``: closed form if known, grid otherwise."""
    if delta <= 0:
        return 0.0
    if f.modulus is not None:
        v = f.modulus(delta, interval)
        if v is not None:
            return float(v)
    if not interval.bounded:
        raise NeedsWindowError(f"no closed-form modulus for {f.name} on unbounded {interval}")
    return _grid_modulus(f, delta, interval.lo, interval.hi, step or delta / 16)[0]


def omega_prime(f: ScalarFunction, delta: float, interval: Interval, step: Optional[float] = None) -> float:
    """First modulus of f' on ``interval``."""
    if f.deriv1 is None:
        raise MetadataError(f"{f.name} has no derivative metadata")
    if delta <= 0:
        return 0.0
    if f.deriv1_modulus is not None:
        v = f.deriv1_modulus(delta, interval)
        if v is not None:
            return float(v)
    if not interval.bounded:
        raise NeedsWindowError(f"no closed-form modulus for {f.name}' on unbounded {interval}")
    return _grid_modulus(f.d1, delta, interval.lo, interval.hi, step or delta / 16)[0]


# ---------------------------------------------------------------------------
# bounds


def local_window(I: Interval, x: float, radius: float = 1.0) -> Interval:
    """``[x - radius, x + radius]`` clipped to I."""
    return Interval(max(I.lo, x - radius), min(I.hi, x + radius))


def _actual(t: TransformedOperator, n: int, f: ScalarFunction, x: float) -> float:
    return abs(transform_apply(t, n, f, x) - float(f(x)))


def error_bound_pointwise(
    t: TransformedOperator,
    f: ScalarFunction,
    n: int,
    x: float,
    constants: GrowthConstants,
    kind: BoundKind | str,
    window: Optional[Interval] = None,
) -> ErrorBoundReport:
    """Pointwise estimates driven by the second-moment growth M2 (and M1 for ``derivative_H1``)."""
    kind = BoundKind(kind)
    if kind not in (BoundKind.OMEGA, BoundKind.DERIVATIVE, BoundKind.DERIVATIVE_H1):
        raise ParameterError(f"{kind.value} is not a pointwise bound kind")
    region = t.base.I if window is None else window
    lam = t.schedule(n, x)
    delta = math.sqrt(lam * constants.m2(x) / n)
    if kind is BoundKind.OMEGA:
        base = 2.0 * omega(f, delta, region)
    else:
        if f.deriv1 is None:
            raise MetadataError(f"{kind.value} bound needs f' but {f.name} has none")
        fp = abs(float(f.d1(x)))
        wp = omega_prime(f, delta, region)
        if kind is BoundKind.DERIVATIVE:
            base = 2.0 * (fp + wp) * delta
        else:
            base = fp * constants.m1(x) * bernoulli_factor(n, lam) + 2.0 * wp * delta
    return ErrorBoundReport(float(x), int(n), _actual(t, n, f, x), base, kind, base=base)


def _check_in_weighted_space(f: ScalarFunction, g: WeightFunctionG, I: Interval) -> None:
    hi = I.hi if math.isfinite(I.hi) else max(I.lo, 0.0) + 50.0
    lo = I.lo if math.isfinite(I.lo) else min(I.hi, 0.0) - 50.0
    pts = np.linspace(lo, hi, 401)
    ratio = np.abs(np.asarray(f(pts), dtype=float)) / np.asarray(g(pts), dtype=float)
    if not np.all(np.isfinite(ratio)):
        raise GrowthError(f"|{f.name}|/{g.name} is not finite on the probe grid")
    if not I.bounded:
        # unbounded I: the ratio must not be growing at the far end of the probe grid
        tail = ratio[-40:] if math.isinf(I.hi) else ratio[:40]
        core = ratio[40:-40]
        if tail.max() > 10.0 * max(core.max(), 1e-300) and tail.max() > 1e-8:
            raise GrowthError(f"{f.name} does not appear to lie in C(I, {g.name})")


def error_bound_weighted(
    t: TransformedOperator,
    f: ScalarFunction,
    g: WeightFunctionG,
    n: int,
    x: float,
    constants: GrowthConstants,
    Mg_value: float,
    kind: BoundKind | str = BoundKind.WEIGHTED_2DIS,
    M: float = 1.0,
    window: Optional[Interval] = None,
) -> ErrorBoundReport:
    """Weighted-space estimates for f in C(I, g).

    ``weighted_1dis``:  2 w(f, d) + M [lambda Mg/n + 2 |g'(x)| d],  d = sqrt(lambda M2/n)
    ``weighted_2dis``:  2 w(f, d) + M [lambda Mg + |g'(x)| M1 (1 - (1-lambda)^n)] / n
    """
    kind = BoundKind(kind)
    if kind not in (BoundKind.WEIGHTED_1DIS, BoundKind.WEIGHTED_2DIS):
        raise ParameterError(f"{kind.value} is not a weighted bound kind")
    if Mg_value < 0:
        raise ParameterError("M_g must be nonnegative")
    _check_in_weighted_space(f, g, t.base.I)
    region = window if window is not None else t.base.I if t.base.I.bounded else local_window(t.base.I, x)
    lam = t.schedule(n, x)
    delta = math.sqrt(lam * constants.m2(x) / n)
    base = 2.0 * omega(f, delta, region)
    gp = abs(g.prime(x))
    if kind is BoundKind.WEIGHTED_1DIS:
        scaled = lam * Mg_value / n + 2.0 * gp * delta
    else:
        scaled = (lam * Mg_value + gp * constants.m1(x) * n * bernoulli_factor(n, lam)) / n
    warnings = ()
    bad = check_condition_G(t.base, g, n, x)
    if bad:
        warnings = (f"condition (G) fails at p={bad[:5]} for x={x}, n={n}",)
    return ErrorBoundReport(
        float(x), int(n), _actual(t, n, f, x), base + M * scaled, kind, base, scaled, float(M), warnings
    )


def exp_cosh_bound(
    t: TransformedOperator,
    f: ScalarFunction,
    w: float,
    K_f: float,
    n: int,
    x: float,
    M: float = 1.0,
    window: Optional[Interval] = None,
) -> ErrorBoundReport:
    """``2 w(f, sqrt(lambda p/n)) + M w^2 lambda p(x) cosh(w x) / n`` for exponential families.

    The modulus is taken over ``window`` (default :func:`local_window`), a
    compact piece of I; this can only shrink the bound.
    """
    if not t.base.is_exponential:
        raise UnsupportedFamilyError(f"{t.base.family.value} is not an exponential operator")
    I = t.base.I
    lo = I.lo if math.isfinite(I.lo) else x - 20.0
    hi = I.hi if math.isfinite(I.hi) else x + 20.0
    pts = np.linspace(lo, hi, 401)
    if np.any(np.abs(np.asarray(f(pts))) > K_f * (np.exp(w * pts) + np.exp(-w * pts)) * (1 + 1e-12)):
        raise GrowthError(f"|{f.name}| exceeds {K_f:g}(exp({w:g}x)+exp(-{w:g}x)) on the probe grid")
    p = exponential_coefficient(t.base)(x)
    lam = t.schedule(n, x)
    region = local_window(I, x) if window is None else window
    base = 2.0 * omega(f, math.sqrt(lam * p / n), region)
    scaled = w * w * lam * p * math.cosh(w * x) / n
    return ErrorBoundReport(
        float(x), int(n), _actual(t, n, f, x), base + M * scaled, BoundKind.EXP_COSH, base, scaled, float(M)
    )


def ditzian_totik_bound(
    t: TransformedOperator,
    f: ScalarFunction,
    n: int,
    x_grid: Sequence[float],
    constants: GrowthConstants,
    K: float = 1.0,
    variant: str = "general",
    step: Optional[float] = None,
) -> ErrorBoundReport:
    """Sup-norm estimate on the half line, with the modulus weighted by ``sqrt(M2)``.

    ``general``:       K ( w2(f, 1/sqrt(n)) + 1/n )
    ``affine``:        K w2(f, sqrt(||lambda_n||/n))      (base preserves e_1)
    ``small_lambda``:  K ( w2(f, sqrt(||lambda_n||)) + ||lambda_n|| )

    The sup is taken over ``x_grid`` and the modulus over its hull, so
    ``constants.M2`` must be evaluable between grid points.
    """
    if t.base.family not in (Family.SZASZ_MIRAKJAN, Family.BASKAKOV):
        raise UnsupportedFamilyError("the Ditzian-Totik estimate is run on Szasz-Mirakjan and Baskakov only")
    xs = np.asarray(x_grid, dtype=float)
    errs = np.array([_actual(t, n, f, x) for x in xs])
    m2 = np.vectorize(constants.m2, otypes=[float])
    if np.any(m2(xs) < 0):
        raise ConfigurationError("M2 must be nonnegative on J")
    phi = lambda v: np.sqrt(np.maximum(m2(v), 0.0))
    hull = Interval(float(xs.min()), float(xs.max()))
    step = step or hull.length / 400
    lam_norm = max(t.schedule(n, float(x)) for x in xs)
    if variant == "general":
        delta, extra = 1.0 / math.sqrt(n), 1.0 / n
    elif variant == "affine":
        delta, extra = math.sqrt(lam_norm / n), 0.0
    elif variant == "small_lambda":
        delta, extra = math.sqrt(lam_norm), lam_norm
    else:
        raise ParameterError(f"unknown Ditzian-Totik variant {variant!r}")
    w2 = dt_modulus(f, delta, phi, hull, step, domain=t.base.I).value if delta > 0 else 0.0
    scaled = w2 + extra
    i = int(np.argmax(errs))
    return ErrorBoundReport(
        float(xs[i]), int(n), float(errs[i]), K * scaled, BoundKind.DITZIAN_TOTIK, 0.0, scaled, float(K)
    )


def calibrate_constant(reports: Iterable[ErrorBoundReport], headroom: float = 1.5, floor: float = 1e-12) -> float:
    """Smallest constant making every report dominate, times ``headroom``."""
    need = 0.0
    for r in reports:
        if r.scaled > 0:
            need = max(need, (r.actual_error - r.base) / r.scaled)
        elif r.actual_error > r.base * (1 + SLACK_REL) + SLACK_ABS:
            raise ConfigurationError(
                f"{r.bound_kind.value} at x={r.x}, n={r.n}: error exceeds the constant-free part and no scaled term"
            )
    return max(need * headroom, floor)
