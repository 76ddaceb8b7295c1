"""Shape-preservation checks: monotonicity, convexity, Lipschitz classes and orderings in n and lambda.

All checks are discrete: a map is sampled on a grid and judged with a fixed
slack.  Failing verdicts always carry a reproducible witness.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import ParameterError
from .functions import Interval, ScalarFunction, polynomial
from .operators import OperatorInstance, apply
from .transform import LambdaSchedule, TransformedOperator, profile_terms, transform_apply

__all__ = [
    "ShapeVerdict",
    "HypothesisWarning",
    "NOT_APPLICABLE",
    "SHAPE_SLACK",
    "ORDER_SLACK",
    "check_increasing",
    "check_convex",
    "estimate_lipschitz",
    "check_decreasing_in_n",
    "sandwich_check",
    "p_monotone",
    "lambda_monotonicity_check",
    "find_lambda_order_violation",
    "transformed_map",
    "random_convex_polynomials",
    "random_increasing_polynomials",
    "preservation_sweep",
]

SHAPE_SLACK = 1e-9
ORDER_SLACK = 1e-10
NOT_APPLICABLE = "not-applicable"


class HypothesisWarning(UserWarning):
    """A hypothesis of a shape statement was not confirmed on the probes."""


@dataclass(frozen=True)
class ShapeVerdict:
    property: str
    holds: bool
    witness: Optional[tuple[tuple[float, ...], tuple[float, ...]]]
    margin: float
    warnings: tuple[str, ...] = field(default=())


def _sample(h: Callable, grid: Sequence[float], min_points: int) -> tuple[np.ndarray, np.ndarray]:
    xs = np.asarray(grid, dtype=float)
    if xs.size < min_points:
        raise ParameterError(f"grid needs at least {min_points} points")
    if np.any(np.diff(xs) <= 0):
        raise ParameterError("grid must be strictly increasing")
    return xs, np.array([float(h(x)) for x in xs])


def check_increasing(h: Callable[[float], float], grid: Sequence[float]) -> ShapeVerdict:
    xs, v = _sample(h, grid, 3)
    d = np.diff(v)
    i = int(np.argmin(d))
    ok = bool(d[i] >= -SHAPE_SLACK)
    wit = None if ok else ((xs[i], xs[i + 1]), (v[i], v[i + 1]))
    return ShapeVerdict("increasing", ok, wit, float(d[i]))


def check_convex(h: Callable[[float], float], grid: Sequence[float]) -> ShapeVerdict:
    """Second differences on the grid, normalised to a uniform step."""
    xs, v = _sample(h, grid, 3)
    hl, hr = np.diff(xs)[:-1], np.diff(xs)[1:]
    mean = (xs[-1] - xs[0]) / (len(xs) - 1)
    # reduces to v[i-1] - 2 v[i] + v[i+1] on uniform grids
    d2 = (hr * v[:-2] - (hl + hr) * v[1:-1] + hl * v[2:]) / mean
    i = int(np.argmin(d2))
    ok = bool(d2[i] >= -SHAPE_SLACK)
    wit = None if ok else (tuple(xs[i : i + 3]), tuple(v[i : i + 3]))
    return ShapeVerdict("convex", ok, wit, float(d2[i]))


def estimate_lipschitz(h: Callable[[float], float], alpha: float, grid: Sequence[float]) -> float:
    """``max |h(u) - h(v)| / |u - v|^alpha`` over grid pairs; a lower bound of the true constant."""
    if not 0 < alpha <= 1:
        raise ParameterError("alpha must lie in (0, 1]")
    xs, v = _sample(h, grid, 2)
    dx = np.abs(xs[:, None] - xs[None, :])
    dv = np.abs(v[:, None] - v[None, :])
    iu = np.triu_indices(len(xs), 1)
    return float(np.max(dv[iu] / dx[iu] ** alpha))


def transformed_map(t: TransformedOperator, n: int, f: ScalarFunction) -> Callable[[float], float]:
    """``x -> L_{n,lambda_n}(f)(x)``."""
    return lambda x: transform_apply(t, n, f, x)


def _const_schedule(lam) -> LambdaSchedule:
    if isinstance(lam, LambdaSchedule):
        if not lam.n_free:
            raise ParameterError(f"schedule {lam.label} depends on n; a fixed function of x is required")
        return lam
    if callable(lam):
        return LambdaSchedule.of_x(lam)
    return LambdaSchedule.constant(lam)


def _hypothesis(msg: str) -> str:
    warnings.warn(msg, HypothesisWarning, stacklevel=3)
    return msg


def check_decreasing_in_n(
    base: OperatorInstance,
    lambda_const: Union[float, Callable[[float], float], LambdaSchedule],
    f: ScalarFunction,
    x: float,
    n_range: Sequence[int],
) -> ShapeVerdict:
    """``L_{n+1,lambda}(f)(x) <= L_{n,lambda}(f)(x)`` for consecutive n in ``n_range``."""
    t = TransformedOperator(base, _const_schedule(lambda_const))
    ns = sorted(set(int(n) for n in n_range))
    if ns[0] < 1:
        raise ParameterError("n_range must start at 1 or later")
    notes = []
    basevals = [apply(base, n, f, x) for n in ns]
    if any(b > a + ORDER_SLACK for a, b in zip(basevals, basevals[1:])):
        notes.append(_hypothesis(f"L_n({f.name})({x:g}) is not decreasing in n for {base.family.value}"))
    vals = [transform_apply(t, n, f, x) for n in ns]
    steps = [(b - a, i) for i, (a, b) in enumerate(zip(vals, vals[1:]))]
    worst, i = max(steps) if steps else (0.0, 0)
    ok = worst <= ORDER_SLACK
    wit = None if ok else ((float(ns[i]), float(ns[i + 1])), (vals[i], vals[i + 1]))
    return ShapeVerdict("decreasing_in_n", ok, wit, float(-worst), tuple(notes))


def sandwich_check(
    base: OperatorInstance,
    lambda_const: Union[float, Callable[[float], float], LambdaSchedule],
    f: ScalarFunction,
    x: float,
    n: int,
) -> bool:
    """``f <= L_{n+1,lambda}(f) <= L_{n,lambda}(f) <= lambda L_1(f) + (1 - lambda) f`` at x."""
    sched = _const_schedule(lambda_const)
    t = TransformedOperator(base, sched)
    fx = float(f(x))
    b1, bn, bn1 = apply(base, 1, f, x), apply(base, n, f, x), apply(base, n + 1, f, x)
    if not (fx <= bn1 + ORDER_SLACK and bn1 <= bn + ORDER_SLACK):
        _hypothesis(f"f <= L_(n+1)(f) <= L_n(f) fails for {base.family.value} at x={x:g}, n={n}")
    lam = sched(n, x)
    chain = [fx, transform_apply(t, n + 1, f, x), transform_apply(t, n, f, x), lam * b1 + (1 - lam) * fx]
    return all(b >= a - ORDER_SLACK for a, b in zip(chain, chain[1:]))


def p_monotone(base: OperatorInstance, n: int, f: ScalarFunction, x: float, tol: float = 1e-12) -> bool:
    """``L_p(f_{p/n,x})(x) <= L_{p+1}(f_{(p+1)/n,x})(x)`` for every p = 0..n-1."""
    a = profile_terms(base, n, f, x)
    return bool(np.all(np.diff(a) >= -tol * (1 + np.abs(a[:-1]))))


def _lam_value(lam, n: int, x: float) -> float:
    if isinstance(lam, LambdaSchedule):
        return lam(n, x)
    v = float(lam(x)) if callable(lam) else float(lam)
    if not 0.0 <= v <= 1.0:
        raise ParameterError(f"lambda value {v} outside [0, 1]")
    return v


def lambda_monotonicity_check(base, n: int, f: ScalarFunction, x: float, lambda_lo, lambda_hi):
    """``L_{n,lo}(f)(x) <= L_{n,hi}(f)(x)`` where the p-monotone precondition holds.

    Returns ``True``/``False``, or :data:`NOT_APPLICABLE` when the precondition
    fails at ``(n, x)``.
    """
    lo, hi = _lam_value(lambda_lo, n, x), _lam_value(lambda_hi, n, x)
    if lo > hi:
        raise ParameterError(f"lambda_lo={lo} exceeds lambda_hi={hi}")
    if not p_monotone(base, n, f, x):
        return NOT_APPLICABLE
    v_lo = transform_apply(TransformedOperator(base, LambdaSchedule.constant(lo)), n, f, x)
    v_hi = transform_apply(TransformedOperator(base, LambdaSchedule.constant(hi)), n, f, x)
    return bool(v_lo <= v_hi + ORDER_SLACK)


def find_lambda_order_violation(
    base: OperatorInstance, n: int, f: ScalarFunction, lambda_lo: float, lambda_hi: float, grid: Sequence[float]
) -> ShapeVerdict:
    """Search ``grid`` for x with ``L_{n,lo}(f)(x) > L_{n,hi}(f)(x)``; ``holds`` means no violation."""
    t_lo = TransformedOperator(base, LambdaSchedule.constant(lambda_lo))
    t_hi = TransformedOperator(base, LambdaSchedule.constant(lambda_hi))
    best, wit = -math.inf, None
    for x in grid:
        a, b = transform_apply(t_lo, n, f, x), transform_apply(t_hi, n, f, x)
        if a - b > best:
            best, wit = a - b, ((float(x),), (a, b))
    ok = best <= ORDER_SLACK
    return ShapeVerdict("lambda_monotone", ok, None if ok else wit, float(-best))


# ---------------------------------------------------------------------------
# random probes on [0, 1]


def _bernstein_basis_poly(coefs: np.ndarray) -> np.polynomial.Polynomial:
    """Power-basis form of ``sum_k c_k C(m,k) t^k (1-t)^(m-k)``."""
    m = len(coefs) - 1
    t = np.polynomial.Polynomial([0.0, 1.0])
    out = np.polynomial.Polynomial([0.0])
    for k, c in enumerate(coefs):
        out = out + c * math.comb(m, k) * t**k * (1 - t) ** (m - k)
    return out


def random_convex_polynomials(
    count: int, seed: int, degree: int = 5, domain: Interval = Interval(0.0, 1.0)
) -> list[ScalarFunction]:
    """Polynomials convex on [0, 1]: the second derivative has nonnegative Bernstein coefficients."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        d2 = _bernstein_basis_poly(rng.uniform(0.05, 2.0, degree - 1))
        P = d2.integ(2, k=[rng.uniform(-1, 1), rng.uniform(-1, 1)])
        out.append(polynomial(P.coef, domain, name=f"cvx{i}"))
    return out


def random_increasing_polynomials(
    count: int, seed: int, degree: int = 5, domain: Interval = Interval(0.0, 1.0)
) -> list[ScalarFunction]:
    """Polynomials increasing on [0, 1]: the derivative has nonnegative Bernstein coefficients."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        d1 = _bernstein_basis_poly(rng.uniform(0.0, 2.0, degree))
        P = d1.integ(1, k=[rng.uniform(-1, 1)])
        out.append(polynomial(P.coef, domain, name=f"inc{i}"))
    return out


def preservation_sweep(
    base: OperatorInstance,
    functions: Sequence[ScalarFunction],
    n_values: Sequence[int],
    lambdas: Sequence[float],
    grid: Sequence[float],
    prop: str,
) -> list[tuple[str, int, float, ShapeVerdict]]:
    """Apply ``check_convex`` or ``check_increasing`` to every ``L_{n,lambda}(f)``."""
    check = {"convex": check_convex, "increasing": check_increasing}[prop]
    out = []
    for f, n, lam in itertools.product(functions, n_values, lambdas):
        t = TransformedOperator(base, LambdaSchedule.constant(lam))
        out.append((f.name, int(n), float(lam), check(transformed_map(t, n, f), grid)))
    return out
