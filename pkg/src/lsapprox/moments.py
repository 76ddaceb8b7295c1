"""Central moments of base and transformed operators, growth constants, weight functions.

Transformed moments are available by two independent routes: directly, by
pushing ``psi_x^k`` through :func:`~lsapprox.transform.transform_apply`, and
through the moment identity

    L_{n,lambda}(psi_x^k)(x) = (1/n) sum_p C(n,p) lambda^p (1-lambda)^(n-p) p^k / n^(k-1) L_p(psi_x^k)(x)

which only needs base moments.  Tests compare the two.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, EvaluationError, GrowthError, ParameterError, UnsupportedMomentError
from .functions import ScalarFunction, constant, cosh_weight_fn, monomial, psi
from .operators import Family, OperatorInstance, apply, compose_alpha, exponential_coefficient
from .transform import TransformedOperator, transform_apply
from .weights import binomial_weights

__all__ = [
    "GrowthConstants",
    "WeightFunctionG",
    "MgEstimate",
    "central_moment",
    "transformed_moment",
    "moment_identity",
    "moment_identity_first",
    "moment_identity_second",
    "sat_bound",
    "lemma2_sum_identity",
    "bernoulli_factor",
    "known_growth",
    "estimate_growth",
    "estimate_Mg",
    "check_condition_G",
    "cosh_weight",
    "quadratic_weight",
    "kantorovich_m2_sup",
]

MAX_UNBOUNDED_ORDER = 4


def central_moment(op: OperatorInstance, n: int, k: int, x: float) -> float:
    """``L_n(psi_x^k)(x)`` by direct summation or quadrature."""
    if k < 0 or int(k) != k:
        raise UnsupportedMomentError(f"moment order must be a nonnegative integer, got {k}")
    if k == 0:
        return 1.0
    if not op.I.bounded and k > MAX_UNBOUNDED_ORDER:
        raise UnsupportedMomentError(
            f"moments above order {MAX_UNBOUNDED_ORDER} are not supported on the unbounded domain of {op.family.value}"
        )
    return apply(op, n, psi(x, int(k), op.I), x)


def transformed_moment(t: TransformedOperator, n: int, k: int, x: float, method: str = "direct") -> float:
    """``L_{n,lambda_n}(psi_x^k)(x)``; ``method`` is ``"direct"`` or ``"identity"``."""
    if method == "identity":
        return moment_identity(t, n, k, x)
    if method != "direct":
        raise ParameterError(f"unknown method {method!r}")
    if k == 0:
        return transform_apply(t, n, constant(1.0, t.base.I), x)
    if not t.base.I.bounded and k > MAX_UNBOUNDED_ORDER:
        raise UnsupportedMomentError(f"moments above order {MAX_UNBOUNDED_ORDER} need a bounded domain")
    return transform_apply(t, n, psi(x, int(k), t.base.I), x)


def moment_identity(t: TransformedOperator, n: int, k: int, x: float) -> float:
    """Right-hand side of the general moment identity, from base moments only."""
    lam = t.schedule(n, x)
    w = binomial_weights(n, lam)
    acc = []
    for p in range(n + 1):
        if w[p] == 0.0:
            continue
        mp = central_moment(t.base, p, k, x)
        acc.append(w[p] * p**k / n ** (k - 1) * mp)
    return math.fsum(acc) / n


def moment_identity_first(t: TransformedOperator, n: int, x: float) -> float:
    """``lambda sum_{p<n} C(n-1,p) lambda^p (1-lambda)^(n-1-p) L_{p+1}(psi_x)(x)``."""
    lam = t.schedule(n, x)
    w = binomial_weights(n - 1, lam)
    return lam * math.fsum(w[p] * central_moment(t.base, p + 1, 1, x) for p in range(n) if w[p])


def moment_identity_second(t: TransformedOperator, n: int, x: float) -> float:
    """``(lambda/n) sum_{p<n} C(n-1,p) lambda^p (1-lambda)^(n-1-p) (p+1) L_{p+1}(psi_x^2)(x)``."""
    lam = t.schedule(n, x)
    w = binomial_weights(n - 1, lam)
    return lam / n * math.fsum(w[p] * (p + 1) * central_moment(t.base, p + 1, 2, x) for p in range(n) if w[p])


def sat_bound(op_value_psi1: float, op_value_psi2: float, op_value_one: float) -> bool:
    """Check ``|S(psi_x)(x)| <= (1 + S(1)(x)) sqrt(S(psi_x^2)(x))``."""
    if op_value_psi2 < 0:
        raise ParameterError(f"second moment must be nonnegative, got {op_value_psi2}")
    return abs(op_value_psi1) <= (1.0 + op_value_one) * math.sqrt(op_value_psi2) + 1e-12


def lemma2_sum_identity(n: int, s: float) -> float:
    """``s sum_{p<n} C(n-1,p) s^p (1-s)^(n-1-p) / (p+1)``, which equals (1-(1-s)^n)/n."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not 0.0 <= s <= 1.0:
        raise ParameterError(f"s must lie in [0, 1], got {s}")
    w = binomial_weights(n - 1, s)
    return s * math.fsum(w / np.arange(1, n + 1))


def bernoulli_factor(n: int, lam: float) -> float:
    """``(1 - (1 - lam)^n) / n``, the damping factor of first moments under the transform."""
    return -math.expm1(n * math.log1p(-lam)) / n if lam < 1 else 1.0 / n


# ---------------------------------------------------------------------------
# growth constants


class _Tabulated:
    """Exact-lookup map from grid points to values; other points are an error."""

    def __init__(self, xs: Sequence[float], values: Sequence[float]):
        self.xs = np.asarray(xs, dtype=float)
        self.values = np.asarray(values, dtype=float)

    def __call__(self, x: float) -> float:
        idx = np.flatnonzero(np.abs(self.xs - x) <= 1e-12 * (1 + abs(x)))
        if idx.size == 0:
            raise ConfigurationError(f"no growth value tabulated at x={x}")
        return float(self.values[idx[0]])


@dataclass(frozen=True)
class GrowthConstants:
    """Growth functions M1 (first moment) and M2 (second moment); either may be absent."""

    family: Family
    M1: Optional[Callable[[float], float]] = None
    M2: Optional[Callable[[float], float]] = None
    source: str = "closed-form"

    def m1(self, x: float) -> float:
        if self.M1 is None:
            raise ConfigurationError(f"no M1 growth available for {self.family.value}")
        return float(self.M1(x))

    def m2(self, x: float) -> float:
        if self.M2 is None:
            raise ConfigurationError(f"no M2 growth available for {self.family.value}")
        return float(self.M2(x))


def kantorovich_m2_sup(x: float) -> float:
    """Exact ``sup_n n K_n(psi_x^2)(x)`` using ``K_n(psi_x^2)(x) = ((n-1)a + 1/3)/(n+1)^2``, a = x(1-x).

    The real-variable maximiser is n* = (1/3 - a)/(1/3 - 3a) when a < 1/9;
    otherwise the sequence increases to its limit a.
    """
    a = x * (1.0 - x)
    g = lambda n: n * ((n - 1) * a + 1.0 / 3.0) / (n + 1) ** 2
    if a >= 1.0 / 9.0:
        return a
    n_star = (1.0 / 3.0 - a) / (1.0 / 3.0 - 3.0 * a)
    cands = {1, max(1, math.floor(n_star)), max(1, math.ceil(n_star))}
    return max(max(g(n) for n in cands), a)


def known_growth(op: OperatorInstance) -> GrowthConstants:
    """Closed-form (H1)/(H2) growth functions for the built-in families."""
    if op.is_exponential:
        p = exponential_coefficient(op)
        return GrowthConstants(op.family, M1=lambda x: 0.0, M2=p)
    if op.family is Family.BERNSTEIN_SCHURER:
        return GrowthConstants(op.family, M1=lambda x: x, M2=lambda x: x * (1.0 - x) + x)
    if op.family is Family.KANTOROVICH:
        return GrowthConstants(op.family, M1=lambda x: abs(1.0 - 2.0 * x) / 2.0, M2=kantorovich_m2_sup)
    raise ConfigurationError(f"no closed-form growth for {op.family.value}")  # pragma: no cover


def estimate_growth(
    op: OperatorInstance,
    which: str,
    x_grid: Sequence[float],
    n_max: int,
    headroom: float = 0.0,
) -> GrowthConstants:
    """Empirical ``sup_{n <= n_max}`` of ``n|L_n(psi_x)(x)|`` (H1) or ``n L_n(psi_x^2)(x)`` (H2)."""
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    if which not in ("H1", "H2"):
        raise ParameterError(f"which must be 'H1' or 'H2', got {which!r}")
    k = 1 if which == "H1" else 2
    sups = []
    for x in x_grid:
        vals = [n * abs(central_moment(op, n, k, x)) for n in range(1, n_max + 1)]
        sups.append(max(vals) * (1.0 + headroom))
    table = _Tabulated(x_grid, sups)
    if which == "H1":
        return GrowthConstants(op.family, M1=table, source="empirical")
    return GrowthConstants(op.family, M2=table, source="empirical")


# ---------------------------------------------------------------------------
# weight functions g


@dataclass(frozen=True)
class WeightFunctionG:
    """A strictly convex weight ``g >= c > 0`` with derivative, for C(I, g) estimates."""

    g: ScalarFunction
    c: float
    w: Optional[float] = None
    name: str = field(default="g")

    def __post_init__(self):
        if self.g.deriv1 is None:
            raise ParameterError("weight function needs a derivative")
        if not self.c > 0:
            raise ParameterError("weight lower bound c must be positive")

    def __call__(self, t):
        return self.g(t)

    def prime(self, x: float) -> float:
        return float(self.g.d1(x))

    def validate(self, grid: Sequence[float], margin: float = 0.0) -> None:
        """Check ``g >= c`` and strict midpoint convexity on consecutive grid triples."""
        pts = np.asarray(grid, dtype=float)
        vals = self.g(pts)
        if not np.all(np.isfinite(vals)):
            raise GrowthError(f"{self.name} is not finite on the probe grid")
        if np.any(vals < self.c):
            raise GrowthError(f"{self.name} drops below c={self.c} on the probe grid")
        a, b = pts[:-2:2], pts[2::2]
        mid = self.g((a + b) / 2)
        chord = (self.g(a) + self.g(b)) / 2
        if np.any(mid > chord - margin):
            raise GrowthError(f"{self.name} fails strict midpoint convexity on the probe grid")


def cosh_weight(w: float, domain=None) -> WeightFunctionG:
    """``g(t) = exp(w t) + exp(-w t)``."""
    base = cosh_weight_fn(w) if domain is None else cosh_weight_fn(w, domain)
    return WeightFunctionG(2.0 * base, c=2.0, w=abs(w), name=f"2cosh({w:g}x)")


def quadratic_weight(domain=None) -> WeightFunctionG:
    """``g(t) = t^2 + 1``."""
    e2 = monomial(2) if domain is None else monomial(2, domain)
    return WeightFunctionG(e2 + constant(1.0, e2.domain), c=1.0, w=None, name="e2+1")


def _check_integrable(op: OperatorInstance, w: Optional[float], x: float, p: int) -> None:
    if not w:
        return
    if op.family is Family.BASKAKOV and x > 0 and x / (1 + x) * math.exp(w / p) >= 1.0:
        raise GrowthError(f"exp({w:g}|t|) is not Baskakov-summable at x={x}, p={p}")
    if op.family is Family.POST_WIDDER and x > 0 and w >= p / x:
        raise GrowthError(f"exp({w:g}|t|) is not Post-Widder-integrable at x={x}, p={p}")


@dataclass(frozen=True)
class MgEstimate:
    """``max_{p <= p_max} p |L_p(g)(x) - g(x)|`` with a stabilisation diagnostic."""

    x: float
    value: float
    stabilized: bool
    sequence: tuple[float, ...]


def estimate_Mg(op: OperatorInstance, g: WeightFunctionG, x: float, p_max: int) -> MgEstimate:
    """Finite-range stand-in for ``M_g(x) = sup_p p |L_p(g)(x) - g(x)|``.

    ``stabilized`` holds when the spread of the last quarter of the sequence is
    within 5% of the running maximum; the true supremum is never claimed.
    """
    if p_max < 1:
        raise ParameterError("p_max must be >= 1")
    gx = float(g(x))
    seq = []
    for p in range(1, p_max + 1):
        _check_integrable(op, g.w, x, p)
        try:
            seq.append(p * abs(apply(op, p, g.g, x) - gx))
        except EvaluationError as exc:
            raise GrowthError(f"{g.name} is not integrable for {op.family.value}: {exc}") from exc
    arr = np.asarray(seq)
    tail = arr[-max(1, len(arr) // 4):]
    top = arr.max()
    stabilized = bool(top == 0.0 or (tail.max() - tail.min()) <= 0.05 * top)
    return MgEstimate(float(x), float(top), stabilized, tuple(seq))


def check_condition_G(op: OperatorInstance, g: WeightFunctionG, n: int, x: float, tol: float = 1e-12) -> list[int]:
    """Indices p in 0..n violating ``L_p(g_{p/n,x})(x) >= g(x)``; empty means (G) holds here."""
    gx = float(g(x))
    bad = []
    for p in range(n + 1):
        if p and g.w:
            _check_integrable(op, g.w * p / n, x, p)
        val = apply(op, p, compose_alpha(g.g, p / n, x), x)
        if val < gx - tol * (1 + abs(gx)):
            bad.append(p)
    return bad
