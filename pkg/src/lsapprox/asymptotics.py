"""Voronovskaja-type limits of the scaled residual n(L_{n,lambda_n}(f)(x) - f(x)).

The reference limit is ``lambda(x) alpha(x)/2 f''(x) + beta(x) f'(x)`` where
``alpha`` and ``beta`` are the limits of ``n L_n(psi_x^2)(x)`` and
``n L_n(psi_x)(x)``.  Observed residuals are extrapolated assuming a leading
``1/n`` correction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import MetadataError, ParameterError, UnsupportedFamilyError
from .functions import ScalarFunction
from .moments import central_moment
from .operators import Family, OperatorInstance, exponential_coefficient
from .transform import TransformedOperator, transform_apply

__all__ = [
    "VoronovskajaSpec",
    "RateReport",
    "MomentAudit",
    "voronovskaja_spec",
    "residual_sequence",
    "voronovskaja_target",
    "richardson",
    "rate_check",
    "moment_audit",
    "gap_trend_ok",
]


@dataclass(frozen=True)
class VoronovskajaSpec:
    alpha: Callable[[float], float]
    beta: Callable[[float], float]
    q: int = 4
    lambda_limit: Callable[[float], float] = lambda x: 1.0

    def __post_init__(self):
        if self.q <= 2 or self.q % 2:
            raise ParameterError(f"vanishing-moment order q must be an even integer > 2, got {self.q}")


def voronovskaja_spec(op: OperatorInstance, lambda_limit: Callable[[float], float] | float = 1.0) -> VoronovskajaSpec:
    """Moment limits of the built-in families, with q = 4."""
    lam = (lambda x, c=float(lambda_limit): c) if not callable(lambda_limit) else lambda_limit
    if op.is_exponential:
        return VoronovskajaSpec(exponential_coefficient(op), lambda x: 0.0, 4, lam)
    if op.family is Family.BERNSTEIN_SCHURER:
        return VoronovskajaSpec(lambda x: x * (1.0 - x), lambda x: x, 4, lam)
    if op.family is Family.KANTOROVICH:
        return VoronovskajaSpec(lambda x: x * (1.0 - x), lambda x: (1.0 - 2.0 * x) / 2.0, 4, lam)
    raise UnsupportedFamilyError(op.family.value)  # pragma: no cover


def residual_sequence(
    t: TransformedOperator, f: ScalarFunction, x: float, n_list: Sequence[int]
) -> list[tuple[int, float]]:
    """``[(n, n (L_{n,lambda_n}(f)(x) - f(x)))]`` for increasing ``n_list``."""
    ns = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ParameterError("n_list must be strictly increasing")
    fx = float(f(x))
    out = []
    for n in ns:
        r = n * (transform_apply(t, n, f, x) - fx)
        if not math.isfinite(r):
            raise ParameterError(f"non-finite residual at n={n}")
        out.append((n, r))
    return out


def voronovskaja_target(spec: VoronovskajaSpec, f: ScalarFunction, x: float) -> float:
    """``lambda(x) alpha(x) f''(x) / 2 + beta(x) f'(x)``."""
    if f.deriv1 is None or f.deriv2 is None:
        raise MetadataError(f"{f.name} needs first and second derivatives")
    return float(
        spec.lambda_limit(x) * spec.alpha(x) * f.d2(x) / 2.0 + spec.beta(x) * f.d1(x)
    )


def richardson(ns: Sequence[int], values: Sequence[float]) -> tuple[float, float]:
    """Eliminate a ``c/n`` term from the last two pairs of at least three points.

    Returns the extrapolated value from the last pair and the change relative
    to the estimate from the preceding pair (a stability diagnostic).
    """
    if len(ns) < 3:
        raise ParameterError("extrapolation needs at least three points")
    (n0, n1, n2), (r0, r1, r2) = ns[-3:], values[-3:]
    e01 = (n1 * r1 - n0 * r0) / (n1 - n0)
    e12 = (n2 * r2 - n1 * r1) / (n2 - n1)
    return e12, abs(e12 - e01)


@dataclass(frozen=True)
class RateReport:
    x: float
    n_list: tuple[int, ...]
    residuals: tuple[float, ...]
    target: float
    gap_at_max_n: float
    extrapolated_gap: float
    tol: float
    diagnostics: tuple[str, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return self.extrapolated_gap <= self.tol

    @property
    def gaps(self) -> tuple[float, ...]:
        return tuple(abs(r - self.target) for r in self.residuals)


def gap_trend_ok(gaps: Sequence[float], window: int = 4, slack: float = 0.1, atol: float = 1e-12) -> bool:
    """Gaps over the last ``window`` points are nonincreasing up to a relative ``slack``."""
    tail = list(gaps)[-window:]
    return all(b <= a * (1.0 + slack) + atol for a, b in zip(tail, tail[1:]))


@dataclass(frozen=True)
class MomentAudit:
    x: float
    n: int
    n_m1: float
    n_m2: float
    n_mq: float
    beta: float
    alpha: float

    def ok(self, tol1: float = 1e-8, tol2: float = 1e-6) -> bool:
        return abs(self.n_m1 - self.beta) <= tol1 and abs(self.n_m2 - self.alpha) <= tol2


def moment_audit(op: OperatorInstance, spec: VoronovskajaSpec, x: float, n: int) -> MomentAudit:
    """``n`` times the first, second and q-th central moments of the base at ``(n, x)``."""
    return MomentAudit(
        float(x),
        int(n),
        n * central_moment(op, n, 1, x),
        n * central_moment(op, n, 2, x),
        n * central_moment(op, n, spec.q, x),
        float(spec.beta(x)),
        float(spec.alpha(x)),
    )


def rate_check(
    t: TransformedOperator,
    spec: VoronovskajaSpec,
    f: ScalarFunction,
    x: float,
    n_list: Sequence[int],
    tol: float,
    audit_n: Optional[Sequence[int]] = None,
) -> RateReport:
    """Compare the residual sequence against the Voronovskaja target."""
    target = voronovskaja_target(spec, f, x)
    seq = residual_sequence(t, f, x, n_list)
    ns = [n for n, _ in seq]
    res = [r for _, r in seq]
    extrap, drift = richardson(ns, res)
    diags = []
    gaps = [abs(r - target) for r in res]
    if not gap_trend_ok(gaps):
        diags.append("residual-target gap is not decreasing over the last points")
    if drift > max(tol, 1e-12):
        diags.append(f"extrapolation unstable: successive estimates differ by {drift:.3g}")
    for n in audit_n or (ns[-1],):
        a = moment_audit(t.base, spec, x, n)
        if abs(a.n_m1 - a.beta) > 1e-2 * (1 + abs(a.beta)) or abs(a.n_m2 - a.alpha) > 1e-2 * (1 + a.alpha):
            diags.append(f"moment limits not reached at n={n}: n*m1={a.n_m1:.6g}, n*m2={a.n_m2:.6g}")
    return RateReport(
        float(x), tuple(ns), tuple(res), target, gaps[-1], abs(extrap - target), float(tol), tuple(diags)
    )
