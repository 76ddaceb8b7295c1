"""The binomial transform L_{n,lambda} of an operator sequence and its lambda-profile.

    L_{n,lambda}(f)(x) = sum_p C(n,p) lambda^p (1-lambda)^(n-p) L_p(f_{p/n,x})(x)

with ``lambda = lambda_n(x)``.  The profile ``phi(s)`` is the same sum with the
schedule frozen to the constant ``s``; transform evaluations at a point are
profile evaluations at ``s = lambda_n(x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import ParameterError, ScheduleError
from .functions import ScalarFunction
from .operators import OperatorInstance, apply, compose_alpha
from .weights import binomial_weights

__all__ = [
    "LambdaSchedule",
    "TransformedOperator",
    "transform_apply",
    "profile_terms",
    "phi_profile",
    "phi_derivative",
    "WEIGHT_CUTOFF",
]

WEIGHT_CUTOFF = 1e-16


@dataclass(frozen=True)
class LambdaSchedule:
    """The rule ``(n, x) -> lambda_n(x)``.

    Use the constructors :meth:`constant`, :meth:`per_n` and :meth:`pointwise`.
    ``label`` is a stable text form used in CSV output.
    """

    kind: str
    rule: Callable[[int, float], float]
    label: str
    n_free: bool = False

    @classmethod
    def constant(cls, c: float) -> "LambdaSchedule":
        c = float(c)
        if not 0.0 <= c <= 1.0:
            raise ScheduleError(f"constant lambda must lie in [0, 1], got {c}")
        return cls("constant", lambda n, x: c, f"{c:g}", True)

    @classmethod
    def per_n(cls, values: Union[Sequence[float], Callable[[int], float]], label: str = "") -> "LambdaSchedule":
        """``lambda_n`` constant in x; ``values`` is a callable of n or a sequence indexed from n = 1."""
        if callable(values):
            fn = values
        else:
            seq = tuple(float(v) for v in values)
            fn = lambda n: seq[n - 1]
        return cls("per_n", lambda n, x: fn(n), label or "per_n")

    @classmethod
    def reciprocal(cls) -> "LambdaSchedule":
        return cls("per_n", lambda n, x: 1.0 / n, "1/n")

    @classmethod
    def pointwise(cls, fn: Callable[[int, float], float], label: str = "pointwise") -> "LambdaSchedule":
        return cls("pointwise", fn, label)

    @classmethod
    def of_x(cls, fn: Callable[[float], float], label: str = "lambda(x)") -> "LambdaSchedule":
        """A schedule ``lambda_n = lambda`` that depends on x only."""
        return cls("pointwise", lambda n, x: fn(x), label, True)

    def __call__(self, n: int, x: float) -> float:
        v = float(self.rule(n, x))
        if not 0.0 <= v <= 1.0:
            raise ScheduleError(f"lambda_{n}({x}) = {v} is outside [0, 1] (schedule {self.label})")
        return v


@dataclass(frozen=True)
class TransformedOperator:
    base: OperatorInstance
    schedule: LambdaSchedule

    def __call__(self, n: int, f: ScalarFunction, x: float) -> float:
        return transform_apply(self, n, f, x)


def profile_terms(base: OperatorInstance, n: int, f: ScalarFunction, x: float, mask=None) -> np.ndarray:
    """Return ``a_p = L_p(f_{p/n,x})(x)`` for ``p = 0..n``; entries outside ``mask`` stay nan."""
    if n < 1:
        raise ParameterError(f"transform index must be >= 1, got {n}")
    terms = np.full(n + 1, np.nan)
    for p in range(n + 1):
        if mask is not None and not mask[p]:
            continue
        terms[p] = apply(base, p, compose_alpha(f, p / n, x), x)
    return terms


def _weighted_profile(base, n, f, x, s) -> float:
    w = binomial_weights(n, s)
    keep = w >= WEIGHT_CUTOFF * w.max()
    a = profile_terms(base, n, f, x, keep)
    return math.fsum(w[keep] * a[keep])


def transform_apply(t: TransformedOperator, n: int, f: ScalarFunction, x: float) -> float:
    """Evaluate ``L_{n,lambda_n}(f)(x)``."""
    if n < 1 or int(n) != n:
        raise ParameterError(f"transform index must be a positive integer, got {n}")
    lam = t.schedule(int(n), float(x))
    return _weighted_profile(t.base, int(n), f, float(x), lam)


def _check_s(s: float) -> float:
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ParameterError(f"profile argument must lie in [0, 1], got {s}")
    return s


def phi_profile(base: OperatorInstance, n: int, f: ScalarFunction, x: float, s: float) -> float:
    """``phi(s) = sum_p C(n,p) s^p (1-s)^(n-p) L_p(f_{p/n,x})(x)``."""
    return _weighted_profile(base, int(n), f, float(x), _check_s(s))


def phi_derivative(base: OperatorInstance, n: int, f: ScalarFunction, x: float, s: float, terms=None) -> float:
    """Closed-form ``phi'(s) = n sum_p C(n-1,p) s^p (1-s)^(n-1-p) (a_{p+1} - a_p)``.

    ``terms`` may carry precomputed :func:`profile_terms` to share work across s.
    """
    s = _check_s(s)
    a = profile_terms(base, int(n), f, float(x)) if terms is None else np.asarray(terms)
    w = binomial_weights(int(n) - 1, s)
    return int(n) * math.fsum(w * np.diff(a))
