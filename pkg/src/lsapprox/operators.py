"""Classical positive linear operator families and the point contraction f_{alpha,x}.

Every family is reduced to a discrete measure: for given ``n`` and ``x`` the
operator is ``L_n(f)(x) = sum_i w_i f(t_i)``.  The nodes ``t_i`` and weights
``w_i`` come from exact probability weights (Bernstein, Bernstein-Schurer,
Szasz-Mirakjan, Baskakov) or from Gaussian quadrature of the kernel
(Kantorovich cells, Weierstrass, Post-Widder).  Rules are cached per
``(instance, n, x)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, EvaluationError, ParameterError, UnsupportedFamilyError
from .functions import HALF_LINE, REAL_LINE, UNIT, Interval, ScalarFunction, closed
from .weights import binomial_weights, negbinom_window, poisson_window

__all__ = [
    "Family",
    "OperatorInstance",
    "ExponentialCoefficient",
    "make_operator",
    "apply",
    "compose_alpha",
    "exponential_coefficient",
    "EXPONENTIAL_FAMILIES",
    "FAMILY_NAMES",
]


class Family(str, enum.Enum):
    BERNSTEIN = "bernstein"
    BERNSTEIN_SCHURER = "bernstein_schurer"
    SZASZ_MIRAKJAN = "szasz_mirakjan"
    BASKAKOV = "baskakov"
    KANTOROVICH = "kantorovich"
    WEIERSTRASS = "weierstrass"
    POST_WIDDER = "post_widder"


FAMILY_NAMES = tuple(f.value for f in Family)

# (I, J) each family is defined on
_DOMAINS: dict[Family, tuple[Interval, Interval]] = {
    Family.BERNSTEIN: (UNIT, UNIT),
    Family.BERNSTEIN_SCHURER: (closed(0.0, 2.0), UNIT),
    Family.SZASZ_MIRAKJAN: (HALF_LINE, HALF_LINE),
    Family.BASKAKOV: (HALF_LINE, HALF_LINE),
    Family.KANTOROVICH: (UNIT, UNIT),
    Family.WEIERSTRASS: (REAL_LINE, REAL_LINE),
    Family.POST_WIDDER: (HALF_LINE, HALF_LINE),
}

_P_OF_X: dict[Family, Callable[[float], float]] = {
    Family.BERNSTEIN: lambda x: x * (1.0 - x),
    Family.SZASZ_MIRAKJAN: lambda x: x,
    Family.BASKAKOV: lambda x: x * (1.0 + x),
    Family.WEIERSTRASS: lambda x: 1.0,
    Family.POST_WIDDER: lambda x: x * x,
}

EXPONENTIAL_FAMILIES = tuple(_P_OF_X)


@dataclass(frozen=True)
class OperatorInstance:
    """An operator family with its domain ``I``, evaluation interval ``J`` and numerics."""

    family: Family
    I: Interval
    J: Interval
    series_tol: float = 1e-12
    quad_nodes: int = 64

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not self.series_tol > 0:
            raise ParameterError("series_tol must be positive")
        if int(self.quad_nodes) != self.quad_nodes or self.quad_nodes < 1:
            raise ParameterError("quad_nodes must be a positive integer")
        if not self.J.issubset(self.I):
            raise DomainError(f"J={self.J} is not contained in I={self.I}")
        I0, J0 = _DOMAINS[self.family]
        if self.I != I0:
            raise DomainError(f"{self.family.value} is defined on I={I0}, got {self.I}")
        if not self.J.issubset(J0):
            raise DomainError(f"{self.family.value} evaluates on J within {J0}, got {self.J}")

    @property
    def is_exponential(self) -> bool:
        return self.family in EXPONENTIAL_FAMILIES

    @property
    def preserves_affine(self) -> bool:
        return self.is_exponential

    def degenerate_at(self, x: float) -> bool:
        """True where the kernel collapses to a point mass and L_n(f)(x) = f(x)."""
        if self.family in (Family.SZASZ_MIRAKJAN, Family.BASKAKOV, Family.POST_WIDDER):
            return x == 0.0
        return False

    def rule(self, n: int, x: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights with ``L_n(f)(x) = weights @ f(nodes)``."""
        return _rule(self, int(n), float(x))


def make_operator(
    family: str | Family,
    *,
    J: Interval | None = None,
    series_tol: float = 1e-12,
    quad_nodes: int = 64,
) -> OperatorInstance:
    try:
        fam = Family(family)
    except ValueError:
        raise UnsupportedFamilyError(
            f"unknown family {family!r}; valid names: {', '.join(FAMILY_NAMES)}"
        ) from None
    I0, J0 = _DOMAINS[fam]
    return OperatorInstance(fam, I0, J0 if J is None else J, series_tol, quad_nodes)


def _frozen(*arrays):
    for a in arrays:
        a.setflags(write=False)
    return arrays


@lru_cache(maxsize=256)
def _laguerre_rule(alpha: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    # Golub-Welsch on the generalized Laguerre Jacobi matrix; weights come out
    # normalised to total mass one, so no Gamma(alpha + 1) overflow for large alpha.
    k = np.arange(m)
    diag = 2.0 * k + alpha + 1.0
    off = np.sqrt(k[1:] * (k[1:] + alpha))
    u, vecs = eigh_tridiagonal(diag, off)
    w = vecs[0, :] ** 2
    return _frozen(u, w / w.sum())


@lru_cache(maxsize=16)
def _hermite_rule(m: int):
    u, w = np.polynomial.hermite.hermgauss(m)
    return _frozen(u, w / math.sqrt(math.pi))


@lru_cache(maxsize=16)
def _legendre_rule(m: int):
    u, w = np.polynomial.legendre.leggauss(m)
    return _frozen(u, w)


@lru_cache(maxsize=4096)
def _rule(op: OperatorInstance, n: int, x: float) -> tuple[np.ndarray, np.ndarray]:
    fam = op.family
    if n == 0 or op.degenerate_at(x):
        return _frozen(np.array([x]), np.array([1.0]))
    if fam is Family.BERNSTEIN:
        nodes, w = np.arange(n + 1) / n, binomial_weights(n, x)
    elif fam is Family.BERNSTEIN_SCHURER:
        nodes, w = np.arange(n + 2) / n, binomial_weights(n + 1, x)
    elif fam is Family.SZASZ_MIRAKJAN:
        k, w = poisson_window(n * x, op.series_tol)
        nodes = k / n
    elif fam is Family.BASKAKOV:
        k, w = negbinom_window(n, x, op.series_tol)
        nodes = k / n
    elif fam is Family.KANTOROVICH:
        u, g = _legendre_rule(op.quad_nodes)
        cells = np.arange(n + 1)[:, None]
        nodes = ((cells + (u[None, :] + 1.0) / 2.0) / (n + 1)).ravel()
        w = (binomial_weights(n, x)[:, None] * g[None, :] / 2.0).ravel()
    elif fam is Family.WEIERSTRASS:
        u, g = _hermite_rule(op.quad_nodes)
        nodes, w = x + math.sqrt(2.0 / n) * u, g.copy()
    elif fam is Family.POST_WIDDER:
        u, g = _laguerre_rule(float(n - 1), op.quad_nodes)
        nodes, w = x * u / n, g.copy()
    else:  # pragma: no cover
        raise UnsupportedFamilyError(fam)
    return _frozen(np.asarray(nodes, dtype=float), np.asarray(w, dtype=float))


def apply(op: OperatorInstance, n: int, f: ScalarFunction, x: float) -> float:
    """Evaluate ``L_n(f)(x)``; ``n = 0`` is the restriction of f to J."""
    if n < 0 or int(n) != n:
        raise ParameterError(f"operator index must be a nonnegative integer, got {n}")
    x = float(x)
    if not op.J.contains(x):
        raise DomainError(f"x={x} is outside J={op.J} for {op.family.value}")
    nodes, w = op.rule(int(n), x)
    vals = np.broadcast_to(np.asarray(f(nodes), dtype=float), nodes.shape)
    if not np.all(np.isfinite(vals)):
        raise EvaluationError(f"{f.name} returned non-finite samples for {op.family.value}, n={n}, x={x}")
    return float(w @ vals)


def compose_alpha(f: ScalarFunction, alpha: float, x: float) -> ScalarFunction:
    """Return ``t -> f(alpha t + (1 - alpha) x)``."""
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha}")
    if not math.isfinite(x):
        raise ParameterError(f"contraction centre must be finite, got {x}")
    if alpha == 1.0:
        return f
    a, b = float(alpha), 1.0 - float(alpha)
    if a == 0.0:
        fx = float(f(x))
        zero = lambda t: np.zeros_like(t, dtype=float)
        return ScalarFunction(
            lambda t: np.full_like(t, fx, dtype=float),
            f.domain,
            zero,
            zero,
            convex=True,
            increasing=True,
            bounded=True,
            lipschitz=(0.0, f.lipschitz[1]) if f.lipschitz else (0.0, 1.0),
            exp_growth=f.exp_growth,
            modulus=lambda d, iv: 0.0,
            deriv1_modulus=lambda d, iv: 0.0,
            name=f"{f.name}[0,{x:g}]",
        )

    def image(iv: Interval) -> Interval:
        return Interval(a * iv.lo + b * x, a * iv.hi + b * x, iv.lo_closed, iv.hi_closed)

    mod = (lambda d, iv: f.modulus(a * d, image(iv))) if f.modulus else None
    dmod = (
        (lambda d, iv: None if (v := f.deriv1_modulus(a * d, image(iv))) is None else a * v)
        if f.deriv1_modulus
        else None
    )
    return ScalarFunction(
        lambda t: f.eval(a * t + b * x),
        f.domain,
        (lambda t: a * f.deriv1(a * t + b * x)) if f.deriv1 else None,
        (lambda t: a * a * f.deriv2(a * t + b * x)) if f.deriv2 else None,
        convex=f.convex,
        increasing=f.increasing,
        bounded=f.bounded,
        lipschitz=(f.lipschitz[0] * a ** f.lipschitz[1], f.lipschitz[1]) if f.lipschitz else None,
        exp_growth=f.exp_growth,
        modulus=mod,
        deriv1_modulus=dmod,
        name=f"{f.name}[{a:g},{x:g}]",
    )


@dataclass(frozen=True)
class ExponentialCoefficient:
    """The p(x) of an exponential operator: L_n(psi_x^2)(x) = p(x)/n."""

    family: Family
    p_of_x: Callable[[float], float]

    def __call__(self, x: float) -> float:
        return float(self.p_of_x(float(x)))


def exponential_coefficient(op: OperatorInstance) -> ExponentialCoefficient:
    if op.family not in _P_OF_X:
        raise UnsupportedFamilyError(f"{op.family.value} is not an exponential operator")
    return ExponentialCoefficient(op.family, _P_OF_X[op.family])
