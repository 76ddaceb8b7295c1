"""Intervals, evaluable real functions and the built-in test-function registry.

A :class:`ScalarFunction` wraps a vectorised callable together with the
metadata the rest of the package consults: optional first and second
derivatives, shape flags (convex, increasing, bounded, Lipschitz/Hoelder
class, exponential growth order) and, where one is known in closed form, an
exact modulus of continuity for the function and for its derivative.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigError, ParameterError

__all__ = [
    "Interval",
    "ScalarFunction",
    "REAL_LINE",
    "HALF_LINE",
    "UNIT",
    "closed",
    "constant",
    "monomial",
    "psi",
    "exponential",
    "cosh_weight_fn",
    "sine",
    "cosine",
    "abs_shift",
    "holder_abs",
    "polynomial",
    "FUNCTION_NAMES",
    "make_function",
    "parse_function_spec",
]

ModulusFn = Callable[[float, "Interval"], Optional[float]]


@dataclass(frozen=True)
class Interval:
    """An interval of the extended real line (infinite ends are always open)."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise ParameterError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if math.isinf(lo):
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(hi):
            object.__setattr__(self, "hi_closed", False)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, tol: float = 0.0) -> bool:
        if not math.isfinite(x):
            return False
        lo_ok = x >= self.lo - tol if self.lo_closed else x > self.lo - tol
        hi_ok = x <= self.hi + tol if self.hi_closed else x < self.hi + tol
        return lo_ok and hi_ok

    __contains__ = contains

    def issubset(self, other: "Interval") -> bool:
        if self.lo < other.lo or (self.lo == other.lo and self.lo_closed and not other.lo_closed):
            return False
        if self.hi > other.hi or (self.hi == other.hi and self.hi_closed and not other.hi_closed):
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo:
            lo, lo_c = self.lo, self.lo_closed
        elif self.lo < other.lo:
            lo, lo_c = other.lo, other.lo_closed
        else:
            lo, lo_c = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_c = self.hi, self.hi_closed
        elif self.hi > other.hi:
            hi, hi_c = other.hi, other.hi_closed
        else:
            hi, hi_c = self.hi, self.hi_closed and other.hi_closed
        return Interval(lo, hi, lo_c, hi_c)

    def linspace(self, num: int, margin: float = 0.0) -> np.ndarray:
        if not self.bounded:
            raise ParameterError(f"cannot grid the unbounded interval {self}")
        return np.linspace(self.lo + margin, self.hi - margin, num)

    def __str__(self):
        def fmt(v):
            if math.isinf(v):
                return "inf" if v > 0 else "-inf"
            return repr(v) if v != int(v) else str(int(v))

        return f"{'[' if self.lo_closed else '('}{fmt(self.lo)},{fmt(self.hi)}{']' if self.hi_closed else ')'}"

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Parse ``[a,b]``, ``(a,b]``, ``[0,inf)`` and the like."""
        m = re.fullmatch(r"\s*([\[(])\s*([^,\s]+)\s*,\s*([^,\s]+)\s*([\])])\s*", text)
        if not m:
            raise ConfigError(f"malformed interval {text!r}")
        try:
            lo, hi = float(m.group(2)), float(m.group(3))
        except ValueError:
            raise ConfigError(f"malformed interval {text!r}") from None
        return cls(lo, hi, m.group(1) == "[", m.group(4) == "]")


def closed(a: float, b: float) -> Interval:
    return Interval(a, b, True, True)


REAL_LINE = Interval(-math.inf, math.inf, False, False)
HALF_LINE = Interval(0.0, math.inf, True, False)
UNIT = closed(0.0, 1.0)


@dataclass(frozen=True, eq=False)
class ScalarFunction:
    """A real function on ``domain`` with optional derivative and shape metadata.

    ``eval`` must accept numpy arrays. ``modulus(delta, interval)`` and
    ``deriv1_modulus`` return the exact modulus of continuity of f (resp. f')
    over ``interval`` or ``None`` when no closed form applies there.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    domain: Interval = REAL_LINE
    deriv1: Optional[Callable[[np.ndarray], np.ndarray]] = None
    deriv2: Optional[Callable[[np.ndarray], np.ndarray]] = None
    convex: bool = False
    increasing: bool = False
    bounded: bool = False
    lipschitz: Optional[tuple[float, float]] = None
    exp_growth: Optional[float] = None
    modulus: Optional[ModulusFn] = field(default=None, repr=False)
    deriv1_modulus: Optional[ModulusFn] = field(default=None, repr=False)
    name: str = "f"

    def __call__(self, t):
        return self.eval(np.asarray(t, dtype=float))

    def d1(self, t):
        return self.deriv1(np.asarray(t, dtype=float))

    def d2(self, t):
        return self.deriv2(np.asarray(t, dtype=float))

    def __add__(self, other: "ScalarFunction") -> "ScalarFunction":
        return _combine(1.0, self, 1.0, other)

    def __sub__(self, other: "ScalarFunction") -> "ScalarFunction":
        return _combine(1.0, self, -1.0, other)

    def __mul__(self, c: float) -> "ScalarFunction":
        return _scale(self, float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarFunction":
        return _scale(self, -1.0)

    def on(self, domain: Interval) -> "ScalarFunction":
        return replace(self, domain=domain)


def _scale(f: ScalarFunction, c: float) -> ScalarFunction:
    d1 = (lambda t: c * f.deriv1(t)) if f.deriv1 else None
    d2 = (lambda t: c * f.deriv2(t)) if f.deriv2 else None
    mod = (lambda d, iv: _mul_or_none(abs(c), f.modulus(d, iv))) if f.modulus else None
    dmod = (lambda d, iv: _mul_or_none(abs(c), f.deriv1_modulus(d, iv))) if f.deriv1_modulus else None
    lip = (abs(c) * f.lipschitz[0], f.lipschitz[1]) if f.lipschitz else None
    return ScalarFunction(
        lambda t: c * f.eval(t),
        f.domain,
        d1,
        d2,
        convex=(f.convex and c >= 0) or c == 0,
        increasing=(f.increasing and c >= 0) or c == 0,
        bounded=f.bounded,
        lipschitz=lip,
        exp_growth=f.exp_growth,
        modulus=mod,
        deriv1_modulus=dmod,
        name=f"{c:g}*{f.name}",
    )


def _mul_or_none(c, v):
    return None if v is None else c * v


def _combine(a: float, f: ScalarFunction, b: float, g: ScalarFunction) -> ScalarFunction:
    # moduli of sums are not recoverable exactly; callers fall back to grids
    d1 = (lambda t: a * f.deriv1(t) + b * g.deriv1(t)) if f.deriv1 and g.deriv1 else None
    d2 = (lambda t: a * f.deriv2(t) + b * g.deriv2(t)) if f.deriv2 and g.deriv2 else None
    lip = None
    if f.lipschitz and g.lipschitz and f.lipschitz[1] == g.lipschitz[1]:
        lip = (abs(a) * f.lipschitz[0] + abs(b) * g.lipschitz[0], f.lipschitz[1])
    growth = None
    if f.exp_growth is not None and g.exp_growth is not None:
        growth = max(f.exp_growth, g.exp_growth)
    fa, gb = _scale(f, a), _scale(g, b)
    return ScalarFunction(
        lambda t: a * f.eval(t) + b * g.eval(t),
        f.domain.intersect(g.domain),
        d1,
        d2,
        convex=fa.convex and gb.convex,
        increasing=fa.increasing and gb.increasing,
        bounded=f.bounded and g.bounded,
        lipschitz=lip,
        exp_growth=growth,
        name=f"({a:g}*{f.name}+{b:g}*{g.name})",
    )


# ---------------------------------------------------------------------------
# exact moduli of continuity


def _endpoint_modulus(F: Callable[[float], float], delta: float, a: float, b: float) -> float:
    """Modulus of a monotone f whose |f'| is convex on [a, b].

    The increment over a window of fixed width is then a convex function of
    the window position, so the supremum sits at one of the two ends.
    """
    h = min(delta, b - a)
    return float(max(abs(F(b) - F(b - h)), abs(F(a + h) - F(a))))


def _bounded_min(F, lo: float, hi: float) -> float:
    if hi - lo <= 0:
        return float(F(lo))
    res = minimize_scalar(F, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    return float(min(F(lo), F(hi), res.fun))


def _convex_modulus(F: Callable[[float], float], delta: float, a: float, b: float) -> float:
    """Modulus of a convex f on bounded [a, b].

    Convexity makes increments over a fixed width nondecreasing in position,
    so the extreme pairs touch an endpoint.
    """
    h = min(delta, b - a)
    right = F(b) - _bounded_min(F, b - h, b)
    left = F(a) - _bounded_min(F, a, a + h)
    return float(max(right, left, 0.0))


def _trig_modulus(delta: float, iv: Interval) -> Optional[float]:
    if iv.length >= 2 * math.pi:
        return 2.0 * math.sin(min(delta, math.pi) / 2.0)
    return None


# ---------------------------------------------------------------------------
# constructors


def constant(c: float = 1.0, domain: Interval = REAL_LINE) -> ScalarFunction:
    return ScalarFunction(
        lambda t: np.full_like(t, c, dtype=float),
        domain,
        lambda t: np.zeros_like(t, dtype=float),
        lambda t: np.zeros_like(t, dtype=float),
        convex=True,
        increasing=True,
        bounded=True,
        lipschitz=(0.0, 1.0),
        exp_growth=0.0,
        modulus=lambda d, iv: 0.0,
        deriv1_modulus=lambda d, iv: 0.0,
        name=f"{c:g}" if c != 1 else "1",
    )


def _monomial_modulus(k: int):
    def mod(delta: float, iv: Interval) -> Optional[float]:
        if k == 0:
            return 0.0
        if k == 1:
            return min(delta, iv.length)
        if not iv.bounded:
            return math.inf
        F = lambda t: float(t) ** k
        if k % 2:
            return _endpoint_modulus(F, delta, iv.lo, iv.hi)
        return _convex_modulus(F, delta, iv.lo, iv.hi)

    return mod


def monomial(k: int, domain: Interval = REAL_LINE) -> ScalarFunction:
    """e_k(t) = t**k."""
    if k < 0:
        raise ParameterError("monomial degree must be nonnegative")
    if k == 0:
        return constant(1.0, domain)
    a, b = domain.lo, domain.hi
    d1 = lambda t: k * t ** (k - 1)
    d2 = (lambda t: k * (k - 1) * t ** (k - 2)) if k >= 2 else (lambda t: np.zeros_like(t))
    lip = None
    if k == 1:
        lip = (1.0, 1.0)
    elif domain.bounded:
        lip = (k * max(abs(a), abs(b)) ** (k - 1), 1.0)
    mk = _monomial_modulus(k)
    mk1 = _monomial_modulus(k - 1)
    return ScalarFunction(
        lambda t: t**k,
        domain,
        d1,
        d2,
        convex=k % 2 == 0 or k == 1 or a >= 0,
        increasing=k % 2 == 1 or a >= 0,
        bounded=domain.bounded,
        lipschitz=lip,
        exp_growth=0.0,
        modulus=mk,
        deriv1_modulus=lambda d, iv: _mul_or_none(k, mk1(d, iv)),
        name=f"e{k}",
    )


def psi(x: float, k: int = 1, domain: Interval = REAL_LINE) -> ScalarFunction:
    """psi_x^k(t) = (t - x)**k."""
    if k == 0:
        return constant(1.0, domain)
    d2 = (lambda t: k * (k - 1) * (t - x) ** (k - 2)) if k >= 2 else (lambda t: np.zeros_like(t))
    return ScalarFunction(
        lambda t: (t - x) ** k,
        domain,
        lambda t: k * (t - x) ** (k - 1),
        d2,
        convex=k % 2 == 0 or k == 1 or domain.lo >= x,
        increasing=k % 2 == 1 or domain.lo >= x,
        bounded=domain.bounded,
        exp_growth=0.0,
        name=f"psi({x:g})^{k}",
    )


def _exp_modulus(w: float):
    def mod(delta: float, iv: Interval) -> Optional[float]:
        if w == 0:
            return 0.0
        if (w > 0 and math.isinf(iv.hi)) or (w < 0 and math.isinf(iv.lo)):
            return math.inf
        h = min(delta, iv.length)
        if w > 0:
            return math.exp(w * iv.hi) * -math.expm1(-w * h)
        return math.exp(w * iv.lo) * -math.expm1(w * h)

    return mod


def exponential(w: float = 1.0, domain: Interval = REAL_LINE) -> ScalarFunction:
    """t -> exp(w t)."""
    a, b = domain.lo, domain.hi
    bounded = w == 0 or (w > 0 and math.isfinite(b)) or (w < 0 and math.isfinite(a))
    lip = None
    if bounded:
        edge = b if w > 0 else a
        lip = (abs(w) * math.exp(w * edge) if w else 0.0, 1.0)
    mod = _exp_modulus(w)
    return ScalarFunction(
        lambda t: np.exp(w * t),
        domain,
        lambda t: w * np.exp(w * t),
        lambda t: w * w * np.exp(w * t),
        convex=True,
        increasing=w >= 0,
        bounded=bounded,
        lipschitz=lip,
        exp_growth=abs(w),
        modulus=mod,
        deriv1_modulus=lambda d, iv: _mul_or_none(abs(w), mod(d, iv)),
        name=f"exp({w:g}x)",
    )


def cosh_weight_fn(w: float = 1.0, domain: Interval = REAL_LINE) -> ScalarFunction:
    """t -> cosh(w t)."""

    def mod(delta, iv):
        if w == 0:
            return 0.0
        if not iv.bounded:
            return math.inf
        return _convex_modulus(lambda t: math.cosh(w * t), delta, iv.lo, iv.hi)

    def dmod(delta, iv):
        if w == 0:
            return 0.0
        if not iv.bounded:
            return math.inf
        return _endpoint_modulus(lambda t: w * math.sinh(w * t), delta, iv.lo, iv.hi)

    return ScalarFunction(
        lambda t: np.cosh(w * t),
        domain,
        lambda t: w * np.sinh(w * t),
        lambda t: w * w * np.cosh(w * t),
        convex=True,
        increasing=domain.lo >= 0 or w == 0,
        bounded=domain.bounded or w == 0,
        lipschitz=(abs(w) * math.sinh(abs(w) * max(abs(domain.lo), abs(domain.hi))), 1.0)
        if domain.bounded
        else None,
        exp_growth=abs(w),
        modulus=mod,
        deriv1_modulus=dmod,
        name=f"cosh({w:g}x)",
    )


def sine(domain: Interval = REAL_LINE) -> ScalarFunction:
    a, b = domain.lo, domain.hi

    def mod(delta, iv):
        exact = _trig_modulus(delta, iv)
        if exact is not None:
            return exact
        if iv.lo >= 0 and iv.hi <= math.pi:  # concave there
            return _convex_modulus(lambda t: -math.sin(t), delta, iv.lo, iv.hi)
        return None

    def dmod(delta, iv):
        exact = _trig_modulus(delta, iv)
        if exact is not None:
            return exact
        if iv.lo >= -math.pi / 2 and iv.hi <= math.pi / 2:
            return _convex_modulus(lambda t: -math.cos(t), delta, iv.lo, iv.hi)
        return None

    return ScalarFunction(
        np.sin,
        domain,
        np.cos,
        lambda t: -np.sin(t),
        convex=a >= -math.pi and b <= 0,
        increasing=a >= -math.pi / 2 and b <= math.pi / 2,
        bounded=True,
        lipschitz=(1.0, 1.0),
        exp_growth=0.0,
        modulus=mod,
        deriv1_modulus=dmod,
        name="sin",
    )


def cosine(domain: Interval = REAL_LINE) -> ScalarFunction:
    a, b = domain.lo, domain.hi

    def mod(delta, iv):
        exact = _trig_modulus(delta, iv)
        if exact is not None:
            return exact
        if iv.lo >= -math.pi / 2 and iv.hi <= math.pi / 2:
            return _convex_modulus(lambda t: -math.cos(t), delta, iv.lo, iv.hi)
        return None

    def dmod(delta, iv):
        exact = _trig_modulus(delta, iv)
        if exact is not None:
            return exact
        if iv.lo >= 0 and iv.hi <= math.pi:
            return _convex_modulus(lambda t: -math.sin(t), delta, iv.lo, iv.hi)
        return None

    return ScalarFunction(
        np.cos,
        domain,
        lambda t: -np.sin(t),
        lambda t: -np.cos(t),
        convex=a >= math.pi / 2 and b <= 3 * math.pi / 2,
        increasing=a >= -math.pi and b <= 0,
        bounded=True,
        lipschitz=(1.0, 1.0),
        exp_growth=0.0,
        modulus=mod,
        deriv1_modulus=dmod,
        name="cos",
    )


def abs_shift(c: float = 0.5, domain: Interval = REAL_LINE) -> ScalarFunction:
    """t -> |t - c|; deliberately carries no derivative metadata."""

    def mod(delta, iv):
        if iv.lo <= c <= iv.hi:
            side = max(c - iv.lo, iv.hi - c)
        else:
            side = iv.length
        return min(delta, side)

    return ScalarFunction(
        lambda t: np.abs(t - c),
        domain,
        convex=True,
        increasing=domain.lo >= c,
        bounded=domain.bounded,
        lipschitz=(1.0, 1.0),
        exp_growth=0.0,
        modulus=mod,
        name=f"|x-{c:g}|",
    )


def holder_abs(c: float = 0.5, alpha: float = 0.5, domain: Interval = REAL_LINE) -> ScalarFunction:
    """t -> |t - c|**alpha, a member of Lip_1(alpha)."""
    if not 0 < alpha <= 1:
        raise ParameterError("Hoelder exponent must lie in (0, 1]")
    return ScalarFunction(
        lambda t: np.abs(t - c) ** alpha,
        domain,
        convex=alpha == 1,
        increasing=domain.lo >= c,
        bounded=domain.bounded,
        lipschitz=(1.0, alpha),
        exp_growth=0.0,
        name=f"|x-{c:g}|^{alpha:g}",
    )


def polynomial(coefs, domain: Interval = REAL_LINE, name: str = "poly") -> ScalarFunction:
    """Polynomial with ascending coefficients; shape flags are derived on bounded domains."""
    P = np.polynomial.Polynomial(np.asarray(coefs, dtype=float))
    P1, P2 = P.deriv(1), P.deriv(2)

    def min_on(Q, iv):
        pts = [iv.lo, iv.hi]
        for r in Q.deriv().roots():
            if abs(r.imag) < 1e-12 and iv.lo < r.real < iv.hi:
                pts.append(r.real)
        return min(Q(p) for p in pts)

    if domain.bounded:
        convex = P.degree() < 2 or min_on(P2, domain) >= 0
        increasing = P.degree() < 1 or min_on(P1, domain) >= 0
        lip = (max(abs(min_on(P1, domain)), abs(min_on(-P1, domain))), 1.0)
    else:
        convex = P.degree() < 2
        increasing = P.degree() < 1 or (P.degree() == 1 and P.coef[1] >= 0)
        lip = (abs(P.coef[1]), 1.0) if P.degree() <= 1 else None
    return ScalarFunction(
        lambda t: P(t),
        domain,
        lambda t: P1(t),
        lambda t: P2(t),
        convex=bool(convex),
        increasing=bool(increasing),
        bounded=domain.bounded or P.degree() < 1,
        lipschitz=lip,
        exp_growth=0.0,
        name=name,
    )


# ---------------------------------------------------------------------------
# closed registry used by the CLI

_BUILDERS: dict[str, tuple[Callable[..., ScalarFunction], dict[str, float]]] = {
    **{f"e{k}": (lambda domain, _k=k: monomial(_k, domain), {}) for k in range(7)},
    "exp": (lambda domain, w: exponential(w, domain), {"w": 1.0}),
    "sin": (lambda domain: sine(domain), {}),
    "cos": (lambda domain: cosine(domain), {}),
    "abs": (lambda domain, c: abs_shift(c, domain), {"c": 0.5}),
    "cosh": (lambda domain, w: cosh_weight_fn(w, domain), {"w": 1.0}),
}

FUNCTION_NAMES = tuple(_BUILDERS)


def parse_function_spec(text: str) -> tuple[str, dict[str, float]]:
    """Split ``"exp:w=0.3"`` into ``("exp", {"w": 0.3})``."""
    name, _, rest = text.strip().partition(":")
    params: dict[str, float] = {}
    if rest:
        for item in rest.split(";"):
            key, eq, val = item.partition("=")
            if not eq:
                raise ConfigError(f"malformed function parameter {item!r} in {text!r}")
            try:
                params[key.strip()] = float(val)
            except ValueError:
                raise ConfigError(f"non-numeric function parameter {item!r}") from None
    return name.strip(), params


def make_function(spec: str, domain: Interval = REAL_LINE, **params: float) -> ScalarFunction:
    """Build a registry function by name, e.g. ``make_function("exp:w=0.3", I)``."""
    name, parsed = parse_function_spec(spec)
    parsed.update(params)
    if name not in _BUILDERS:
        raise ConfigError(f"unknown function {name!r}; valid names: {', '.join(FUNCTION_NAMES)}")
    builder, defaults = _BUILDERS[name]
    unknown = set(parsed) - set(defaults)
    if unknown:
        raise ConfigError(f"function {name!r} takes no parameter(s) {sorted(unknown)}")
    kwargs = {**defaults, **parsed}
    return builder(domain, **kwargs)
