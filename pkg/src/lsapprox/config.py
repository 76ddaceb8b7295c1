"""Flat ``key = value`` experiment configs and their validation.

One key per line; ``#`` starts a comment; list values are comma separated.
Grids may also be written ``lo:hi:num`` for ``num`` evenly spaced points.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, LsapproxError
from .functions import FUNCTION_NAMES, Interval, ScalarFunction, make_function, parse_function_spec
from .operators import FAMILY_NAMES, EXPONENTIAL_FAMILIES, Family, make_operator
from .transform import LambdaSchedule

__all__ = [
    "EXPERIMENTS",
    "BOUND_KINDS",
    "KNOWN_KEYS",
    "Diagnostic",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "parse_lambda",
    "validate",
]

EXPERIMENTS = ("moments", "converge", "voronovskaja", "shape", "bounds")
BOUND_KINDS = ("omega", "derivative", "derivative_H1", "ditzian_totik", "weighted_1dis", "weighted_2dis", "exp_cosh")
SHAPE_PROPERTIES = ("convex", "increasing", "lipschitz", "lambda_monotone")
CALIBRATE_MAX_N = 50

KNOWN_KEYS = {
    "experiment", "family", "I", "J", "lambda", "lambda_hi", "function", "n_list", "x_grid", "k_list",
    "tol", "output", "svg", "seed", "series_tol", "quad_nodes", "bound_kind", "properties",
    "K_f", "weight", "p_max",
}

_REQUIRED = ("experiment", "family", "n_list", "x_grid", "output")


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass
class ExperimentConfig:
    raw: dict[str, str]
    experiment: str = ""
    family: str = ""
    I: Optional[Interval] = None
    J: Optional[Interval] = None
    lam: str = "1"
    lambda_hi: float = 1.0
    function: str = "e2"
    n_list: tuple[int, ...] = ()
    x_grid: tuple[float, ...] = ()
    k_list: tuple[int, ...] = (1, 2)
    tol: Optional[float] = None
    output: str = ""
    svg: bool = False
    seed: int = 0
    series_tol: float = 1e-12
    quad_nodes: int = 64
    bound_kind: str = "omega"
    properties: tuple[str, ...] = ()
    K_f: float = 1.0
    weight: str = "cosh:w=0.5"
    p_max: int = 200
    base_dir: Path = field(default_factory=Path)
    parse_errors: list[Diagnostic] = field(default_factory=list)

    @property
    def output_path(self) -> Path:
        p = Path(self.output)
        return p if p.is_absolute() else self.base_dir / p


def _split(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def _grid(text: str) -> tuple[float, ...]:
    if ":" in text and "," not in text:
        lo, hi, num = text.split(":")
        return tuple(float(v) for v in np.linspace(float(lo), float(hi), int(num)))
    return tuple(float(v) for v in _split(text))


_TYPED = {
    "n_list": lambda s: tuple(int(v) for v in _split(s)),
    "x_grid": _grid,
    "k_list": lambda s: tuple(int(v) for v in _split(s)),
    "tol": float,
    "lambda_hi": float,
    "seed": int,
    "series_tol": float,
    "quad_nodes": int,
    "K_f": float,
    "p_max": int,
    "svg": lambda s: {"true": True, "false": False, "1": True, "0": False}[s.lower()],
    "I": Interval.parse,
    "J": Interval.parse,
    "properties": lambda s: tuple(_split(s)),
}


def parse_config(text: str, base_dir: Path | str = ".") -> ExperimentConfig:
    """Parse config text; problems are collected as diagnostics, not raised."""
    raw: dict[str, str] = {}
    errors: list[Diagnostic] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not eq or not key:
            errors.append(Diagnostic("parse", f"line {lineno}: expected 'key = value'"))
            continue
        if key not in KNOWN_KEYS:
            errors.append(Diagnostic("unknown-key", f"line {lineno}: unknown key {key!r}"))
            continue
        if key in raw:
            errors.append(Diagnostic("parse", f"line {lineno}: duplicate key {key!r}"))
        raw[key] = val
    cfg = ExperimentConfig(raw=raw, base_dir=Path(base_dir))
    for key in _REQUIRED:
        if key not in raw:
            errors.append(Diagnostic("parse", f"missing required key {key!r}"))
    for key, val in raw.items():
        attr = "lam" if key == "lambda" else key
        try:
            setattr(cfg, attr, _TYPED[key](val) if key in _TYPED else val)
        except (ValueError, KeyError, LsapproxError) as exc:
            errors.append(Diagnostic("parse", f"bad value for {key!r}: {val!r} ({exc})"))
    cfg.parse_errors = errors
    return cfg


def load_config(path: Path | str) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, path.parent)


_CX = re.compile(r"^\s*([0-9.eE+-]+)\s*\*\s*x\s*$")


def parse_lambda(spec: str) -> LambdaSchedule:
    """Schedule grammar: a constant ``c``, ``1/n``, ``c*x`` or ``x``."""
    s = spec.strip()
    if s == "1/n":
        return LambdaSchedule.reciprocal()
    if s == "x":
        return LambdaSchedule.of_x(lambda x: x, "x")
    m = _CX.match(s)
    if m:
        c = float(m.group(1))
        return LambdaSchedule.of_x(lambda x: c * x, f"{c:g}*x")
    try:
        c = float(s)
    except ValueError:
        raise ConfigError(f"lambda spec {spec!r} is not one of: constant, 1/n, c*x, x") from None
    if not 0.0 <= c <= 1.0:
        # keep the value so validation can report the range problem
        return LambdaSchedule("constant", lambda n, x: c, f"{c:g}", True)
    return LambdaSchedule.constant(c)


def _needs_derivs(cfg: ExperimentConfig) -> tuple[bool, bool]:
    if cfg.experiment == "voronovskaja":
        return True, True
    if cfg.experiment in ("converge", "bounds") and cfg.bound_kind in ("derivative", "derivative_H1"):
        return True, False
    return False, False


def validate(cfg: ExperimentConfig) -> list[Diagnostic]:
    """Every problem ``run`` would hit, in a fixed order, without running anything heavy."""
    diags = list(cfg.parse_errors)
    if "experiment" in cfg.raw and cfg.experiment not in EXPERIMENTS:
        diags.append(Diagnostic("unknown-experiment", f"{cfg.experiment!r}; valid: {', '.join(EXPERIMENTS)}"))
    op = None
    if "family" in cfg.raw:
        if cfg.family not in FAMILY_NAMES:
            diags.append(Diagnostic("unknown-family", f"{cfg.family!r}; valid: {', '.join(FAMILY_NAMES)}"))
        else:
            try:
                op = make_operator(cfg.family, J=cfg.J, series_tol=cfg.series_tol, quad_nodes=cfg.quad_nodes)
                if cfg.I is not None and cfg.I != op.I:
                    diags.append(Diagnostic("domain", f"{cfg.family} is defined on I={op.I}, got I={cfg.I}"))
            except LsapproxError as exc:
                diags.append(Diagnostic("domain", str(exc)))
    f: Optional[ScalarFunction] = None
    name, _ = parse_function_spec(cfg.function) if cfg.function else ("", {})
    if name not in FUNCTION_NAMES:
        diags.append(Diagnostic("unknown-function", f"{name!r}; valid: {', '.join(FUNCTION_NAMES)}"))
    elif op is not None:
        try:
            f = make_function(cfg.function, op.I)
        except LsapproxError as exc:
            diags.append(Diagnostic("unknown-function", str(exc)))
    sched = None
    try:
        sched = parse_lambda(cfg.lam)
    except ConfigError as exc:
        diags.append(Diagnostic("parse", str(exc)))
    if any(n < 1 for n in cfg.n_list):
        diags.append(Diagnostic("range", "n_list entries must be >= 1"))
    if cfg.tol is not None and not cfg.tol > 0:
        diags.append(Diagnostic("range", "tol must be positive"))
    if not 0.0 <= cfg.lambda_hi <= 1.0:
        diags.append(Diagnostic("range", f"lambda_hi={cfg.lambda_hi} is outside [0, 1]"))
    if op is not None:
        outside = [x for x in cfg.x_grid if not op.J.contains(x)]
        if outside:
            diags.append(Diagnostic("domain", f"x_grid points {outside[:3]} lie outside J={op.J}"))
    if sched is not None and cfg.x_grid and cfg.n_list:
        bad = next(
            ((n, x) for n in cfg.n_list for x in cfg.x_grid
             if not 0.0 <= float(sched.rule(max(n, 1), x)) <= 1.0),
            None,
        )
        if bad:
            diags.append(Diagnostic("range", f"lambda {cfg.lam!r} leaves [0, 1] at n={bad[0]}, x={bad[1]}"))
    if f is not None:
        need1, need2 = _needs_derivs(cfg)
        if (need1 and f.deriv1 is None) or (need2 and f.deriv2 is None):
            diags.append(Diagnostic("missing-derivative", f"{cfg.experiment} needs derivatives of {name!r}"))
    diags.extend(_experiment_checks(cfg, op, f, sched))
    return diags


def _experiment_checks(cfg, op, f, sched) -> list[Diagnostic]:
    out = []
    if cfg.experiment in ("converge", "bounds") and cfg.bound_kind not in BOUND_KINDS:
        out.append(Diagnostic("unknown-bound-kind", f"{cfg.bound_kind!r}; valid: {', '.join(BOUND_KINDS)}"))
    if cfg.experiment == "converge" and cfg.bound_kind not in ("omega", "derivative", "derivative_H1"):
        out.append(Diagnostic("unknown-bound-kind", "converge takes omega, derivative or derivative_H1"))
    if cfg.experiment == "moments" and op is not None and not op.I.bounded and any(k > 4 for k in cfg.k_list):
        out.append(Diagnostic("range", "moment orders above 4 need a bounded domain"))
    if cfg.experiment == "moments" and any(k < 0 for k in cfg.k_list):
        out.append(Diagnostic("range", "moment orders must be nonnegative"))
    if cfg.experiment == "voronovskaja":
        if len(cfg.n_list) < 3:
            out.append(Diagnostic("range", "voronovskaja needs at least three n values"))
        if list(cfg.n_list) != sorted(set(cfg.n_list)):
            out.append(Diagnostic("range", "voronovskaja needs a strictly increasing n_list"))
    if cfg.experiment == "shape":
        bad = [p for p in cfg.properties if p not in SHAPE_PROPERTIES]
        if bad:
            out.append(Diagnostic("unknown-property", f"{bad}; valid: {', '.join(SHAPE_PROPERTIES)}"))
        if sched is not None and not sched.n_free:
            out.append(Diagnostic("range", "shape checks need a lambda that does not depend on n"))
        if len(cfg.x_grid) < 3:
            out.append(Diagnostic("range", "shape checks need at least three grid points"))
    if cfg.experiment == "bounds" and op is not None:
        kind = cfg.bound_kind
        if kind == "exp_cosh" and op.family not in EXPONENTIAL_FAMILIES:
            out.append(Diagnostic("domain", f"exp_cosh needs an exponential family, got {op.family.value}"))
        if kind == "ditzian_totik" and op.family not in (Family.SZASZ_MIRAKJAN, Family.BASKAKOV):
            out.append(Diagnostic("domain", "ditzian_totik runs on szasz_mirakjan and baskakov only"))
        if kind == "exp_cosh" and f is not None and f.exp_growth is None:
            out.append(Diagnostic("missing-derivative", f"{f.name} carries no exponential growth tag"))
        if kind in ("ditzian_totik", "weighted_1dis", "weighted_2dis", "exp_cosh"):
            if not any(n <= CALIBRATE_MAX_N for n in cfg.n_list) or not any(n > CALIBRATE_MAX_N for n in cfg.n_list):
                out.append(Diagnostic(
                    "range", f"{kind} needs n values on both sides of {CALIBRATE_MAX_N} (calibration/validation)"
                ))
        if kind.startswith("weighted") and parse_function_spec(cfg.weight)[0] not in ("cosh", "quadratic"):
            out.append(Diagnostic("unknown-function", f"weight {cfg.weight!r}; valid: cosh:w=..., quadratic"))
    return out
