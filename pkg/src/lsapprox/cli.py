"""Command-line experiment runner.

    lsapprox run CONFIG        run an experiment, write its CSV (and SVG if asked)
    lsapprox validate CONFIG   report config problems without running
    lsapprox list-families
    lsapprox list-functions

Exit status: 0 when every embedded check passes, 2 when a check fails,
1 on configuration or evaluation errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .asymptotics import rate_check, voronovskaja_spec
from .config import (
    CALIBRATE_MAX_N,
    ExperimentConfig,
    load_config,
    parse_function_spec,
    parse_lambda,
    validate,
)
from .errors import ConfigError, ConfigurationError, LsapproxError
from .estimates import (
    BoundKind,
    calibrate_constant,
    ditzian_totik_bound,
    error_bound_pointwise,
    error_bound_weighted,
    exp_cosh_bound,
)
from .functions import FUNCTION_NAMES, make_function
from .moments import cosh_weight, estimate_Mg, known_growth, moment_identity, quadratic_weight, transformed_moment
from .operators import FAMILY_NAMES, make_operator
from .shape import (
    check_convex,
    check_increasing,
    estimate_lipschitz,
    find_lambda_order_violation,
    lambda_monotonicity_check,
    transformed_map,
)
from .transform import LambdaSchedule, TransformedOperator

__all__ = ["main", "run", "run_config", "Table", "HEADERS"]

HEADERS = {
    "moments": ("family", "n", "k", "x", "value", "oracle", "abs_gap"),
    "converge": ("n", "x", "actual_error", "bound", "bound_kind"),
    "bounds": ("n", "x", "actual_error", "bound", "bound_kind"),
    "voronovskaja": ("n", "x", "residual", "target", "gap"),
    "shape": ("property", "n", "lambda", "holds", "witness_x", "margin"),
}

DEFAULT_TOL = {"moments": 1e-10, "voronovskaja": 1e-3}
LIPSCHITZ_SLACK = 1e-6


@dataclass
class Table:
    header: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    plot: Optional[dict] = None  # {"title", "series": {label: (ns, values)}}


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.header)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# experiments


def _setup(cfg: ExperimentConfig):
    op = make_operator(cfg.family, J=cfg.J, series_tol=cfg.series_tol, quad_nodes=cfg.quad_nodes)
    f = make_function(cfg.function, op.I)
    sched = parse_lambda(cfg.lam)
    return op, f, sched, TransformedOperator(op, sched)


def _moments(cfg: ExperimentConfig) -> Table:
    op, _, _, t = _setup(cfg)
    tol = cfg.tol or DEFAULT_TOL["moments"]
    tab = Table(HEADERS["moments"])
    for n in sorted(cfg.n_list):
        for x in sorted(cfg.x_grid):
            for k in sorted(cfg.k_list):
                value = transformed_moment(t, n, k, x)
                oracle = moment_identity(t, n, k, x)
                gap = abs(value - oracle)
                tab.rows.append((op.family.value, n, k, x, value, oracle, gap))
                if not gap <= tol:
                    tab.failures.append(f"moment gap {gap:.3g} > {tol:g} at n={n}, k={k}, x={x}")
    return tab


def _pointwise_reports(cfg, op, f, t):
    consts = known_growth(op)
    return [
        error_bound_pointwise(t, f, n, x, consts, cfg.bound_kind)
        for n in sorted(cfg.n_list)
        for x in sorted(cfg.x_grid)
    ]


def _error_table(cfg: ExperimentConfig, reports) -> Table:
    tab = Table(HEADERS[cfg.experiment])
    for r in sorted(reports, key=lambda r: (r.n, r.x)):
        tab.rows.append((r.n, r.x, r.actual_error, r.bound, r.bound_kind.value))
        tab.notes.extend(r.warnings)
    series = {}
    for x in sorted({r.x for r in reports})[:3]:
        sel = [r for r in reports if r.x == x]
        series[f"error x={x:g}"] = ([r.n for r in sel], [r.actual_error for r in sel])
        series[f"bound x={x:g}"] = ([r.n for r in sel], [r.bound for r in sel])
    tab.plot = {"title": f"{cfg.family}: {cfg.bound_kind}", "series": series}
    return tab


def _converge(cfg: ExperimentConfig) -> Table:
    op, f, _, t = _setup(cfg)
    reports = _pointwise_reports(cfg, op, f, t)
    tab = _error_table(cfg, reports)
    for r in reports:
        if not r.holds:
            tab.failures.append(f"error {r.actual_error:.6g} exceeds bound {r.bound:.6g} at n={r.n}, x={r.x}")
    return tab


def _weight(cfg: ExperimentConfig, op):
    name, params = parse_function_spec(cfg.weight)
    if name == "quadratic":
        return quadratic_weight(op.I)
    return cosh_weight(params.get("w", 0.5), op.I)


def _bounds(cfg: ExperimentConfig) -> Table:
    op, f, _, t = _setup(cfg)
    kind = BoundKind(cfg.bound_kind)
    ns, xs = sorted(cfg.n_list), sorted(cfg.x_grid)
    consts = known_growth(op)
    if kind in (BoundKind.OMEGA, BoundKind.DERIVATIVE, BoundKind.DERIVATIVE_H1):
        return _converge(cfg)
    if kind is BoundKind.EXP_COSH:
        reports = [exp_cosh_bound(t, f, f.exp_growth, cfg.K_f, n, x) for n in ns for x in xs]
    elif kind is BoundKind.DITZIAN_TOTIK:
        reports = [ditzian_totik_bound(t, f, n, xs, consts) for n in ns]
    else:
        g = _weight(cfg, op)
        mg = {x: estimate_Mg(op, g, x, cfg.p_max).value for x in xs}
        reports = [error_bound_weighted(t, f, g, n, x, consts, mg[x], kind) for n in ns for x in xs]
    calib = [r for r in reports if r.n <= CALIBRATE_MAX_N]
    check = [r for r in reports if r.n > CALIBRATE_MAX_N]
    failures = []
    try:
        c = calibrate_constant(calib)
    except ConfigurationError as exc:
        c, failures = 0.0, [str(exc)]
    reports = [r.with_constant(c) for r in reports]
    tab = _error_table(cfg, reports)
    tab.notes.append(f"calibrated constant {c:.6g} on n <= {CALIBRATE_MAX_N}")
    tab.failures.extend(failures)
    for r in (r.with_constant(c) for r in check):
        if not r.holds:
            tab.failures.append(f"validation n={r.n}, x={r.x}: error {r.actual_error:.6g} > bound {r.bound:.6g}")
    return tab


def _lambda_limit(sched: LambdaSchedule):
    if sched.label == "1/n":
        return lambda x: 0.0
    return lambda x: sched(1, x)


def _voronovskaja(cfg: ExperimentConfig) -> Table:
    op, f, sched, t = _setup(cfg)
    tol = cfg.tol or DEFAULT_TOL["voronovskaja"]
    spec = voronovskaja_spec(op, _lambda_limit(sched))
    tab = Table(HEADERS["voronovskaja"])
    series = {}
    for x in sorted(cfg.x_grid):
        rep = rate_check(t, spec, f, x, sorted(cfg.n_list), tol)
        for n, r, g in zip(rep.n_list, rep.residuals, rep.gaps):
            tab.rows.append((n, x, r, rep.target, g))
        series[f"gap x={x:g}"] = (list(rep.n_list), list(rep.gaps))
        tab.notes.extend(f"x={x:g}: {d}" for d in rep.diagnostics)
        tab.notes.append(f"x={x:g}: extrapolated gap {rep.extrapolated_gap:.6g}")
        if not rep.passed:
            tab.failures.append(f"x={x:g}: extrapolated gap {rep.extrapolated_gap:.6g} > {tol:g}")
    tab.rows.sort(key=lambda r: (r[0], r[1]))
    tab.plot = {"title": f"{cfg.family}: Voronovskaja gap", "series": series}
    return tab


def _shape(cfg: ExperimentConfig) -> Table:
    op, f, sched, t = _setup(cfg)
    grid = sorted(cfg.x_grid)
    props = cfg.properties or ("convex", "increasing")
    tab = Table(HEADERS["shape"])
    for n in sorted(cfg.n_list):
        h = transformed_map(t, n, f)
        for prop in props:
            if prop == "lambda_monotone":
                lo = sched(n, grid[0])
                v = find_lambda_order_violation(op, n, f, lo, cfg.lambda_hi, grid)
                wx = v.witness[0][0] if v.witness else None
                tab.rows.append((prop, n, f"{sched.label}:{cfg.lambda_hi:g}", v.holds, wx, v.margin))
                if wx is not None:
                    a, b = v.witness[1]
                    tab.notes.append(f"witness n={n}: x={wx:.17g}, lower={a:.17g} > upper={b:.17g}")
                for x in grid:
                    res = lambda_monotonicity_check(op, n, f, x, lo, cfg.lambda_hi)
                    if res is False:
                        tab.failures.append(f"lambda ordering fails under its precondition at n={n}, x={x}")
                continue
            if prop == "lipschitz":
                if f.lipschitz is None:
                    raise ConfigError(f"{f.name} carries no Lipschitz tag")
                K, alpha = f.lipschitz
                est = estimate_lipschitz(h, alpha, grid)
                ok = est <= 2 * K + LIPSCHITZ_SLACK
                tab.rows.append((prop, n, sched.label, ok, None, 2 * K - est))
                if op.family.value == "bernstein" and not ok:
                    tab.failures.append(f"Lipschitz estimate {est:.6g} > {2 * K:g} at n={n}")
                continue
            v = (check_convex if prop == "convex" else check_increasing)(h, grid)
            wx = v.witness[0][0] if v.witness else None
            tab.rows.append((prop, n, sched.label, v.holds, wx, v.margin))
            guaranteed = f.convex if prop == "convex" else f.increasing
            if guaranteed and not v.holds:
                tab.failures.append(f"{prop} not preserved at n={n}, near x={wx}")
    tab.rows.sort(key=lambda r: (r[1], r[0]))
    return tab


_RUNNERS = {
    "moments": _moments,
    "converge": _converge,
    "bounds": _bounds,
    "voronovskaja": _voronovskaja,
    "shape": _shape,
}


def run_config(cfg: ExperimentConfig) -> Table:
    """Run a validated config and return its table (no files written)."""
    return _RUNNERS[cfg.experiment](cfg)


def _write_svg(table: Table, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "lsapprox"
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (ns, vals) in table.plot["series"].items():
        pts = [(n, v) for n, v in zip(ns, vals) if v > 0 and math.isfinite(v)]
        if pts:
            ax.loglog(*zip(*pts), marker="o", label=label)
    ax.set_xlabel("n")
    ax.set_title(table.plot["title"])
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def run(config_path: str | Path, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        print(f"error: {exc}", file=err)
        return 1
    diags = validate(cfg)
    if diags:
        for d in diags:
            print(d, file=err)
        return 1
    try:
        table = run_config(cfg)
    except LsapproxError as exc:
        print(f"error: {exc}", file=err)
        return 1
    path = cfg.output_path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(table), encoding="utf-8")
    if cfg.svg and table.plot:
        _write_svg(table, path.with_suffix(".svg"))
    if table.notes:
        print("diagnostics:", file=out)
        for note in table.notes:
            print(f"  {note}", file=out)
    for msg in table.failures:
        print(f"check failed: {msg}", file=err)
    print(f"wrote {path} ({len(table.rows)} rows)", file=out)
    return 2 if table.failures else 0


def _validate_cmd(config_path: str, out=None) -> int:
    out = out or sys.stdout
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        print(f"parse: {exc}", file=out)
        return 1
    diags = validate(cfg)
    for d in diags:
        print(d, file=out)
    if not diags:
        print("ok", file=out)
    return 1 if diags else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lsapprox", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("config")
    sub.add_parser("list-families", help="print the operator families")
    sub.add_parser("list-functions", help="print the test-function registry")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run(args.config)
    if args.command == "validate":
        return _validate_cmd(args.config)
    if args.command == "list-families":
        print("\n".join(FAMILY_NAMES))
        return 0
    print("\n".join(FUNCTION_NAMES))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
