"""Command-line front end.

Exit codes: 0 success or verdict pass, 1 verdict fail, 2 usage or config
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import os
import sys
import time

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import __version__
from .dilatation import dilatations_at, ki_lq_norm
from .gallery import (
    FoldingParams,
    MapHandle,
    RingMapParams,
    make_folding_map,
    make_inversion,
    make_ring_map,
    make_standard,
)
from .geometry import AnnulusSpec, as_point
from .integrals import (
    QUAD_EPSABS,
    QUAD_EPSREL,
    MajorantField,
    WeightFunction,
    check_condition_4,
    check_condition_14,
    constant_field,
    constant_weight,
    default_radii,
    fmo_estimate,
    log_weight,
    radial_field,
)
from .modulus import (
    analytic_modulus,
    cap_family,
    check_poletskii,
    default_grid,
    discrete_modulus,
    ring_family,
)
from .report import Report
from .singularity import (
    GrowthEnvelope,
    check_growth,
    classify,
    corollary1_transform,
    lemma1_chain,
    verify_prop3_envelope,
)
from .verify import verify_theorem4, verify_theorem5

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
THREADS_ENV = "ISOSING_THREADS"

COMMANDS = (
    "dilatation", "integrals", "fmo", "modulus", "poletskii", "classify",
    "growth", "lemma1", "verify-theorem4", "verify-theorem5",
)


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# numeric arguments: plain numbers or small expressions such as exp(-2), 1/e

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"e": math.e, "pi": math.pi, "inf": math.inf}
_FUNCS = {"exp": math.exp, "log": math.log, "sqrt": math.sqrt}


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and len(node.args) == 1:
        return _FUNCS[node.func.id](_eval(node.args[0]))
    raise ValueError("unsupported expression")


def number(text) -> float:
    if isinstance(text, (int, float)):
        return float(text)
    try:
        return float(_eval(ast.parse(str(text).strip(), mode="eval")))
    except (ValueError, SyntaxError, ZeroDivisionError, OverflowError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def number_list(text) -> list:
    if isinstance(text, (list, tuple)):
        return [number(t) for t in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    return [number(t) for t in str(text).split(",") if t.strip()]


# ---------------------------------------------------------------------------
# map and field specs


def load_tabulated_map(path: str, n: int | None = None) -> MapHandle:
    """CSV with header ``x1..xn,f1..fn`` sampled on a structured grid.

    The map is the per-component cubic interpolant of the table; Jacobians
    come from finite differences, so results are lower fidelity than for
    closed-form maps."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] % 2 or data.shape[1] < 4:
        raise ConfigError("table needs columns x1..xn,f1..fn with n >= 2")
    dim = data.shape[1] // 2
    if n is not None and n != dim:
        raise ConfigError(f"table is in R^{dim}, --n says {n}")
    if [h.strip() for h in header] != [f"x{k}" for k in range(1, dim + 1)] + [f"f{k}" for k in range(1, dim + 1)]:
        raise ConfigError("table header must be x1..xn,f1..fn")
    axes = [np.unique(data[:, k]) for k in range(dim)]
    shape = tuple(len(a) for a in axes)
    if int(np.prod(shape)) != len(data):
        raise ConfigError("table rows do not form a structured grid")
    idx = tuple(np.searchsorted(axes[k], data[:, k]) for k in range(dim))
    values = np.full(shape + (dim,), np.nan)
    values[idx] = data[:, dim:]
    if not np.all(np.isfinite(values)):
        raise ConfigError("table grid has missing or non-finite samples")
    method = "cubic" if min(shape) >= 4 else "linear"
    interp = RegularGridInterpolator(axes, values, method=method, bounds_error=False, fill_value=np.nan)
    return MapHandle(dim=dim, name=f"table({os.path.basename(path)})", func=lambda x: interp(x))


def build_map(args) -> MapHandle:
    n = args.n
    name = args.map
    if name is None:
        raise ConfigError("--map is required")
    if name == "ring":
        m = make_ring_map(RingMapParams(_need(args, "alpha"), n))
    elif name == "folding":
        m = make_folding_map(FoldingParams(n))
    elif name == "inversion":
        m = make_inversion(n)
    elif name == "tabulated":
        m = load_tabulated_map(_need(args, "table"), n)
    else:
        params = {}
        if args.diag is not None:
            params["diag"] = number_list(args.diag)
        if args.c is not None:
            params["c"] = args.c
        if args.beta is not None:
            params["beta"] = args.beta
        if args.value is not None:
            params["value"] = number_list(args.value)
        m = make_standard(name, n, **params)
    if args.post_invert:
        m = corollary1_transform(m, np.zeros(m.dim) if m.singular_point is None else m.singular_point)
    return m


def build_field(args, b) -> MajorantField:
    kind = args.Q
    if kind == "const":
        return constant_field(args.Q_value if args.Q_value is not None else 1.0)
    if kind == "log":
        return radial_field(lambda r: np.log(1.0 / r), b, "log(1/r)")
    if kind == "inv":
        return radial_field(lambda r: 1.0 / r, b, "1/r")
    if kind == "power":
        c = _need(args, "Q_value")
        return radial_field(lambda r: r**-c, b, f"r^-{c:g}")
    raise ConfigError(f"unknown field {kind!r}")


def build_weight(name) -> WeightFunction:
    if name == "log":
        return log_weight()
    if name == "const":
        return constant_weight(1.0)
    if name == "inv":
        return WeightFunction(lambda t: 1.0 / t, "1/t")
    raise ConfigError(f"unknown weight {name!r}")


def _need(args, key):
    v = getattr(args, key, None)
    if v is None:
        raise ConfigError(f"--{key.replace('_', '-')} is required for this command")
    return v


def _point(args, key="b"):
    vals = number_list(getattr(args, key))
    return as_point(vals if len(vals) > 1 else vals[0], args.n)


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        k = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if k < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1")
    return k


def _expect(args, actual, checks):
    if getattr(args, "expect", None) is not None:
        checks["matches_expectation"] = actual == args.expect


def _family(args):
    n = args.n
    curves = args.curves
    shape = None
    if curves is not None:
        shape = (curves,) if n == 2 else (max(2, curves // 2),) * (n - 2) + (curves,)
    if args.descriptor == "ring":
        return ring_family(_need(args, "a"), _need(args, "b_outer"), _point(args, "center"), n=n, shape=shape)
    if args.descriptor == "cap":
        normal = None if args.normal is None else number_list(args.normal)
        return cap_family(_point(args, "y0"), _need(args, "r"), _need(args, "L"), normal, shape=shape)
    raise ConfigError("--descriptor must be ring or cap")


def _grid(args, fam):
    if args.grid is None:
        return default_grid(fam)
    g, n = args.grid, args.n
    ang = (g,) if n == 2 else (max(2, g // 2),) * (n - 2) + (g,)
    return default_grid(fam, radial_cells=g, angular_shape=ang)


# ---------------------------------------------------------------------------
# commands


def cmd_dilatation(args) -> Report:
    m = build_map(args)
    results, checks, plot = {}, {}, None
    if args.x is not None:
        rec = dilatations_at(m, _point(args, "x"), args.method)
        results["pointwise"] = {
            "point": rec.point, "singular_values": rec.singular_values, "jac_det": rec.jac_det,
            "K_I": rec.K_I, "K_O": rec.K_O,
        }
    if args.q is not None:
        b = _point(args)
        lq = ki_lq_norm(m, AnnulusSpec(b, _need(args, "r_inner"), _need(args, "r_outer")), args.q)
        results["lq"] = {"q": args.q, "value": lq.value, "tail_slope": lq.tail_slope, "converged": lq.converged}
        _expect(args, "converged" if lq.converged else "divergent", checks)
        plot = (["inner_radius", "partial_integral"], list(zip(lq.radii, lq.partial_integrals)))
    if not results:
        raise ConfigError("dilatation needs --x and/or --q")
    prov = {"fd_rel_step": 1e-6, "jacobian": args.method}
    return Report("dilatation", {}, results, checks, prov, plot=plot)


def cmd_integrals(args) -> Report:
    b = _point(args)
    Q = build_field(args, b)
    eps = number_list(_need(args, "eps"))
    eps0, A = _need(args, "eps0"), _need(args, "A")
    if args.condition == "4":
        rep = check_condition_4(Q, build_weight(args.psi), b, eps0, A, eps, args.count)
    else:
        rep = check_condition_14(Q, b, eps0, A, eps, args.count)
    rows = [{"eps": r.eps, "lhs": r.lhs, "rhs": r.rhs, "passed": r.passed} for r in rep.rows]
    prov = {"quad_epsabs": QUAD_EPSABS, "quad_epsrel": QUAD_EPSREL, "sphere_count": args.count or "default"}
    plot = (["eps", "lhs", "rhs"], [(r.eps, r.lhs, r.rhs) for r in rep.rows])
    return Report("integrals", {}, {"condition": rep.name, "Q": Q.name, "rows": rows}, {"condition": rep.passed}, prov, plot=plot)


def cmd_fmo(args) -> Report:
    b = _point(args)
    Q = build_field(args, b)
    radii = default_radii(args.eps0, args.levels)
    est = fmo_estimate(Q, b, radii, args.count, workers=_threads())
    checks = {}
    _expect(args, est.verdict, checks)
    results = {
        "Q": Q.name, "verdict": est.verdict, "limsup": est.limsup, "tail_slope": est.tail_slope,
        "radii": est.radii, "means": est.means, "oscillations": est.oscillations,
    }
    prov = {"quad_epsabs": QUAD_EPSABS, "quad_epsrel": QUAD_EPSREL, "thresholds": est.thresholds}
    plot = (["radius", "mean", "oscillation"], list(zip(est.radii, est.means, est.oscillations)))
    return Report("fmo", {}, results, checks, prov, plot=plot)


def cmd_modulus(args) -> Report:
    fam = _family(args)
    grid = _grid(args, fam)
    res = discrete_modulus(fam, grid, tol=args.tol, max_iter=args.max_iter)
    exact = analytic_modulus(fam)
    err = abs(res.estimate - exact) / exact
    results = {
        "lower_bound": res.lower_bound, "upper_bound": res.upper_bound, "rel_gap": res.rel_gap,
        "iterations": res.iterations, "converged": res.converged, "analytic": exact, "rel_error": err,
    }
    checks = {"converged": res.converged, "analytic_within_tolerance": err <= args.rel_tol}
    prov = {"grid_cells": grid.size, "grid_shape": grid.shape, "curves": len(fam), "solver_tol": args.tol,
            "rel_tol": args.rel_tol}
    return Report("modulus", {}, results, checks, prov)


def cmd_poletskii(args) -> Report:
    m = build_map(args)
    fam = _family(args)
    rep = check_poletskii(m, fam, grid=_grid(args, fam), tol=args.slack_tol)
    results = {
        "lhs_lower": rep.lhs_lower, "lhs_upper": rep.lhs_upper, "rhs": rep.rhs,
        "normalized_slack": rep.slack, "admissible_margin": rep.admissible_margin,
    }
    prov = {"slack_tolerance": rep.tolerance, "curves": len(fam)}
    return Report("poletskii", {}, results, {"inequality": rep.passed}, prov)


def cmd_classify(args) -> Report:
    m = build_map(args)
    rep = classify(m, _point(args), args.rmax, args.levels, args.count)
    checks = {}
    _expect(args, rep.verdict, checks)
    results = {
        "verdict": rep.verdict, "reason": rep.reason, "radii": rep.radii,
        "image_oscillation": rep.image_oscillation, "magnitude_range": rep.magnitude_range,
    }
    prov = {"sphere_count": rep.sphere_count, "thresholds": rep.thresholds}
    plot = (["radius", "oscillation", "min_abs", "max_abs"],
            [(r, o, a, z) for r, o, (a, z) in zip(rep.radii, rep.image_oscillation, rep.magnitude_range)])
    return Report("classify", {}, results, checks, prov, plot=plot)


def cmd_growth(args) -> Report:
    m = build_map(args)
    b = _point(args)
    radii = np.array(number_list(args.radii)) if args.radii is not None else args.rmax * 2.0 ** -np.arange(args.levels)
    if args.kind == "prop3":
        f_b = None if args.f_b is None else number_list(args.f_b)
        rep = verify_prop3_envelope(m, b, _need(args, "eps0"), _need(args, "A"), radii, f_b=f_b)
        results = {
            "beta_n": rep.beta_n, "exponent": rep.exponent, "tail_exponent": rep.tail_exponent,
            "degenerate": rep.degenerate, "radii": rep.radii, "deviations": rep.deviations, "bound_R": rep.bound_R,
        }
        plot = (["radius", "max_deviation"], list(zip(rep.radii, rep.deviations)))
        return Report("growth", {}, results, {"exponent": rep.compliant}, {"rel_tol": rep.rel_tol}, plot=plot)
    env = GrowthEnvelope(args.kind, args.C, _need(args, "p"))
    rep = check_growth(m, b, env, radii, args.count)
    results = {"radii": rep.radii, "max_abs": rep.max_abs, "envelope": rep.envelope_values, "margins": rep.margins}
    if rep.trend:
        results["trend"] = rep.trend
    plot = (["radius", "max_abs", "envelope"], list(zip(rep.radii, rep.max_abs, rep.envelope_values)))
    return Report("growth", {}, results, {"envelope": rep.passed}, {"sphere_count": args.count or "default"}, plot=plot)


def cmd_lemma1(args) -> Report:
    if args.a is not None:
        rep = lemma1_chain(args.k0, args.A, args.p, args.n, args.r, a_grid=number_list(args.a))
    else:
        ll = number_list(args.loglog) if args.loglog is not None else np.linspace(1.05, 30.0, 60)
        rep = lemma1_chain(args.k0, args.A, args.p, args.n, args.r, loglog_grid=ll)
    results = {
        "threshold": rep.threshold, "exponent": rep.exponent, "diverges": rep.diverges,
        "diverges_numerically": rep.diverges_numerically, "crossing_loglog": rep.crossing_loglog,
        "vacuous": rep.vacuous,
        "rows": [{"loglog": row.loglog, "upper_12": row.upper_12, "lower_13": row.lower_13,
                  "consistent": row.consistent} for row in rep.rows],
    }
    checks = {"routes_agree": rep.routes_agree, "sign_matches_trend": rep.diverges == rep.diverges_numerically}
    plot = (["loglog_inv_a", "upper", "lower", "lower_bound", "target"],
            [(row.loglog, row.upper_12, row.lower_13, row.lower_bound, row.target) for row in rep.rows])
    return Report("lemma1", {}, results, checks, {}, plot=plot)


def cmd_theorem4(args) -> Report:
    return verify_theorem4(args.q, args.p, args.n, args.alpha)


def cmd_theorem5(args) -> Report:
    return verify_theorem5(args.n, args.p)


HANDLERS = {
    "dilatation": cmd_dilatation, "integrals": cmd_integrals, "fmo": cmd_fmo, "modulus": cmd_modulus,
    "poletskii": cmd_poletskii, "classify": cmd_classify, "growth": cmd_growth, "lemma1": cmd_lemma1,
    "verify-theorem4": cmd_theorem4, "verify-theorem5": cmd_theorem5,
}


# ---------------------------------------------------------------------------
# parser


def _add_output(p):
    p.add_argument("--out", help="write the JSON report here (default: stdout)")
    p.add_argument("--plot-data", help="write tab-separated plot data here")
    p.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")


def _add_map(p):
    p.add_argument("--map", help="ring, folding, inversion, identity, linear, radial_power, squaring, "
                                 "log_decay, constant or tabulated")
    p.add_argument("--alpha", type=number)
    p.add_argument("--c", type=number)
    p.add_argument("--beta", type=number)
    p.add_argument("--diag")
    p.add_argument("--value")
    p.add_argument("--table", help="CSV with header x1..xn,f1..fn on a structured grid")
    p.add_argument("--post-invert", action="store_true", help="analyze inversion o map instead")


def _add_family(p):
    p.add_argument("--descriptor", choices=("ring", "cap"), default="ring")
    p.add_argument("--a", type=number)
    p.add_argument("--b-outer", type=number)
    p.add_argument("--center", default="0")
    p.add_argument("--y0", default="0")
    p.add_argument("--r", type=number)
    p.add_argument("--L", type=number)
    p.add_argument("--normal")
    p.add_argument("--grid", type=int, help="radial cells (angular cells scale with it)")
    p.add_argument("--curves", type=int, help="rays per azimuth sweep")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isosing", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"isosing {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--n", type=int, default=2)
        _add_output(p)
        return p

    p = add("dilatation", "pointwise dilatations and the L^q norm of K_I")
    _add_map(p)
    p.add_argument("--x")
    p.add_argument("--method", choices=("auto", "analytic", "fd"), default="auto")
    p.add_argument("--q", type=number)
    p.add_argument("--b", default="0")
    p.add_argument("--r-inner", type=number)
    p.add_argument("--r-outer", type=number)
    p.add_argument("--expect", choices=("converged", "divergent"))

    for name, help_ in (("integrals", "annulus integral conditions"), ("fmo", "finite mean oscillation")):
        p = add(name, help_)
        p.add_argument("--Q", choices=("const", "log", "inv", "power"), default="const")
        p.add_argument("--Q-value", type=number)
        p.add_argument("--b", default="0")
        p.add_argument("--count", type=int)
        p.add_argument("--eps0", type=number, default=0.25 if name == "fmo" else None)
        if name == "integrals":
            p.add_argument("--condition", choices=("4", "14"), default="14")
            p.add_argument("--psi", choices=("log", "const", "inv"), default="log")
            p.add_argument("--A", type=number)
            p.add_argument("--eps")
        else:
            p.add_argument("--levels", type=int, default=20)
            p.add_argument("--expect", choices=("fmo", "not_fmo", "inconclusive"))

    p = add("modulus", "discrete modulus bracket of a ring or cap family")
    _add_family(p)
    p.add_argument("--tol", type=number, default=1e-3)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--rel-tol", type=number, default=0.05)

    p = add("poletskii", "modulus inequality for a homeomorphism")
    _add_map(p)
    _add_family(p)
    p.add_argument("--slack-tol", type=number, default=1e-2)

    p = add("classify", "removable / pole / essential")
    _add_map(p)
    p.add_argument("--b", default="0")
    p.add_argument("--rmax", type=number, default=0.3)
    p.add_argument("--levels", type=int, default=12)
    p.add_argument("--count", type=int)
    p.add_argument("--expect", choices=("removable", "pole", "essential", "inconclusive"))

    p = add("growth", "growth envelopes and the decay exponent")
    _add_map(p)
    p.add_argument("--b", default="0")
    p.add_argument("--kind", choices=("power", "log_power", "log_power_limit", "prop3"), default="log_power")
    p.add_argument("--C", type=number, default=1.0)
    p.add_argument("--p", type=number, default=1.0)
    p.add_argument("--A", type=number)
    p.add_argument("--eps0", type=number)
    p.add_argument("--f-b")
    p.add_argument("--radii")
    p.add_argument("--rmax", type=number, default=0.3)
    p.add_argument("--levels", type=int, default=12)
    p.add_argument("--count", type=int)

    p = add("lemma1", "modulus contradiction chain")
    p.add_argument("--k0", type=int, default=1)
    p.add_argument("--A", type=number, default=1.0)
    p.add_argument("--p", type=number, default=1.0)
    p.add_argument("--r", type=number, default=0.5)
    p.add_argument("--a")
    p.add_argument("--loglog")

    p = add("verify-theorem4", "ring-map counterexample suite")
    p.add_argument("--q", type=number, default=1.0)
    p.add_argument("--p", type=number, default=1.0)
    p.add_argument("--alpha", type=number, help="override the default exponent (diagnostic)")

    p = add("verify-theorem5", "folding-map counterexample suite")
    p.add_argument("--p", type=number, default=1.0)

    p = sub.add_parser("run", help="run a JSON config document")
    p.add_argument("--config", required=True)
    _add_output(p)
    return parser


def args_from_config(parser: argparse.ArgumentParser, path: str, overrides) -> argparse.Namespace:
    """Turn ``{"command": ..., "<option>": value, ...}`` into parsed args."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("command") not in COMMANDS:
        raise ConfigError(f"config needs a 'command' among {', '.join(COMMANDS)}")
    argv = [doc["command"]]
    for key, val in doc.items():
        if key == "command":
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(val, bool):
            if val:
                argv.append(flag)
            continue
        if isinstance(val, list):
            val = ",".join(str(v) for v in val)
        argv += [flag, str(val)]
    for key in ("out", "plot_data"):
        if getattr(overrides, key) is not None:
            argv += ["--" + key.replace("_", "-"), getattr(overrides, key)]
    if overrides.timing:
        argv.append("--timing")
    args = parser.parse_args(argv)
    args.config_path = path
    return args


def execute(args) -> tuple:
    """Run parsed args; return ``(report, exit_code)``."""
    t0 = time.perf_counter()
    report = HANDLERS[args.command](args)
    elapsed = time.perf_counter() - t0
    echo = {k: v for k, v in sorted(vars(args).items())
            if k not in ("out", "plot_data", "timing", "config_path") and v is not None}
    report.config = {**echo, **report.config}
    report.provenance = {"version": __version__, **report.provenance}
    if args.timing:
        report.timing = {"seconds": elapsed}
    return report, EXIT_OK if report.passed else EXIT_FAIL


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "run":
            args = args_from_config(parser, args.config, args)
        if args.n < 2:
            raise ConfigError("--n must be >= 2")
        report, code = execute(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError, AttributeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(args.out, report.to_json())
    if args.plot_data:
        _write(args.plot_data, report.plot_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
