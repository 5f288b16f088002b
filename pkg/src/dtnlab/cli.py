"""
Command-line front end.

Every subcommand runs one study, checks its contracts and writes a JSON
report carrying ``schema``, ``version``, the resolved configuration, the
results and the list of contracts. Exit status is 0 when every contract
passes, 1 on a contract violation and 2 on a usage error.

Output goes to ``--out``; without it, to ``$DTNLAB_OUTPUT_DIR/<subcommand>.json``
if that variable is set, and to stdout otherwise. ``--format csv`` or
``--format obj`` additionally writes a table or mesh next to the JSON file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConsistencyError, DirichletEigenvalueError, DomainError, QuadratureWarning, RefinementError

SCHEMA = 1
PRECISION = 12
OUTPUT_ENV = "DTNLAB_OUTPUT_DIR"

DEFAULTS = {
    "ball-check": dict(n=3, K=20),
    "radial-dtn": dict(n=3, K=10, ode_tol=1e-12),
    "commutator": dict(n=3, K=6),
    "moments": dict(n=3, K=6),
    "radial-projection": dict(n=3, level=8, seed=0),
    "surface": dict(mesh_resolution=256),
    "delaunay-sweep": dict(mesh_resolution=256),
    "gohberg": dict(),
}


@dataclass
class RunConfig:
    """Fully resolved knobs of one run; echoed into every output file."""

    subcommand: str
    n: int | None = None
    K: int | None = None
    level: int | None = None
    ode_tol: float | None = None
    mesh_resolution: int | None = None
    seed: int | None = None
    out: str | None = None
    format: str = "json"
    options: dict = field(default_factory=dict)


class Contracts:
    def __init__(self):
        self.items = []

    def check(self, name, passed, value=None, bound=None, note=None):
        item = {"name": name, "passed": bool(passed)}
        if value is not None:
            item["value"] = value
        if bound is not None:
            item["bound"] = bound
        if note:
            item["note"] = note
        self.items.append(item)
        return bool(passed)

    @property
    def passed(self):
        return all(item["passed"] for item in self.items)


def fixed(obj, digits=PRECISION):
    """Round floats to ``digits`` significant digits so reruns serialize identically."""
    if isinstance(obj, dict):
        return {str(k): fixed(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [fixed(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return fixed(obj.tolist(), digits)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": fixed(obj.real, digits), "im": fixed(obj.imag, digits)}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{digits - 1}e}")
    return obj


# --------------------------------------------------------------------------
# studies


def run_ball_check(cfg, contracts):
    from .ball_dtn import ball_identity_residual, boundary_laplacian, commutator, dtn_ball

    residual = ball_identity_residual(cfg.n, cfg.K)
    comm = float(np.max(np.abs(commutator(dtn_ball(cfg.n, cfg.K), boundary_laplacian(cfg.n, cfg.K)))))
    contracts.check("identity_residual", residual <= 1e-12, residual, 1e-12)
    contracts.check("commutator", comm <= 1e-14, comm, 1e-14)
    op = dtn_ball(cfg.n, cfg.K)
    extras = {"csv": op.to_csv(tol=0.0)}
    return {"residual": residual, "commutator_max": comm, "size": op.size}, extras


def run_radial_dtn(cfg, contracts):
    from .ball_dtn import boundary_laplacian, commutator
    from .radial_schrodinger import dtn_radial, parse_radial, symbol_table, symbol_table_csv

    q = parse_radial(cfg.options["q"])
    op = dtn_radial(q, cfg.n, cfg.K, rtol=cfg.ode_tol)
    table = symbol_table(q, cfg.n, cfg.K, rtol=cfg.ode_tol)
    comm = float(np.max(np.abs(commutator(op, boundary_laplacian(cfg.n, cfg.K)))))
    contracts.check("commutes_with_laplacian", comm <= 1e-10, comm, 1e-10)
    spread = max(float(np.ptp(np.diag(op.block(k)))) for k in op.blocks)
    contracts.check("blocks_scalar", spread == 0.0, spread, 0.0)
    r = np.linspace(0.0, 1.0, 1001)
    if np.all(q(r) >= 0.0):
        worst = min(mu - k for k, (_, mu) in enumerate(table))
        contracts.check("monotone_nonnegative_q", worst >= -1e-8, worst, -1e-8)
    result = {"potential": q.label, "mu": [mu for _, mu in table], "table": [list(t) for t in table]}
    return result, {"csv": symbol_table_csv(table)}


def _ball_q(cfg):
    from .perturbation import parse_ball

    return parse_ball(cfg.options["q"], cfg.n)


def _rule(cfg, q):
    from .harmonics import quadrature
    from .perturbation import adaptive_rule

    if cfg.options.get("radial_level") is not None:
        level = cfg.level if cfg.level is not None else max(8, cfg.K + 6)
        return quadrature("ball", cfg.n, level, radial_level=cfg.options["radial_level"])
    return adaptive_rule(q, cfg.n, cfg.K, level=cfg.level)


def run_commutator(cfg, contracts):
    from .harmonics import HarmonicIndex
    from .perturbation import commutator_report, harmonic_moment, perturbative_dtn_matrix, radial_deficit

    q = _ball_q(cfg)
    rule = _rule(cfg, q)
    cfg.level = rule.level
    cfg.options["radial_level"] = len(rule.radii) - 1
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", QuadratureWarning)
        M = perturbative_dtn_matrix(q, cfg.n, cfg.K, rule)
    contracts.check("quadrature_converged", not caught, note="; ".join(str(w.message) for w in caught) or None)
    rep = commutator_report(M)
    deficit = radial_deficit(q, cfg.n, rule)
    contracts.check("symmetric", M.asymmetry() <= 1e-10, M.asymmetry(), 1e-10)
    diag_blocks = max(float(np.max(np.abs(rep.C[a:b, a:b]))) for a, b in M.blocks.values())
    contracts.check("diagonal_blocks_vanish", diag_blocks == 0.0, diag_blocks, 0.0)
    if deficit <= 1e-10:
        contracts.check("radial_commutes", rep.h1_l2_norm <= 1e-8, rep.h1_l2_norm, 1e-8)
    if cfg.K >= 1:
        # independent oracle: degree 0-1 entries from direct moment quadrature
        y0 = HarmonicIndex(cfg.n, 0, 0)
        worst = 0.0
        for pos, idx in enumerate(M.basis):
            if idx.k == 1:
                oracle = (0.0 - idx.eigenvalue) * harmonic_moment(q, idx, y0, rule)
                worst = max(worst, abs(rep.C[pos, 0] - oracle))
        contracts.check("degree01_matches_moment_oracle", worst <= 1e-6, worst, 1e-6)
    result = rep.to_dict()
    result.update(level=rule.level, radial_level=len(rule.radii) - 1, radial_deficit=deficit, potential=q.label)
    return result, {"csv": M.to_csv(tol=0.0)}


def run_moments(cfg, contracts):
    from .harmonics import eval_solid, harmonic_basis, quadrature
    from .perturbation import radial_deficit

    q = _ball_q(cfg)
    level = cfg.level if cfg.level is not None else cfg.K + 8
    cfg.level = level
    rule = quadrature("ball", cfg.n, level, radial_level=cfg.options.get("radial_level") or max(level, 64))
    basis = harmonic_basis(cfg.n, cfg.K)
    # same integrals as harmonic_moment, with each solid harmonic evaluated once
    S = np.stack([eval_solid(idx, rule.nodes) for idx in basis])
    gram = (S * (q(rule.nodes) * rule.weights)) @ S.T
    rows = []
    for i, u in enumerate(basis):
        for j in range(i, len(basis)):
            v = basis[j]
            rows.append({"u": [u.k, u.m], "v": [v.k, v.m], "moment": float(gram[i, j])})
    distinct = max((abs(r["moment"]) for r in rows if r["u"][0] != r["v"][0]), default=0.0)
    same = max((abs(r["moment"]) for r in rows if r["u"][0] == r["v"][0]), default=0.0)
    deficit = radial_deficit(q, cfg.n, rule)
    if deficit <= 1e-10:
        contracts.check("radial_distinct_degrees_vanish", distinct <= 1e-10, distinct, 1e-10)
    contracts.check("some_same_degree_nonzero", same > 1e-3, same, 1e-3)
    csv_lines = ["k,m,l,mm,moment"] + [
        f"{r['u'][0]},{r['u'][1]},{r['v'][0]},{r['v'][1]},{r['moment']!r}" for r in rows
    ]
    result = {"potential": q.label, "radial_deficit": deficit, "max_distinct": distinct, "max_same": same,
              "moments": rows}
    return result, {"csv": "\n".join(csv_lines) + "\n"}


def run_radial_projection(cfg, contracts):
    from .harmonics import quadrature
    from .perturbation import BallPotential, radial_deficit, radial_projection, rotation_average

    q = _ball_q(cfg)
    rule = quadrature("ball", cfg.n, cfg.level)
    Pq = radial_projection(q, cfg.n, rule)
    PPq = radial_projection(BallPotential.from_radial(Pq), cfg.n, rule)
    r = np.linspace(0.0, 1.0, 101)
    scale = max(float(np.max(np.abs(Pq(r)))), 1.0)
    idem = float(np.max(np.abs(PPq(r) - Pq(r)))) / scale
    contracts.check("idempotent", idem <= 1e-12, idem, 1e-12)
    rotations = cfg.options["rotations"]
    runs = []
    for k in range(cfg.options["runs"]):
        avg = rotation_average(q, cfg.n, rotations, rule, seed=cfg.seed + k)
        runs.append({"seed": cfg.seed + k, "mean": avg.mean, "stderr": avg.stderr, "target": avg.target})
    target = runs[0]["target"]
    means = np.array([run["mean"] for run in runs])
    pooled = float(np.mean(means))
    pooled_err = float(np.mean([run["stderr"] for run in runs]) / math.sqrt(len(runs)))
    if pooled_err > 0:
        z = abs(pooled - target) / pooled_err
        contracts.check("rotation_identity_within_4_sigma", z <= 4.0, z, 4.0)
    else:
        contracts.check("rotation_identity_exact", abs(pooled - target) <= 1e-12, abs(pooled - target), 1e-12)
    result = {
        "potential": q.label,
        "radius": r[::10].tolist(),
        "Pq": Pq(r[::10]).tolist(),
        "radial_deficit": radial_deficit(q, cfg.n, rule),
        "idempotency_error": idem,
        "target": target,
        "pooled_mean": pooled,
        "pooled_stderr": pooled_err,
        "runs": runs,
    }
    csv = "r,Pq\n" + "".join(f"{a!r},{b!r}\n" for a, b in zip(r, Pq(r)))
    return result, {"csv": csv}


def _build_surface(opts):
    from .surface_geometry import capped_delaunay, ellipsoid_surface, sphere_surface

    shape = opts["shape"]
    if shape == "sphere":
        surf = sphere_surface(opts.get("resolution") or 256, radius=opts["radius"])
    elif shape == "ellipsoid":
        surf = ellipsoid_surface(opts["a"], opts["c"], opts.get("resolution") or 512)
    elif shape == "delaunay":
        surf = capped_delaunay(opts["eps"], resolution=opts.get("resolution"), periods=opts["periods"])
    else:
        raise DomainError(f"unknown shape {shape!r}")
    return surf.normalized() if opts["normalize"] else surf


def _surface_study(surf, mesh_resolution, contracts, prefix=""):
    from .surface_geometry import (
        commutator_symbol_sup,
        gauss_bonnet,
        intrinsic_diameter,
        nearly_umbilical_chain,
        sup_grad_II,
        symbol_norm_constant,
        topping_report,
        umbilical_deficit,
    )

    try:
        grad_ii = sup_grad_II(surf, check=True)
        contracts.check(prefix + "grad_II_two_methods_agree", True)
    except ConsistencyError as exc:
        contracts.check(prefix + "grad_II_two_methods_agree", False, note=str(exc))
        grad_ii = sup_grad_II(surf, check=False)
    d = intrinsic_diameter(surf, mesh_resolution)
    top = topping_report(surf, diameter=d)
    gb = gauss_bonnet(surf)
    deficit = umbilical_deficit(surf)
    symbol = commutator_symbol_sup(surf)
    chain = nearly_umbilical_chain(surf, d, grad_ii)
    C = symbol_norm_constant()
    contracts.check(prefix + "gauss_bonnet", abs(gb - 4 * math.pi) <= 1e-6, gb - 4 * math.pi, 1e-6)
    contracts.check(prefix + "topping", top.satisfied, top.diameter, top.bound)
    contracts.check(prefix + "symbol_le_C_grad_II", symbol <= C * grad_ii * (1 + 1e-9) + 1e-12, symbol, C * grad_ii)
    contracts.check(prefix + "umbilic_chain", chain.holds, chain.deficit, chain.bound)
    return {
        "label": surf.label,
        "area": surf.area,
        "diameter": d,
        "sup_grad_II": grad_ii,
        "umbilical_deficit": asdict(deficit),
        "topping_lhs": top.diameter,
        "topping_rhs": top.bound,
        "symbol_sup": symbol,
        "symbol_constant": C,
        "gauss_bonnet": gb,
        "small_regime": chain.in_small_regime,
    }


def run_surface(cfg, contracts):
    from .surface_geometry import curvature_csv, to_obj

    surf = _build_surface(cfg.options)
    result = _surface_study(surf, cfg.mesh_resolution, contracts)
    return result, {"csv": lambda: curvature_csv(surf), "obj": lambda: to_obj(surf)}


def run_delaunay_sweep(cfg, contracts):
    from .surface_geometry import H_stddev, capped_delaunay, sup_grad_H, umbilical_deficit

    rows = []
    for eps in cfg.options["eps"]:
        surf = capped_delaunay(eps, periods=cfg.options["periods"]).normalized()
        tag = f"eps={eps}:"
        row = _surface_study(surf, cfg.mesh_resolution, contracts, prefix=tag)
        row.update(
            eps=eps,
            H_stddev_delaunay=H_stddev(surf, "delaunay"),
            sup_grad_H_blend=sup_grad_H(surf, "blend"),
        )
        contracts.check(tag + "H_constant_on_delaunay", row["H_stddev_delaunay"] <= 1e-6,
                        row["H_stddev_delaunay"], 1e-6)
        contracts.check(tag + "deficit_ge_0.5", umbilical_deficit(surf).sup >= 0.5, umbilical_deficit(surf).sup, 0.5)
        contracts.check(tag + "diameter_ge_6", row["diameter"] >= 6.0, row["diameter"], 6.0)
        contracts.check(tag + "grad_II_ge_0.1", row["sup_grad_II"] >= 0.1, row["sup_grad_II"], 0.1)
        rows.append(row)
    by_eps = sorted(rows, key=lambda r: r["eps"])
    grads = [r["sup_grad_H_blend"] for r in by_eps]
    contracts.check("grad_H_decreases_with_eps", all(a < b for a, b in zip(grads, grads[1:])), grads)
    smallest = by_eps[0]
    threshold = cfg.options["grad_h_threshold"]
    contracts.check(f"grad_H_le_{threshold}_at_smallest_eps", smallest["sup_grad_H_blend"] <= threshold,
                    smallest["sup_grad_H_blend"], threshold)
    lines = ["eps,area,diameter,sup_grad_II,sup_grad_H_blend,H_stddev_delaunay,deficit_sup,topping_rhs"]
    for r in rows:
        lines.append(",".join(repr(v) for v in (
            r["eps"], r["area"], r["diameter"], r["sup_grad_II"], r["sup_grad_H_blend"],
            r["H_stddev_delaunay"], r["umbilical_deficit"]["sup"], r["topping_rhs"])))
    return {"surfaces": rows}, {"csv": "\n".join(lines) + "\n"}


DEFAULT_SYMBOLS = (
    "branch+:2;branch-:2",
    "branch+:1;branch-:-1",
    "branch+:2,1;branch-:1",
    "branch+:2,1;branch-:1;order:1",
    "branch+:2,1;branch-:1,0,0.5;order:2",
)


def run_gohberg(cfg, contracts):
    from .gohberg_probe import gohberg_report, parse_symbol

    N = cfg.options["N"]
    strict = cfg.options.get("strict_tol")
    reports = []
    for spec in cfg.options["symbols"]:
        a = parse_symbol(spec)
        rep = gohberg_report(a, N, cfg.options["m_list"], cfg.options["lambdas"])
        tol = rep["tol"] if strict is None else strict
        contracts.check(f"{spec}:norm_ge_sup", rep["gap"] >= -tol, rep["gap"], -tol)
        for m, bound, etol in zip(rep["m_list"], rep["essential_bounds"], rep["essential_tols"]):
            etol = etol if strict is None else strict
            slack = bound - rep["sup_a"]
            contracts.check(f"{spec}:essential_ge_sup[m={m}]", slack >= -etol, slack, -etol)
        res = rep["residuals"]
        if len(res) >= 2:
            first, last = res[0]["residual"], res[-1]["residual"]
            contracts.check(f"{spec}:residual_small", last < 1e-2, last, 1e-2)
            contracts.check(f"{spec}:residual_halves", last <= 0.5 * first or first == 0.0, last, 0.5 * first)
        reports.append(rep)
    lines = ["symbol,N,sup_a,op_norm,gap,tol"] + [
        f"\"{r['symbol']}\",{r['N']},{r['sup_a']!r},{r['op_norm']!r},{r['gap']!r},{r['tol']!r}" for r in reports
    ]
    return {"reports": reports}, {"csv": "\n".join(lines) + "\n"}


STUDIES = {
    "ball-check": run_ball_check,
    "radial-dtn": run_radial_dtn,
    "commutator": run_commutator,
    "moments": run_moments,
    "radial-projection": run_radial_projection,
    "surface": run_surface,
    "delaunay-sweep": run_delaunay_sweep,
    "gohberg": run_gohberg,
}


# --------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, choices=(2, 3), help="ambient dimension")
    common.add_argument("--K", type=int, help="harmonic degree cutoff")
    common.add_argument("--level", type=int, help="angular quadrature level")
    common.add_argument("--ode-tol", type=float, help="relative tolerance of radial ODE solves")
    common.add_argument("--mesh-resolution", type=int, help="meridian nodes of the diameter mesh")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--out", help="JSON output path")
    common.add_argument("--format", choices=("json", "csv", "obj"), default="json",
                        help="extra artifact written next to the JSON report")

    parser = _Parser(prog="dtnlab", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dtnlab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    sub.add_parser("ball-check", parents=[common], help="ball identity Lambda^2 + (n-2) Lambda = Delta")

    p = sub.add_parser("radial-dtn", parents=[common], help="Schrodinger DtN map of a radial potential")
    p.add_argument("--q", default="const:1", help="radial potential, e.g. const:1, well:-2,2, bump:1,0.5,0.2")

    for name, default in (("commutator", "radial:well:1,2"), ("moments", "radial:well:1,1"),
                          ("radial-projection", "monomial:0,0,1")):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--q", default=default, help="ball potential, e.g. 'monomial:0,0,1 x bump:0.5,0.2'")
        p.add_argument("--radial-level", type=int, help="radial quadrature level (default: adaptive)")
        if name == "radial-projection":
            p.add_argument("--rotations", type=int, default=1600, help="Haar samples per run")
            p.add_argument("--runs", type=int, default=10, help="independent seeded runs")

    p = sub.add_parser("surface", parents=[common], help="geometry report of one surface of revolution")
    p.add_argument("--shape", choices=("sphere", "ellipsoid", "delaunay"), default="sphere")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--a", type=float, default=1.0, help="ellipsoid equatorial semi-axis")
    p.add_argument("--c", type=float, default=1.2, help="ellipsoid axial semi-axis")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--periods", type=int, default=3)
    p.add_argument("--resolution", type=int, help="profile Gauss nodes (per period for delaunay)")
    p.add_argument("--normalize", action="store_true", help="rescale to area 4 pi")

    p = sub.add_parser("delaunay-sweep", parents=[common], help="capped Delaunay family at area 4 pi")
    p.add_argument("--eps", type=_float_list, default=[0.2, 0.1, 0.05])
    p.add_argument("--periods", type=int, default=3)
    p.add_argument("--grad-h-threshold", type=float, default=0.02)

    p = sub.add_parser("gohberg", parents=[common], help="circle-model Gohberg bounds")
    p.add_argument("--symbol", action="append", help="symbol spec (repeatable); default: a five-symbol suite")
    p.add_argument("--N", type=int, default=512)
    p.add_argument("--m-list", type=_int_list, default=[4, 16, 64])
    p.add_argument("--lambdas", type=_int_list, default=[16, 32, 64, 128])
    p.add_argument("--strict-tol", type=float, help="fixed tolerance instead of the resolution tolerance")
    return parser


_COMMON = ("n", "K", "level", "ode_tol", "mesh_resolution", "seed", "out", "format")


def resolve_config(args):
    values = {k: getattr(args, k) for k in _COMMON}
    for key, val in DEFAULTS[args.subcommand].items():
        if values.get(key) is None:
            values[key] = val
    options = {k: v for k, v in vars(args).items() if k not in _COMMON and k != "subcommand"}
    if args.subcommand == "gohberg" and not options.get("symbols"):
        options["symbols"] = list(options.pop("symbol", None) or DEFAULT_SYMBOLS)
    options.pop("symbol", None)
    if args.subcommand in ("commutator", "moments") and values["n"] is None:
        values["n"] = 3
    return RunConfig(args.subcommand, options=options, **values)


def _validate(cfg):
    if cfg.K is not None and cfg.K < 0:
        raise DomainError("--K must be nonnegative")
    if cfg.level is not None and cfg.level < 1:
        raise DomainError("--level must be positive")
    if cfg.mesh_resolution is not None and cfg.mesh_resolution < 8:
        raise DomainError("--mesh-resolution must be at least 8")
    if cfg.ode_tol is not None and not 0 < cfg.ode_tol < 1:
        raise DomainError("--ode-tol must lie in (0, 1)")


def _output_path(cfg):
    if cfg.out:
        return Path(cfg.out)
    env = os.environ.get(OUTPUT_ENV)
    if env:
        return Path(env) / f"{cfg.subcommand}.json"
    return None


def parse_config(argv=None):
    """Parse command-line arguments into a resolved :class:`RunConfig` (exits 2 on usage errors)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        _validate(cfg)
    except DomainError as exc:
        parser.error(str(exc))
    if cfg.format != "json" and _output_path(cfg) is None:
        parser.error(f"--format {cfg.format} needs --out or ${OUTPUT_ENV}")
    return cfg


def run(cfg):
    """Run one study, write its report and return the exit code (0 pass, 1 contract violation, 2 usage)."""
    path = _output_path(cfg)
    contracts = Contracts()
    try:
        _validate(cfg)
        result, extras = STUDIES[cfg.subcommand](cfg, contracts)
    except (DomainError, RefinementError) as exc:
        print(f"dtnlab {cfg.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    except DirichletEigenvalueError as exc:
        contracts.check("dtn_defined", False, note=str(exc))
        result, extras = {"error": str(exc), "degree": exc.degree}, {}

    report = {
        "schema": SCHEMA,
        "version": __version__,
        "config": asdict(cfg),
        "result": result,
        "contracts": contracts.items,
        "passed": contracts.passed,
    }
    text = json.dumps(fixed(report), indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        if cfg.format != "json":
            extra = extras.get(cfg.format)
            if extra is None:
                print(f"dtnlab {cfg.subcommand}: no {cfg.format} artifact for this study", file=sys.stderr)
                return 2
            path.with_suffix("." + cfg.format).write_text(extra() if callable(extra) else extra, encoding="utf-8")
    for item in contracts.items:
        if not item["passed"]:
            detail = f" value={item.get('value')} bound={item.get('bound')}" if "value" in item else ""
            print(f"contract violated: {item['name']}{detail} {item.get('note', '')}".rstrip(), file=sys.stderr)
    return 0 if contracts.passed else 1


def main(argv=None):
    return run(parse_config(argv))


if __name__ == "__main__":
    sys.exit(main())
