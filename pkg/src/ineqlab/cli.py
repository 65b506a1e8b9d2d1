"""Command-line front end: parameter parsing, dispatch, CSV/JSON reports.

Reports are deterministic: fixed row order, 12-significant-digit number
formatting, and the full resolved configuration embedded at the top of
every artifact, so identical configs produce byte-identical files no matter
the parallelism degree.

Exit codes: 0 all asserted contracts hold, 1 a contract was violated,
2 invalid input or I/O failure.
"""

import argparse
import functools
import io
import json
import math
import multiprocessing
import os
import sys
from dataclasses import asdict, dataclass, fields
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .constants import CONSTANT_KINDS, Params, constant
from .decomp import annulus_check, annulus_range, assemble_critical_hardy, build_partition
from .errors import DomainError, IneqLabError
from .functionals import FAMILY_KINDS, INEQUALITY_KINDS, evaluate, test_family
from .grid import (BALL, WHOLE_SPACE, RadialGrid, ball_grid, read_radial_samples,
                   space_grid)
from .limits import SWEEP_KINDS, sweep
from .rearrange import decreasing_rearrangement
from .transforms import BALL_TO_SPACE, DIM_SHIFT, TransformSpec, verify_identities
from .varopt import QUOTIENT_KINDS, QuotientSpec, minimize_rayleigh

COMMANDS = ("constants", "verify", "rearrange", "transform-check", "decomp-check",
            "optimize", "limit-sweep")

_SHARP_KINDS = {"hardy", "sobolev", "alvino", "log_sobolev", "improved_sobolev",
                "improved_hardy", "lower_dim"}

_FAMILY_PARAM_NAME = {"moser_seq": "k", "hardy_seq": "eps", "log_power": "theta",
                      "gaussian": "sigma"}

_WHOLE_SPACE_FAMILIES = {"talenti_bubble", "gaussian"}


@dataclass
class RunConfig:
    command: str
    kind: Optional[str] = None
    ineq: Optional[str] = None
    transform: Optional[str] = None
    sweep: Optional[str] = None
    N: int = 3
    p: float = 2.0
    m: Optional[int] = None
    R: float = 1.0
    a: float = 1.0
    beta: Optional[float] = None
    alpha: Optional[float] = None
    q: Optional[float] = None
    n: Optional[int] = None
    ell: Optional[int] = None
    family: str = "cone"
    family_param: Optional[float] = None
    grid_points: int = 4096
    r_min: Optional[float] = None
    r_max: Optional[float] = None
    tol: float = 1e-4
    jobs: int = 1
    output: Optional[str] = None
    format: str = "csv"
    input: Optional[str] = None
    domain: str = BALL
    values: Optional[str] = None
    max_iters: int = 5000
    opt_tol: float = 1e-8

    def resolved(self) -> Dict[str, object]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = "" if v is None else v
        return out

    def params(self) -> Params:
        return Params(N=self.N, p=self.p, m=self.m, R=self.R, a=self.a,
                      beta=self.beta, alpha=self.alpha, n=self.n, ell=self.ell,
                      q=self.q)


def fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return str(x)


def _json_number(x):
    if isinstance(x, float) and math.isfinite(x):
        return float(f"{x:.12g}")
    if isinstance(x, float):
        return fmt(x)
    return x


# ---------------------------------------------------------------------------
# report writing
# ---------------------------------------------------------------------------

_TRAILING = ("grid_points", "r_min", "r_max", "tol")


def _trailing_values(cfg: RunConfig, grid: Optional[RadialGrid]) -> Tuple:
    if grid is None:
        return (cfg.grid_points, "", "", cfg.tol)
    return (grid.count, grid.r_min, grid.r_max, cfg.tol)


def write_report(cfg: RunConfig, columns: Sequence[str], rows: Sequence[Tuple],
                 diagnostics: Dict[str, object], grid: Optional[RadialGrid]) -> None:
    cols = tuple(columns) + _TRAILING
    tail = _trailing_values(cfg, grid)
    full_rows = [tuple(row) + tail for row in rows]
    if cfg.format == "json":
        payload = {
            "config": {k: _json_number(v) if isinstance(v, float) else v
                       for k, v in sorted(cfg.resolved().items())},
            "columns": list(cols),
            "rows": [[_json_number(x) for x in row] for row in full_rows],
            "diagnostics": {k: _json_number(v) if isinstance(v, float) else str(v)
                            for k, v in sorted(diagnostics.items())},
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        for k, v in sorted(cfg.resolved().items()):
            buf.write(f"# {k} = {fmt(v) if isinstance(v, float) else v}\n")
        for k, v in sorted(diagnostics.items()):
            buf.write(f"# diag {k} = {fmt(v) if isinstance(v, float) else v}\n")
        buf.write(",".join(cols) + "\n")
        for row in full_rows:
            buf.write(",".join(fmt(x) for x in row) + "\n")
        text = buf.getvalue()
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _build_grid(cfg: RunConfig, kind: str) -> RadialGrid:
    if kind == WHOLE_SPACE:
        r_min = cfg.r_min if cfg.r_min is not None else 1e-8
        r_max = cfg.r_max if cfg.r_max is not None else 1e6
        return space_grid(cfg.N, cfg.grid_points, r_min, r_max)
    r_max = cfg.r_max if cfg.r_max is not None else cfg.R
    r_min = cfg.r_min if cfg.r_min is not None else 1e-8 * r_max
    return RadialGrid(cfg.N, r_min, r_max, cfg.grid_points)


def _family_kwargs(cfg: RunConfig) -> Dict[str, float]:
    name = _FAMILY_PARAM_NAME.get(cfg.family)
    if name is None:
        return {}
    if cfg.family_param is None:
        defaults = {"k": 100, "eps": 0.1, "theta": 1.0, "sigma": 1.0}
        return {name: defaults[name]}
    value = cfg.family_param
    return {name: int(value) if name == "k" else float(value)}


def _build_function(cfg: RunConfig):
    if cfg.family in _WHOLE_SPACE_FAMILIES and cfg.input is None:
        kind = WHOLE_SPACE
    else:
        kind = cfg.domain if cfg.input is not None else BALL
    grid = _build_grid(cfg, kind)
    if cfg.input is not None:
        return read_radial_samples(cfg.input, grid, kind), grid
    u = test_family(cfg.family, cfg.params(), grid, **_family_kwargs(cfg))
    return u, grid


def _contract_tol(cfg: RunConfig, lhs: float, rhs: float) -> float:
    return cfg.tol * max(abs(lhs), abs(rhs), 1.0)


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------

def _run_constants(cfg: RunConfig) -> int:
    value = constant(cfg.kind, cfg.params())
    print(f"constant {cfg.kind}: {fmt(value)}")
    write_report(cfg, ("kind", "N", "p", "m", "n", "value"),
                 [(cfg.kind, cfg.N, cfg.p, cfg.m or "", cfg.n or "", value)],
                 {}, None)
    return 0


def _run_verify(cfg: RunConfig) -> int:
    u, grid = _build_function(cfg)
    rep = evaluate(cfg.ineq, u, cfg.params())
    row = (cfg.ineq, cfg.family, cfg.family_param or "", cfg.N, cfg.p,
           rep.lhs, rep.rhs, rep.deficit)
    diags = {k: v for k, v in rep.diagnostics.items() if isinstance(v, (int, float, str))}
    write_report(cfg, ("ineq", "family", "family_param", "N", "p", "lhs", "rhs", "deficit"),
                 [row], diags, grid)
    sharp = cfg.ineq in _SHARP_KINDS or (
        cfg.ineq == "critical_hardy" and cfg.a == 1.0
        and (cfg.beta is None or cfg.beta == float(cfg.N)))
    ok = True
    if sharp:
        ok = rep.deficit >= -_contract_tol(cfg, rep.lhs, rep.rhs)
    print(f"verify {cfg.ineq} on {cfg.family}: lhs={fmt(rep.lhs)} rhs={fmt(rep.rhs)} "
          f"deficit={fmt(rep.deficit)} [{'ok' if ok else 'VIOLATED'}]")
    return 0 if ok else 1


def _run_rearrange(cfg: RunConfig) -> int:
    u, grid = _build_function(cfg)
    star = decreasing_rearrangement(u)
    rows = list(zip(star.t_nodes.tolist(), star.values.tolist()))
    write_report(cfg, ("t", "u_star"), rows,
                 {"total_measure": star.total_measure}, grid)
    nonincreasing = bool(np.all(np.diff(star.values) <= 1e-300))
    print(f"rearrange {cfg.family}: {len(rows)} nodes, total measure "
          f"{fmt(star.total_measure)} [{'ok' if nonincreasing else 'VIOLATED'}]")
    return 0 if nonincreasing else 1


def _run_transform_check(cfg: RunConfig) -> int:
    if cfg.transform == BALL_TO_SPACE:
        spec = TransformSpec(BALL_TO_SPACE, cfg.N, cfg.p, cfg.R)
    else:
        if cfg.m is None:
            raise DomainError("dim_shift needs --m")
        spec = TransformSpec(DIM_SHIFT, cfg.N, cfg.p, cfg.R, cfg.m)
    saved = cfg.family, cfg.N
    if cfg.transform == DIM_SHIFT:
        cfg.family = "talenti_bubble" if cfg.family == "cone" else cfg.family
        cfg.N = cfg.m
    u, grid = _build_function(cfg)
    cfg.family, cfg.N = saved
    rep = verify_identities(spec, u)
    rows = [(cfg.transform, c.name, c.transformed, c.original, c.mismatch)
            for c in rep.checks]
    write_report(cfg, ("transform", "identity", "transformed", "original", "rel_mismatch"),
                 rows, {"max_mismatch": rep.max_mismatch}, grid)
    ok = rep.max_mismatch <= cfg.tol
    print(f"transform-check {cfg.transform}: max mismatch {fmt(rep.max_mismatch)} "
          f"[{'ok' if ok else 'VIOLATED'}]")
    return 0 if ok else 1


def _run_decomp_check(cfg: RunConfig) -> int:
    if cfg.a <= 1.0:
        raise DomainError("decomp-check needs --a > 1")
    beta = cfg.beta if cfg.beta is not None else 2.0 * cfg.N + 1.0
    cfg.R = 1.0
    u, grid = _build_function(cfg)
    part = build_partition(cfg.N)
    rows = []
    for k in annulus_range(u):
        rep = annulus_check(u, part, k, cfg.a, beta)
        rows.append((k, rep.lhs, rep.rhs, rep.diagnostics["b_k"], rep.diagnostics["ratio"]))
    assembled = assemble_critical_hardy(u, cfg.a, beta)
    diags = {"assembled_lhs": assembled.lhs, "assembled_rhs": assembled.rhs,
             "partition_bound": assembled.diagnostics["partition_bound"],
             "series_tail": assembled.diagnostics["series_tail"]}
    write_report(cfg, ("k", "lhs", "rhs", "b_k", "ratio"), rows, diags, grid)
    ok = math.isfinite(assembled.lhs) and math.isfinite(assembled.rhs)
    print(f"decomp-check beta={fmt(beta)}: assembled lhs={fmt(assembled.lhs)} "
          f"rhs={fmt(assembled.rhs)} [{'ok' if ok else 'VIOLATED'}]")
    return 0 if ok else 1


def _run_optimize(cfg: RunConfig) -> int:
    params = cfg.params()
    if cfg.ineq == "sobolev":
        grid = _build_grid(cfg, WHOLE_SPACE)
        spec = QuotientSpec(cfg.ineq, params, grid)
        init = test_family("talenti_bubble", params, grid) if cfg.family == "cone" \
            else test_family(cfg.family, params, grid, **_family_kwargs(cfg))
    else:
        grid = _build_grid(cfg, BALL)
        spec = QuotientSpec(cfg.ineq, params, grid)
        init = test_family(cfg.family, params, grid, **_family_kwargs(cfg))
    value, _, trace = minimize_rayleigh(spec, init, cfg.max_iters, cfg.opt_tol)
    write_report(cfg, trace.columns, trace.rows,
                 {"final_quotient": value, "status": trace.metadata["status"]}, grid)
    quotients = trace.column("quotient")
    monotone = bool(np.all(np.diff(quotients) <= 1e-12 * np.abs(quotients[:-1])))
    if cfg.ineq == "critical_hardy":
        analytic = constant("critical_hardy", params)
    else:
        analytic = constant(cfg.ineq, params)
    ok = monotone and value >= analytic - 1e-3
    print(f"optimize {cfg.ineq}: quotient {fmt(value)} (analytic {fmt(analytic)}, "
          f"{trace.metadata['status']}) [{'ok' if ok else 'VIOLATED'}]")
    return 0 if ok else 1


def _sweep_values(cfg: RunConfig) -> List[float]:
    if cfg.values:
        return [float(x) for x in cfg.values.split(",") if x.strip()]
    if cfg.sweep in ("lower_dim_coeff", "logsob_coeff"):
        return [1e2, 1e3, 1e4]
    return [10.0 ** (-k) for k in range(1, 7)]


def _sweep_row(cfg_dict: Dict, value: float) -> Tuple:
    cfg = RunConfig(**cfg_dict)
    u = None
    if cfg.sweep in ("improved_hardy_lhs", "improved_sobolev_lhs"):
        u, _ = _build_function(cfg)
    table = sweep(cfg.sweep, cfg.params(), [value], u)
    return table.rows[0]


def _run_limit_sweep(cfg: RunConfig) -> int:
    values = _sweep_values(cfg)
    u = None
    grid = None
    if cfg.sweep in ("improved_hardy_lhs", "improved_sobolev_lhs"):
        u, grid = _build_function(cfg)
    if cfg.jobs > 1:
        # rows are independent; the ordered merge keeps output deterministic
        with multiprocessing.Pool(cfg.jobs) as pool:
            rows = pool.map(functools.partial(_sweep_row, asdict(cfg)), values)
        table = sweep(cfg.sweep, cfg.params(), values[:1], u)  # for columns/metadata
        columns = table.columns
        metadata = table.metadata
    else:
        table = sweep(cfg.sweep, cfg.params(), values, u)
        rows, columns, metadata = table.rows, table.columns, table.metadata
    diags = {k: v for k, v in metadata.items() if isinstance(v, (int, float, str))}
    write_report(cfg, columns, rows, diags, grid)
    ok = True
    if "gap_to_limit" in columns:
        gaps = np.asarray([row[columns.index("gap_to_limit")] for row in rows])
        tail = gaps[-3:] if len(gaps) >= 3 else gaps
        ok = bool(np.all(np.isfinite(tail)) and np.all(np.diff(tail) < 0.0)) \
            if len(tail) >= 2 else bool(np.all(np.isfinite(tail)))
    print(f"limit-sweep {cfg.sweep}: {len(rows)} rows [{'ok' if ok else 'VIOLATED'}]")
    return 0 if ok else 1


_RUNNERS = {
    "constants": _run_constants,
    "verify": _run_verify,
    "rearrange": _run_rearrange,
    "transform-check": _run_transform_check,
    "decomp-check": _run_decomp_check,
    "optimize": _run_optimize,
    "limit-sweep": _run_limit_sweep,
}


def run(cfg: RunConfig) -> int:
    if cfg.command not in _RUNNERS:
        raise DomainError(f"unknown command {cfg.command!r}")
    return _RUNNERS[cfg.command](cfg)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--N", type=int, default=3)
    sub.add_argument("--p", type=float, default=2.0)
    sub.add_argument("--m", type=int, default=None)
    sub.add_argument("--R", type=float, default=1.0)
    sub.add_argument("--a", type=float, default=1.0)
    sub.add_argument("--beta", type=float, default=None)
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--q", type=float, default=None)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--ell", type=int, default=None)
    sub.add_argument("--family", choices=FAMILY_KINDS, default="cone")
    sub.add_argument("--family-param", type=float, default=None, dest="family_param")
    sub.add_argument("--grid-points", type=int, default=4096, dest="grid_points")
    sub.add_argument("--r-min", type=float, default=None, dest="r_min")
    sub.add_argument("--r-max", type=float, default=None, dest="r_max")
    sub.add_argument("--tol", type=float, default=1e-4)
    sub.add_argument("--jobs", type=int, default=None)
    sub.add_argument("--output", type=str, default=None)
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--input", type=str, default=None)
    sub.add_argument("--domain", choices=(BALL, WHOLE_SPACE), default=BALL)
    sub.add_argument("--config", type=str, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ineqlab",
        description="numerical laboratory for sharp radial functional inequalities")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("constants", help="evaluate a closed-form sharp constant")
    sp.add_argument("--kind", choices=CONSTANT_KINDS, required=True)
    _common_flags(sp)

    sp = subs.add_parser("verify", help="evaluate both sides of an inequality")
    sp.add_argument("--ineq", choices=INEQUALITY_KINDS, required=True)
    _common_flags(sp)

    sp = subs.add_parser("rearrange", help="emit the decreasing rearrangement as CSV")
    _common_flags(sp)

    sp = subs.add_parser("transform-check", help="verify transported integral identities")
    sp.add_argument("--transform", choices=(BALL_TO_SPACE, DIM_SHIFT), required=True)
    _common_flags(sp)

    sp = subs.add_parser("decomp-check", help="per-annulus decomposition report")
    _common_flags(sp)

    sp = subs.add_parser("optimize", help="minimize a discrete Rayleigh quotient")
    sp.add_argument("--ineq", choices=QUOTIENT_KINDS, required=True)
    sp.add_argument("--max-iters", type=int, default=5000, dest="max_iters")
    sp.add_argument("--opt-tol", type=float, default=1e-8, dest="opt_tol")
    _common_flags(sp)

    sp = subs.add_parser("limit-sweep", help="tabulate a limiting quantity")
    sp.add_argument("--sweep", choices=SWEEP_KINDS, required=True)
    sp.add_argument("--values", type=str, default=None)
    _common_flags(sp)

    return parser


def _load_config_file(path: str, parser: argparse.ArgumentParser,
                      argv: List[str]) -> List[str]:
    """Turn 'key = value' lines into leading flags (still overridden by argv)."""
    flags: List[str] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"config line without '=': {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            flags.append(f"--{key.replace('_', '-')}")
            flags.append(value)
    return flags


def parse_args(argv: Optional[List[str]] = None) -> RunConfig:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # pre-scan for --config so file values become overridable defaults
    if "--config" in argv:
        idx = argv.index("--config")
        path = argv[idx + 1]
        command = argv[0] if argv and not argv[0].startswith("-") else None
        extra = _load_config_file(path, parser, argv)
        if command is not None:
            argv = [command] + extra + argv[1:]
        else:
            argv = extra + argv
    ns = parser.parse_args(argv)
    data = {k: v for k, v in vars(ns).items() if k != "config"}
    if data.get("jobs") is None:
        data["jobs"] = int(os.environ.get("INEQLAB_JOBS", "1"))
    return RunConfig(**data)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cfg = parse_args(argv)
        return run(cfg)
    except IneqLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
