"""Command-line interface: price, converge, surface and greeks subcommands.

Flags mirror a flat key=value config file one to one (--config PATH); flags
win on conflict.  Exit codes: 0 success, 2 usage error, 3 non-convergence,
4 I/O error.
"""
from __future__ import annotations

import argparse
import sys

from .harness import (
    DEFAULT_LEVELS,
    ConvergenceReport,
    RunConfig,
    greeks_rows,
    price_report,
    run_convergence_study,
    surface_rows,
    write_rows,
)
from .market import MarketParams, Position
from .timestepping import NonConvergenceError, SolverConfig, run_pricer

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3
EXIT_IO = 4

_DEFAULTS = {
    "position": "long",
    "method": "p2",
    "ne": 100,
    "nt": 27,
    "levels": ",".join(f"{n}:{m}" for n, m in DEFAULT_LEVELS),
    "tol": 1e-7,
    "scale": 1.0,
    "maxiter": 50,
    "rannacher": 2,
    "theta": 0.5,
    "sigma": 0.3,
    "rb": 0.05,
    "rl": 0.03,
    "rf": 0.004,
    "strike": 100.0,
    "maturity": 1.0,
    "smin": 1000.0 / 91.0,
    "smax": 1000.0,
    "format": "csv",
    "out": None,
    "linear-reduction": False,
    "stride": 1,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hjbfem",
        description=(
            "Finite-element/finite-difference pricer for European straddles "
            "with stock borrowing fees."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, descr in (
        ("price", "single pricing run; reports the value at the strike"),
        ("converge", "refinement study with change/ratio/timing columns"),
        ("surface", "dump (S, t, V) triples for surface plots"),
        ("greeks", "export nodal delta/gamma/theta at t = 0"),
    ):
        p = sub.add_parser(name, help=descr)
        p.add_argument("--config", help="flat key=value config file; flags win")
        p.add_argument("--position", choices=("long", "short"))
        p.add_argument("--method", choices=("fdm", "p1", "p2"))
        p.add_argument("--ne", type=int, help="elements (FEM) or grid nodes (FDM)")
        p.add_argument("--nt", type=int, help="number of time steps")
        p.add_argument("--tol", type=float, help="policy-iteration tolerance")
        p.add_argument("--scale", type=float, help="stopping-criterion scale floor")
        p.add_argument("--maxiter", type=int, help="iteration cap per time step")
        p.add_argument("--rannacher", type=int, help="fully implicit startup steps")
        p.add_argument("--theta", type=float, help="theta of the main scheme")
        p.add_argument("--sigma", type=float)
        p.add_argument("--rb", type=float, help="borrowing rate")
        p.add_argument("--rl", type=float, help="lending rate")
        p.add_argument("--rf", type=float, help="stock-borrow fee rate")
        p.add_argument("--strike", type=float)
        p.add_argument("--maturity", type=float)
        p.add_argument("--smin", type=float)
        p.add_argument("--smax", type=float)
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument(
            "--linear-reduction",
            action="store_const",
            const=True,
            default=None,
            help="set r_l = r_b and r_f = 0; adds closed-form comparison columns",
        )
        if name == "converge":
            p.add_argument("--levels", help="comma-separated nE:Nt pairs")
        if name == "surface":
            p.add_argument("--stride", type=int, help="time levels between slices")
    return parser


def _read_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line is not key=value: {raw.strip()!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key] = val
    return values


_BOOL_KEYS = {"linear-reduction"}
_INT_KEYS = {"ne", "nt", "rannacher", "maxiter", "stride"}
_FLOAT_KEYS = {
    "tol", "scale", "theta", "sigma", "rb", "rl", "rf",
    "strike", "maturity", "smin", "smax",
}


def _coerce(key: str, value):
    if not isinstance(value, str):
        return value
    if key in _BOOL_KEYS:
        return value.lower() in ("1", "true", "yes", "on")
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    return value


def _setting(args: argparse.Namespace, file_values: dict, key: str):
    """Flag if given, else config-file value, else the built-in default."""
    flag = getattr(args, key.replace("-", "_"), None)
    if flag is not None:
        return flag
    if key in file_values:
        return _coerce(key, file_values[key])
    return _DEFAULTS.get(key)


def _parse_levels(spec: str) -> list[tuple[int, int]]:
    levels = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            ne_text, nt_text = part.split(":")
            levels.append((int(ne_text), int(nt_text)))
        except ValueError as exc:
            raise ValueError(f"bad level {part!r}, expected nE:Nt") from exc
    if not levels:
        raise ValueError("no levels given")
    return levels


def _make_run_config(args: argparse.Namespace, file_values: dict) -> RunConfig:
    get = lambda key: _setting(args, file_values, key)
    params = MarketParams(
        sigma=get("sigma"), r_b=get("rb"), r_l=get("rl"), r_f=get("rf"),
        K=get("strike"), T=get("maturity"), S_min=get("smin"), S_max=get("smax"),
    )
    solver = SolverConfig(tol=get("tol"), scale=get("scale"), max_iter=get("maxiter"))
    return RunConfig(
        position=Position(get("position")),
        method=get("method"),
        nE=get("ne"),
        Nt=get("nt"),
        params=params,
        solver=solver,
        rannacher=get("rannacher"),
        theta=get("theta"),
        linear_reduction=bool(get("linear-reduction")),
        out_format=get("format"),
        out_path=get("out"),
    )


def _cmd_price(config: RunConfig) -> int:
    report = price_report(config)
    write_rows(report["columns"], report["rows"], config.out_format,
               config.out_path, meta=report["meta"])
    return EXIT_OK


def _cmd_converge(config: RunConfig, levels: list[tuple[int, int]]) -> int:
    report = run_convergence_study(config, levels)
    meta = {"method": report.method, "position": report.position}
    write_rows(list(ConvergenceReport.COLUMNS), report.as_rows(),
               config.out_format, config.out_path, meta=meta)
    if any(row.error for row in report.rows):
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _solve(config: RunConfig):
    return run_pricer(
        config.effective_params(), config.position, config.method,
        config.nE, config.Nt, config.solver, config.rannacher, config.theta,
    )


def _cmd_surface(config: RunConfig, stride: int) -> int:
    solution = _solve(config)
    columns, rows = surface_rows(solution, stride)
    meta = {"position": config.position.value, "method": config.method,
            "ne": config.nE, "nt": config.Nt}
    write_rows(columns, rows, config.out_format, config.out_path, meta=meta)
    return EXIT_OK


def _cmd_greeks(config: RunConfig) -> int:
    solution = _solve(config)
    columns, rows = greeks_rows(solution)
    meta = {"position": config.position.value, "method": config.method,
            "ne": config.nE, "nt": config.Nt, "t": 0.0}
    write_rows(columns, rows, config.out_format, config.out_path, meta=meta)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        file_values = _read_config_file(args.config) if args.config else {}
    except OSError as exc:
        print(f"error: cannot read config file: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = _make_run_config(args, file_values)
        if args.command == "price":
            return _cmd_price(config)
        if args.command == "converge":
            levels = _parse_levels(_setting(args, file_values, "levels"))
            return _cmd_converge(config, levels)
        if args.command == "surface":
            return _cmd_surface(config, _setting(args, file_values, "stride"))
        if args.command == "greeks":
            return _cmd_greeks(config)
        raise ValueError(f"unknown command {args.command!r}")
    except NonConvergenceError as exc:
        print(f"error: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
