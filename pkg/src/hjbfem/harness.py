"""Run configurations, convergence studies and report serialization.

The convergence table mirrors the benchmark layout: per refinement level the
value at the strike, the successive change, the change ratio (about 4 for a
second-order method under simultaneous space/time doubling), iteration
statistics and timings, including the execution time relative to an FDM run
at the matched resolution.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from .greeks import compute_greeks
from .market import MarketParams, Position, bs_straddle_price
from .timestepping import (
    NonConvergenceError,
    SolutionGrid,
    SolverConfig,
    run_pricer,
)

__all__ = [
    "DEFAULT_LEVELS",
    "RunConfig",
    "ConvergenceRow",
    "ConvergenceReport",
    "price_report",
    "run_convergence_study",
    "surface_rows",
    "greeks_rows",
    "write_rows",
]

# (nE, N_t) pairs of the benchmark tables; the pairing is data, not a formula
DEFAULT_LEVELS: tuple[tuple[int, int], ...] = (
    (100, 27),
    (200, 52),
    (400, 102),
    (800, 202),
    (1600, 402),
    (3200, 802),
)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one pricing run."""

    position: Position = Position.LONG
    method: str = "p2"
    nE: int = 100
    Nt: int = 27
    params: MarketParams = field(default_factory=MarketParams)
    solver: SolverConfig = field(default_factory=SolverConfig)
    rannacher: int = 2
    theta: float = 0.5
    linear_reduction: bool = False
    out_format: str = "csv"
    out_path: str | None = None

    def __post_init__(self):
        if self.method.lower() not in ("fdm", "p1", "p2"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.out_format not in ("csv", "json"):
            raise ValueError(f"format must be 'csv' or 'json', got {self.out_format!r}")
        min_size = 3 if self.method.lower() == "fdm" else 2
        if self.nE < min_size:
            raise ValueError(f"nE={self.nE} too small for method {self.method!r}")
        if self.Nt < 1:
            raise ValueError(f"Nt must be positive, got {self.Nt}")
        if not 0 <= self.rannacher <= self.Nt:
            raise ValueError("rannacher steps must lie in [0, Nt]")

    def effective_params(self) -> MarketParams:
        """Parameters with the linear reduction applied if requested."""
        if not self.linear_reduction:
            return self.params
        return replace(self.params, r_l=self.params.r_b, r_f=0.0)


def _run(config: RunConfig, nE: int | None = None, Nt: int | None = None,
         method: str | None = None) -> SolutionGrid:
    return run_pricer(
        config.effective_params(),
        config.position,
        method=method or config.method,
        nE=nE if nE is not None else config.nE,
        N_t=Nt if Nt is not None else config.Nt,
        config=config.solver,
        rannacher_steps=config.rannacher,
        theta=config.theta,
    )


def price_report(config: RunConfig) -> dict:
    """Single pricing run: strike value, iteration stats and the t=0 slice."""
    sol = _run(config)
    meta = {
        "position": config.position.value,
        "method": sol.method,
        "ne": config.nE,
        "nt": config.Nt,
        "value_at_strike": sol.value_at_strike,
        "strike_on_node": sol.strike_on_node,
        "total_iterations": sol.total_iterations,
        "average_iterations": sol.average_iterations,
        "wall_time_s": sol.wall_time,
        "converged": sol.converged,
    }
    columns = ["S", "value"]
    slice_rows = [[float(s), float(v)] for s, v in zip(sol.nodes_S, sol.values[:, -1])]
    if config.linear_reduction:
        params = config.effective_params()
        ref = bs_straddle_price(sol.nodes_S, params, params.r_b)
        meta["bs_value_at_strike"] = float(
            bs_straddle_price(params.K, params, params.r_b)
        )
        meta["abs_error_at_strike"] = abs(
            meta["value_at_strike"] - meta["bs_value_at_strike"]
        )
        columns += ["bs_value", "abs_error"]
        for row, r in zip(slice_rows, ref):
            row.extend([float(r), abs(row[1] - float(r))])
    return {"meta": meta, "columns": columns, "rows": slice_rows}


@dataclass
class ConvergenceRow:
    nE: int
    Nt: int
    value: float | None
    change: float | None
    ratio: float | None
    total_iterations: int | None
    average_iterations: float | None
    wall_time_s: float | None
    rel_time_vs_fdm: float | None
    error: str = ""


@dataclass
class ConvergenceReport:
    method: str
    position: str
    rows: list[ConvergenceRow]

    COLUMNS = (
        "ne", "nt", "value", "change", "ratio",
        "total_iterations", "average_iterations", "wall_time_s",
        "rel_time_vs_fdm", "error",
    )

    def as_rows(self) -> list[list]:
        return [
            [r.nE, r.Nt, r.value, r.change, r.ratio, r.total_iterations,
             r.average_iterations, r.wall_time_s, r.rel_time_vs_fdm, r.error]
            for r in self.rows
        ]

    def check_consistency(self) -> None:
        """Changes and ratios must be recomputable from the value column."""
        prev_value = None
        prev_change = None
        for r in self.rows:
            if r.value is None:
                prev_value, prev_change = None, None
                continue
            change = None if prev_value is None else abs(r.value - prev_value)
            if (change is None) != (r.change is None):
                raise AssertionError("change column inconsistent with values")
            if change is not None and abs(change - r.change) > 1e-12 * (1 + change):
                raise AssertionError("change column inconsistent with values")
            ratio = (
                prev_change / change
                if (prev_change is not None and change not in (None, 0.0))
                else None
            )
            if (ratio is None) != (r.ratio is None):
                raise AssertionError("ratio column inconsistent with changes")
            if ratio is not None and abs(ratio - r.ratio) > 1e-9 * (1 + ratio):
                raise AssertionError("ratio column inconsistent with changes")
            prev_value, prev_change = r.value, change


def run_convergence_study(
    config: RunConfig, levels: list[tuple[int, int]] | None = None
) -> ConvergenceReport:
    """Run each refinement level and tabulate value/change/ratio/timings.

    A failing level is recorded with its error message and the study
    continues; change/ratio chains restart after a failed row.  For non-FDM
    methods each level also runs the FDM benchmark at the matched (n, Nt)
    to fill the relative-time column.
    """
    levels = list(levels) if levels is not None else list(DEFAULT_LEVELS)
    if len(levels) < 2:
        raise ValueError("a convergence study needs at least 2 levels")
    rows: list[ConvergenceRow] = []
    prev_value: float | None = None
    prev_change: float | None = None
    for nE, Nt in levels:
        try:
            sol = _run(config, nE=nE, Nt=Nt)
        except (NonConvergenceError, ValueError) as exc:
            rows.append(ConvergenceRow(nE, Nt, None, None, None, None, None, None,
                                       None, error=str(exc)))
            prev_value, prev_change = None, None
            continue
        value = sol.value_at_strike
        change = None if prev_value is None else abs(value - prev_value)
        ratio = (
            prev_change / change
            if (prev_change is not None and change not in (None, 0.0))
            else None
        )
        rel_time = None
        if config.method.lower() != "fdm":
            fdm_sol = _run(config, nE=nE, Nt=Nt, method="fdm")
            if fdm_sol.wall_time > 0:
                rel_time = sol.wall_time / fdm_sol.wall_time
        rows.append(
            ConvergenceRow(
                nE=nE, Nt=Nt, value=value, change=change, ratio=ratio,
                total_iterations=sol.total_iterations,
                average_iterations=sol.average_iterations,
                wall_time_s=sol.wall_time,
                rel_time_vs_fdm=rel_time,
            )
        )
        prev_value, prev_change = value, change
    report = ConvergenceReport(
        method=config.method, position=config.position.value, rows=rows
    )
    report.check_consistency()
    return report


def surface_rows(solution: SolutionGrid, stride: int) -> tuple[list[str], list[list]]:
    """(S, t, V) triples every ``stride`` time levels (payoff and t=0 always)."""
    if stride < 1:
        raise ValueError(f"stride must be positive, got {stride}")
    N_t = solution.values.shape[1] - 1
    levels = sorted(set(range(0, N_t + 1, stride)) | {N_t})
    T = solution.params.T
    rows = []
    for m in levels:
        t = T - solution.taus[m]
        for j, S in enumerate(solution.nodes_S):
            rows.append([float(S), float(t), float(solution.values[j, m])])
    return ["S", "t", "value"], rows


def greeks_rows(solution: SolutionGrid, level: int = -1) -> tuple[list[str], list[list]]:
    """Per-node delta/gamma/theta export at one time level."""
    g = compute_greeks(solution, level)
    rows = [
        [float(s), float(v), float(d), float(ga), float(th)]
        for s, v, d, ga, th in zip(
            g.S, solution.values[:, level], g.delta, g.gamma, g.theta
        )
    ]
    return ["S", "value", "delta", "gamma", "theta"], rows


# ---- serialization ------------------------------------------------------

def _fmt(x) -> str:
    """Full-precision text for report numbers (17 significant digits)."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_rows(
    columns: list[str],
    rows: list[list],
    out_format: str = "csv",
    out_path: str | None = None,
    meta: dict | None = None,
) -> None:
    """Write a report as delimited text or JSON with identical field names."""
    if out_format == "csv":
        lines = []
        if meta:
            lines.extend(f"# {k}={_fmt(v)}" for k, v in meta.items())
        lines.append(",".join(columns))
        lines.extend(",".join(_fmt(x) for x in row) for row in rows)
        text = "\n".join(lines) + "\n"
    elif out_format == "json":
        payload = {"rows": [dict(zip(columns, row)) for row in rows]}
        if meta:
            payload["meta"] = meta
        text = json.dumps(payload, indent=2, default=float) + "\n"
    else:
        raise ValueError(f"unknown format {out_format!r}")
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)
