"""Refinement study for the straddle with stock borrowing fees.

Prices the long and short positions with the FDM benchmark, P1 and P2
elements over a sequence of simultaneous space/time refinements, and prints
the value at the strike, the successive change and the change ratio per
level.  A ratio near 4 indicates second-order convergence; P2 sits at the
converged value several levels before FDM or P1 get there.

Run:  python demos/01_convergence_tables.py [--full]

The default levels stop at nE=800 (a few seconds); --full adds the 1600 and
3200 levels.
"""
import sys
import time

from hjbfem import MarketParams, Position, RunConfig, run_convergence_study

LEVELS = [(100, 27), (200, 52), (400, 102), (800, 202)]
FULL_LEVELS = LEVELS + [(1600, 402), (3200, 802)]


def print_report(report):
    header = f"{'nE':>6} {'Nt':>5} {'value at K':>16} {'change':>12} {'ratio':>7} {'iters':>6} {'avg':>5} {'t[s]':>7}"
    print(header)
    print("-" * len(header))
    for row in report.rows:
        change = f"{row.change:.4e}" if row.change is not None else "-"
        ratio = f"{row.ratio:.2f}" if row.ratio is not None else "-"
        print(
            f"{row.nE:>6} {row.Nt:>5} {row.value:>16.10f} {change:>12} "
            f"{ratio:>7} {row.total_iterations:>6} {row.average_iterations:>5.2f} "
            f"{row.wall_time_s:>7.2f}"
        )
    print()


def main():
    levels = FULL_LEVELS if "--full" in sys.argv else LEVELS
    params = MarketParams()
    print(
        f"straddle with borrow fees: sigma={params.sigma}, r_b={params.r_b}, "
        f"r_l={params.r_l}, r_f={params.r_f}, K={params.K}, T={params.T}\n"
    )
    t0 = time.perf_counter()
    for position in (Position.LONG, Position.SHORT):
        for method in ("fdm", "p1", "p2"):
            config = RunConfig(position=position, method=method,
                               nE=levels[0][0], Nt=levels[0][1],
                               params=params)
            print(f"== {position.value} position, {method.upper()} ==")
            print_report(run_convergence_study(config, levels))
    print(f"total time {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
