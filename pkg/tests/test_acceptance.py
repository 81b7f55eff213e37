"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Reference values are the benchmark tables' converged entries; coarse-grid
digits are not reproducible bit-for-bit (truncation bound, grid anchoring
and stopping scales are implementation choices), so the value criteria use
the converged levels with a 5e-3 band and the structural criteria check
ratios, orderings and oracle equivalences.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the criterion
lines as they pass.
"""
import itertools
import time

import numpy as np
import pytest

from hjbfem import (
    MarketParams,
    Position,
    SolverConfig,
    bs_straddle_greeks,
    bs_straddle_price,
    build_policy_matrix,
    build_spatial_system,
    compute_greeks,
    greek_at,
    local_convection,
    local_mass,
    local_stiffness,
    policy_newton_step,
    run_pricer,
    select_policy,
    straddle_payoff,
)
from hjbfem.banded import solve_banded
from hjbfem.market import boundary_values

# converged benchmark values (P2, nE=800, N_t=202)
LONG_REFERENCE = 22.6844044929
SHORT_REFERENCE = 24.1345181605
VALUE_TOL = 5e-3

TABLE_LEVELS = [(100, 27), (200, 52), (400, 102), (800, 202), (1600, 402), (3200, 802)]


def report(number: int, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"criterion {number:02d} [{status}] {detail}")
    assert ok, f"criterion {number} failed: {detail}"


@pytest.fixture(scope="module")
def sweep():
    """All table configurations for FDM, P1 and P2, both positions."""
    params = MarketParams()
    runs = {}
    for position in (Position.LONG, Position.SHORT):
        for method in ("fdm", "p1", "p2"):
            for nE, Nt in TABLE_LEVELS:
                runs[(method, position, nE)] = run_pricer(
                    params, position, method, nE, Nt
                )
    return params, runs


def test_criterion_1_element_matrix_exactness():
    t0 = time.perf_counter()
    worst = 0.0
    for h in (0.1, 1.0, 3.0):
        checks = [
            (local_mass("P1", h).entries,
             h / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])),
            (local_mass("P2", h).entries,
             h / 30.0 * np.array([[4.0, 2.0, -1.0], [2.0, 16.0, 2.0], [-1.0, 2.0, 4.0]])),
            (local_stiffness("P1", h).entries,
             -1.0 / h * np.array([[1.0, -1.0], [-1.0, 1.0]])),
            (local_stiffness("P2", h).entries,
             -1.0 / (3.0 * h) * np.array(
                 [[7.0, -8.0, 1.0], [-8.0, 16.0, -8.0], [1.0, -8.0, 7.0]])),
            (local_convection("P1").entries,
             0.5 * np.array([[-1.0, 1.0], [-1.0, 1.0]])),
            (local_convection("P2").entries,
             1.0 / 6.0 * np.array(
                 [[-3.0, -4.0, 1.0], [4.0, 0.0, -4.0], [-1.0, 4.0, 3.0]])),
        ]
        for got, want in checks:
            worst = max(worst, float(np.max(np.abs(got - want))))
    elapsed = time.perf_counter() - t0
    report(1, worst <= 1e-15,
           f"element matrices exact, max entry error {worst:.2e} "
           f"(tol 1e-15, {elapsed * 1e3:.1f} ms)")


def test_criterion_2_converged_long_price(sweep):
    _, runs = sweep
    sol = runs[("p2", Position.LONG, 800)]
    err = sol.value_at_strike - LONG_REFERENCE
    ok = abs(err) <= VALUE_TOL and sol.wall_time < 5.0
    report(2, ok,
           f"P2 long nE=800: {sol.value_at_strike:.10f} vs {LONG_REFERENCE} "
           f"(err {err:+.2e}, tol {VALUE_TOL}, {sol.wall_time:.2f}s < 5s)")


def test_criterion_3_converged_short_price(sweep):
    _, runs = sweep
    sol = runs[("p2", Position.SHORT, 800)]
    err = sol.value_at_strike - SHORT_REFERENCE
    ok = abs(err) <= VALUE_TOL and sol.wall_time < 5.0
    report(3, ok,
           f"P2 short nE=800: {sol.value_at_strike:.10f} vs {SHORT_REFERENCE} "
           f"(err {err:+.2e}, tol {VALUE_TOL}, {sol.wall_time:.2f}s < 5s)")


def test_criterion_4_fdm_p1_quadratic_convergence(sweep):
    _, runs = sweep
    details = []
    ok = True
    wall = 0.0
    for method in ("fdm", "p1"):
        for position in (Position.LONG, Position.SHORT):
            values = [runs[(method, position, nE)].value_at_strike
                      for nE, _ in TABLE_LEVELS[:5]]
            wall += sum(runs[(method, position, nE)].wall_time
                        for nE, _ in TABLE_LEVELS[:5])
            changes = np.abs(np.diff(values))
            ratios = changes[:-1] / changes[1:]  # at levels 400, 800, 1600
            in_band = np.all((ratios >= 3.5) & (ratios <= 4.5))
            ok = ok and bool(in_band)
            details.append(
                f"{method}/{position.value}: "
                + ",".join(f"{r:.2f}" for r in ratios)
            )
    ok = ok and wall < 120.0
    report(4, ok, "ratios in [3.5,4.5] " + "; ".join(details)
           + f" ({wall:.1f}s < 120s)")


def test_criterion_5_cross_method_agreement(sweep):
    _, runs = sweep
    ok = True
    details = []
    for position in (Position.LONG, Position.SHORT):
        fdm = runs[("fdm", position, 3200)].value_at_strike
        p1 = runs[("p1", position, 3200)].value_at_strike
        p2 = runs[("p2", position, 3200)].value_at_strike
        gap_fp = abs(fdm - p1)
        gap_12 = abs(p1 - p2)
        ok = ok and gap_fp <= 2e-4 and gap_12 <= 2e-3
        details.append(
            f"{position.value}: |FDM-P1|={gap_fp:.2e} (<=2e-4), "
            f"|P1-P2|={gap_12:.2e} (<=2e-3)"
        )
    report(5, ok, "finest level nE=3200: " + "; ".join(details))


def test_criterion_6_linear_reduction_oracle():
    params = MarketParams(r_b=0.05, r_l=0.05, r_f=0.0)
    sol = run_pricer(params, "long", "p2", 800, 202)
    price_ref = bs_straddle_price(params.K, params, 0.05)
    delta_ref, gamma_ref, _ = bs_straddle_greeks(params.K, params, 0.05)
    greeks = compute_greeks(sol)
    price_err = abs(sol.value_at_strike - price_ref)
    delta_err = abs(greek_at(greeks, "delta", params.K) - delta_ref)
    gamma_rel = abs(greek_at(greeks, "gamma", params.K) - gamma_ref) / gamma_ref
    ok = price_err <= 1e-3 and delta_err <= 1e-3 and gamma_rel <= 2e-3
    report(6, ok,
           f"linear reduction vs closed form at S=K: price err {price_err:.2e} "
           f"(<=1e-3), delta err {delta_err:.2e} (<=1e-3), "
           f"gamma rel err {gamma_rel:.2e} (<=2e-3)")


def test_criterion_7_policy_iteration_efficiency(sweep):
    _, runs = sweep
    worst = max(sol.average_iterations for sol in runs.values())
    all_converged = all(sol.converged for sol in runs.values())
    ok = worst <= 1.5 and all_converged
    report(7, ok,
           f"max average iterations over {len(runs)} table configurations: "
           f"{worst:.2f} (<=1.5), non-convergence never triggered")


def test_criterion_8_small_instance_policy_optimality():
    params = MarketParams(sigma=0.3, r_b=0.10, r_l=0.02, r_f=0.05)
    ok = True
    details = []
    for position in (Position.LONG, Position.SHORT):
        system = build_spatial_system(params, position, "p1", 4)
        g = np.array(boundary_values(params, 0.0))
        v0 = straddle_payoff(system.nodes_S, params.K)[1:-1]
        theta, dt = 1.0, params.T / 4.0
        v_star, _, pm_star = policy_newton_step(
            system, v0, SolverConfig(), theta, dt, g, g
        )

        def solve_fixed(policy):
            pm = build_policy_matrix(system.ops, np.array(policy, dtype=np.int8))
            A11 = system.mass - theta * dt * (system.L + pm.P)
            rhs = system.mass @ v0 + theta * dt * ((system.b_L + pm.b_P) @ g)
            return solve_banded(A11, rhs), pm

        # exhaustive 3^3 enumeration: the fixed point must coincide with a
        # self-consistent fixed policy and dominate every policy row-wise
        best_gap = np.inf
        consistent = 0
        rowwise_ok = True
        chosen = pm_star.apply(v_star, g)
        for policy in itertools.product((0, 1, 2), repeat=3):
            v_p, pm_p = solve_fixed(policy)
            if tuple(select_policy(system.ops, v_p, g)) == policy:
                consistent += 1
                best_gap = min(best_gap, float(np.max(np.abs(v_star - v_p))))
            other = pm_p.apply(v_star, g)
            if position is Position.SHORT:
                rowwise_ok = rowwise_ok and bool(np.all(chosen >= other - 1e-10))
            else:
                rowwise_ok = rowwise_ok and bool(np.all(chosen <= other + 1e-10))
        ok = ok and consistent >= 1 and best_gap <= 1e-10 and rowwise_ok
        details.append(
            f"{position.value}: {consistent} consistent policies, "
            f"fixed-point gap {best_gap:.1e}"
        )
    report(8, ok, "27-policy enumeration: " + "; ".join(details))


def test_criterion_9_short_dominates_long(sweep):
    _, runs = sweep
    ok = True
    details = []
    for method in ("fdm", "p1", "p2"):
        long_sol = runs[(method, Position.LONG, 800)]
        short_sol = runs[(method, Position.SHORT, 800)]
        worst = float(np.min(short_sol.values[:, -1] - long_sol.values[:, -1]))
        ok = ok and worst >= -1e-9
        details.append(f"{method}: min(short-long)={worst:.2e}")
    report(9, ok, "node-wise ordering at t=0: " + "; ".join(details))


def test_criterion_10_timing_sanity(sweep):
    _, runs = sweep

    def first_accurate_level(method, position, reference):
        for idx, (nE, _) in enumerate(TABLE_LEVELS):
            if abs(runs[(method, position, nE)].value_at_strike - reference) <= VALUE_TOL:
                return idx
        return len(TABLE_LEVELS)

    ok = True
    details = []
    for position, ref in ((Position.LONG, LONG_REFERENCE),
                          (Position.SHORT, SHORT_REFERENCE)):
        p2_level = first_accurate_level("p2", position, ref)
        fdm_level = first_accurate_level("fdm", position, ref)
        ok = ok and p2_level < fdm_level
        details.append(
            f"{position.value}: P2 accurate from level {TABLE_LEVELS[p2_level]}, "
            f"FDM from level {TABLE_LEVELS[fdm_level]}"
        )
    report(10, ok, "P2 reaches target accuracy earlier than FDM: "
           + "; ".join(details))
