"""Theta-scheme time marching with Rannacher startup and policy iteration.

The semi-discrete system over interior nodes reads

    M dv/dtau + b_M dg/dtau = L v + b_L g + P(v) v + b_P(v) g

with M the mass matrix, L the linear spatial operator, P the policy matrix
for the optional control term and g the Dirichlet boundary data.  One theta
step solves

    [M - theta*dt*(L + P)] v_new = [M + (1-theta)*dt*(L + P_old)] v_old
                                   + boundary terms,

where the explicit side freezes the policy at the old iterate and the
implicit side resolves it by a penalty-like Newton iteration: rebuild the
policy from the current iterate, re-solve, and stop when either successive
iterates agree to tolerance or two successive policy matrices act
identically on the iterate.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import assembly
from . import fdm as fdm_mod
from .banded import BandedMatrix, solve_banded
from .market import MarketParams, Position, boundary_values, straddle_payoff
from .mesh import Mesh, P1, P2, build_mesh, is_strike_on_node, strike_node_value
from .policy import ControlOperators, PolicyMatrix, build_control_operators, build_policy_matrix, select_policy

__all__ = [
    "TimeGrid",
    "SolverConfig",
    "SolutionGrid",
    "SpatialSystem",
    "NonConvergenceError",
    "rannacher_schedule",
    "build_spatial_system",
    "step_matrices",
    "policy_newton_step",
    "run_pricer",
]

METHODS = ("fdm", "p1", "p2")


class NonConvergenceError(RuntimeError):
    """Policy iteration exhausted max_iter without meeting either criterion."""

    def __init__(self, message, last_iterate=None, step_index=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.step_index = step_index
        self.iterations = iterations


@dataclass(frozen=True)
class SolverConfig:
    """Stopping parameters of the per-step policy iteration."""

    tol: float = 1e-7
    scale: float = 1.0
    max_iter: int = 50

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform step schedule: a fully implicit startup, then theta stepping."""

    N_t: int
    dt: float
    rannacher_steps: int
    theta: float

    def __post_init__(self):
        if self.N_t < 1:
            raise ValueError(f"need at least one time step, got {self.N_t}")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")
        if not 0 <= self.rannacher_steps <= self.N_t:
            raise ValueError(
                f"rannacher_steps must lie in [0, N_t], got {self.rannacher_steps}"
            )

    def schedule(self) -> list[tuple[float, float]]:
        """(theta, dt) per step: implicit Euler first, then the main theta."""
        return [(1.0, self.dt)] * self.rannacher_steps + [
            (self.theta, self.dt)
        ] * (self.N_t - self.rannacher_steps)


def rannacher_schedule(
    N_t: int, rannacher_steps: int, T: float, theta: float = 0.5
) -> TimeGrid:
    """Time grid with dt = T/N_t and the first steps run fully implicit."""
    if N_t < 1:
        raise ValueError(f"need at least one time step, got {N_t}")
    if rannacher_steps < 0 or rannacher_steps > N_t:
        raise ValueError(
            f"rannacher_steps must lie in [0, N_t], got {rannacher_steps}"
        )
    return TimeGrid(N_t=N_t, dt=T / N_t, rannacher_steps=rannacher_steps, theta=theta)


@dataclass(frozen=True)
class SpatialSystem:
    """Assembled spatial discretization shared by the FEM and FDM pricers."""

    method: str
    params: MarketParams
    position: Position
    nodes_x: np.ndarray
    nodes_S: np.ndarray
    mass: BandedMatrix
    b_mass: np.ndarray
    b_hat_mass: np.ndarray
    L: BandedMatrix
    b_L: np.ndarray
    ops: ControlOperators
    mesh: Mesh | None = None
    grid: fdm_mod.FdmGrid | None = None

    @property
    def n_interior(self) -> int:
        return self.mass.n


def build_spatial_system(
    params: MarketParams, position: Position, method: str, nE: int
) -> SpatialSystem:
    """Assemble mass, spatial operator and control operators for a method.

    ``nE`` counts elements for the FEM methods and grid nodes for the FDM
    benchmark.  The linear operator combines the stored stiffness (leading
    minus sign), the weighted-slope convection and the mass/identity with
    the position's base rate rho:

        L = (sigma^2/2) K + (rho - sigma^2/2) N - rho M.
    """
    method = method.lower()
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    rho = params.base_rate(position)
    half_var = params.sigma**2 / 2.0
    if method == "fdm":
        grid = fdm_mod.build_fdm_grid(params, nE)
        L, b_L, op1, b_op1, op2, b_op2 = fdm_mod.interior_system(grid, params, position)
        ni = grid.n - 2
        mass = BandedMatrix.identity(ni, bandwidth=1)
        b_mass = np.zeros((ni, 2))
        ops = ControlOperators(op1=op1, b_op1=b_op1, op2=op2, b_op2=b_op2, position=position)
        return SpatialSystem(
            method=method, params=params, position=position,
            nodes_x=grid.nodes_x, nodes_S=grid.nodes_S,
            mass=mass, b_mass=b_mass, b_hat_mass=b_mass,
            L=L, b_L=b_L, ops=ops, grid=grid,
        )
    mesh = build_mesh(params, nE, order=P1 if method == "p1" else P2)
    mats, bterms = assembly.assemble_boundary_terms(mesh)
    M, K, N = mats[assembly.MASS], mats[assembly.STIFFNESS], mats[assembly.CONVECTION]
    L = half_var * K + (rho - half_var) * N - rho * M
    b_L = half_var * bterms.b_K + (rho - half_var) * bterms.b_N - rho * bterms.b_M
    ops = build_control_operators(M, bterms.b_M, N, bterms.b_N, params, position)
    return SpatialSystem(
        method=method, params=params, position=position,
        nodes_x=mesh.nodes_x, nodes_S=mesh.nodes_S,
        mass=M, b_mass=bterms.b_M, b_hat_mass=bterms.b_hat_M,
        L=L, b_L=b_L, ops=ops, mesh=mesh,
    )


def step_matrices(
    system: SpatialSystem, policy_matrix: PolicyMatrix, theta: float, dt: float
) -> tuple[BandedMatrix, BandedMatrix]:
    """Implicit and explicit theta-scheme matrices for the current policy."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    spatial = system.L + policy_matrix.P
    A11 = system.mass - (theta * dt) * spatial
    A11_tilde = system.mass + ((1.0 - theta) * dt) * spatial
    return A11, A11_tilde


def policy_newton_step(
    system: SpatialSystem,
    v_prev: np.ndarray,
    config: SolverConfig,
    theta: float,
    dt: float,
    g_old: np.ndarray,
    g_new: np.ndarray,
) -> tuple[np.ndarray, int, PolicyMatrix]:
    """Advance one theta step, resolving the policy nonlinearity.

    Returns the new interior values, the iteration count and the policy
    matrix in force at acceptance.  Stopping criterion 1 compares successive
    iterates; criterion 2 compares the action of successive policy matrices
    on the current iterate (boundary columns included).
    """
    ops = system.ops
    P0 = build_policy_matrix(ops, select_policy(ops, v_prev, g_old))
    explicit = system.mass @ v_prev + system.b_hat_mass @ (g_old - g_new)
    if theta < 1.0:
        w = (1.0 - theta) * dt
        explicit = explicit + w * (
            (system.L + P0.P) @ v_prev + (system.b_L + P0.b_P) @ g_old
        )
    Pk = P0
    v_iter = v_prev
    for k in range(1, config.max_iter + 1):
        A11 = system.mass - (theta * dt) * (system.L + Pk.P)
        rhs = explicit + (theta * dt) * ((system.b_L + Pk.b_P) @ g_new)
        v_new = solve_banded(A11, rhs)
        res1 = np.max(
            np.abs(v_new - v_iter) / np.maximum(config.scale, np.abs(v_new))
        )
        if res1 < config.tol:
            return v_new, k, Pk
        Pn = build_policy_matrix(ops, select_policy(ops, v_new, g_new))
        r_old = Pk.apply(v_new, g_new)
        r_new = Pn.apply(v_new, g_new)
        res2 = np.max(
            np.abs(r_old - r_new) / np.maximum(config.scale, np.abs(r_new))
        )
        if res2 < config.tol:
            return v_new, k, Pn
        Pk = Pn
        v_iter = v_new
    raise NonConvergenceError(
        f"policy iteration did not converge in {config.max_iter} iterations "
        f"(criterion residuals {res1:.3e} / {res2:.3e})",
        last_iterate=v_new,
        iterations=config.max_iter,
    )


@dataclass
class SolutionGrid:
    """Full pricing run output: nodal values per time level plus statistics."""

    values: np.ndarray  # (n_nodes, N_t + 1), column 0 is the payoff
    taus: np.ndarray
    nodes_x: np.ndarray
    nodes_S: np.ndarray
    iterations_per_step: list[int]
    total_iterations: int
    wall_time: float
    converged: bool
    method: str
    position: Position
    params: MarketParams
    time_grid: TimeGrid
    mesh: Mesh | None = None
    grid: fdm_mod.FdmGrid | None = None

    @property
    def average_iterations(self) -> float:
        return self.total_iterations / max(len(self.iterations_per_step), 1)

    @property
    def strike_on_node(self) -> bool:
        if self.mesh is not None:
            return is_strike_on_node(self.mesh)
        return bool(np.min(np.abs(self.nodes_x)) < 1e-13)

    def value_at(self, S: float, level: int = -1) -> float:
        """Interpolated value at asset price S on a given time level."""
        vals = self.values[:, level]
        if self.mesh is not None:
            return strike_node_value(vals, self.mesh, S)
        x = np.log(S / self.params.K)
        if not self.nodes_x[0] - 1e-12 <= x <= self.nodes_x[-1] + 1e-12:
            raise ValueError(f"query S={S} outside the grid domain")
        j = int(np.argmin(np.abs(self.nodes_x - x)))
        if abs(self.nodes_x[j] - x) < 1e-13 * max(1.0, abs(x)):
            return float(vals[j])
        return float(np.interp(x, self.nodes_x, vals))

    @property
    def value_at_strike(self) -> float:
        return self.value_at(self.params.K)


def run_pricer(
    params: MarketParams,
    position: Position | str,
    method: str,
    nE: int,
    N_t: int,
    config: SolverConfig | None = None,
    rannacher_steps: int = 2,
    theta: float = 0.5,
) -> SolutionGrid:
    """March the pricer from the payoff to maturity-time T.

    The first ``rannacher_steps`` steps run fully implicit, the rest at the
    given theta (0.5 = Crank-Nicolson).  Boundary values are held as
    Dirichlet data; the policy nonlinearity is resolved every step.  Raises
    NonConvergenceError if a step exhausts the iteration budget.
    """
    if isinstance(position, str):
        position = Position(position.lower())
    config = config or SolverConfig()
    method = method.lower()
    min_size = 3 if method == "fdm" else 2
    if nE < min_size:
        raise ValueError(f"spatial resolution {nE} too small for method {method!r}")
    system = build_spatial_system(params, position, method, nE)
    tg = rannacher_schedule(N_t, rannacher_steps, params.T, theta)

    n_nodes = len(system.nodes_x)
    values = np.empty((n_nodes, N_t + 1))
    taus = np.linspace(0.0, params.T, N_t + 1)
    values[:, 0] = straddle_payoff(system.nodes_S, params.K)
    v = values[1:-1, 0].copy()

    iterations: list[int] = []
    t0 = time.perf_counter()
    tau = 0.0
    for m, (th, dt) in enumerate(tg.schedule()):
        g_old = np.array(boundary_values(params, tau))
        tau = taus[m + 1]
        g_new = np.array(boundary_values(params, tau))
        v, iters, _ = policy_newton_step(system, v, config, th, dt, g_old, g_new)
        iterations.append(iters)
        values[0, m + 1], values[-1, m + 1] = g_new
        values[1:-1, m + 1] = v
    wall = time.perf_counter() - t0

    return SolutionGrid(
        values=values,
        taus=taus,
        nodes_x=system.nodes_x,
        nodes_S=system.nodes_S,
        iterations_per_step=iterations,
        total_iterations=int(sum(iterations)),
        wall_time=wall,
        converged=True,
        method=method,
        position=position,
        params=params,
        time_grid=tg,
        mesh=system.mesh,
        grid=system.grid,
    )
