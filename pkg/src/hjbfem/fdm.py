"""Reference finite-difference discretization on a uniform log-price grid.

Central second-order stencils on the constant-coefficient transformed PDE,
with an identity mass matrix (collocation).  The grid is anchored so that
x = 0 (the strike) is always a node: keeping the strike kink at the same
grid position across refinement levels is what makes the value-change
ratios clean.  Shares the time stepper and policy iteration with the
finite-element pricer.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import eliminate_dirichlet
from .banded import BandedMatrix
from .market import MarketParams, Position

__all__ = ["FdmGrid", "FdmOperators", "build_fdm_grid", "build_fdm_operators", "run_fdm"]


@dataclass(frozen=True)
class FdmGrid:
    """Uniform grid in x = log(S/K) with the strike on a node."""

    n: int
    nodes_x: np.ndarray
    dx: float
    K: float

    @property
    def nodes_S(self) -> np.ndarray:
        return self.K * np.exp(self.nodes_x)

    @property
    def strike_index(self) -> int:
        return int(np.argmin(np.abs(self.nodes_x)))


def build_fdm_grid(params: MarketParams, n: int) -> FdmGrid:
    """Uniform x grid with n nodes spanning [x_min, x_max].

    The spacing is (x_max - x_min)/(n - 1) and the grid is shifted by less
    than one cell so that x = 0 lands exactly on a node; the domain ends
    move by at most dx, which is immaterial at these truncation depths.
    """
    if n < 3:
        raise ValueError(f"need at least 3 grid nodes, got {n}")
    dx = (params.x_max - params.x_min) / (n - 1)
    n_left = int(round(-params.x_min / dx))
    n_left = min(max(n_left, 1), n - 2)
    nodes_x = (np.arange(n) - n_left) * dx
    return FdmGrid(n=n, nodes_x=nodes_x, dx=dx, K=params.K)


@dataclass(frozen=True)
class FdmOperators:
    """Full-domain difference operators (rows at boundary nodes unused)."""

    diffusion: BandedMatrix
    convection: BandedMatrix
    reaction: BandedMatrix
    op1: BandedMatrix
    op2: BandedMatrix


def _first_difference(n: int, dx: float) -> BandedMatrix:
    D = BandedMatrix.zeros(n, 1)
    D.data[2, : n - 1] = 1.0 / (2.0 * dx)
    D.data[0, 1:] = -1.0 / (2.0 * dx)
    return D


def _second_difference(n: int, dx: float) -> BandedMatrix:
    D = BandedMatrix.zeros(n, 1)
    D.data[1, :] = -2.0 / dx**2
    D.data[2, : n - 1] = 1.0 / dx**2
    D.data[0, 1:] = 1.0 / dx**2
    return D


def build_fdm_operators(
    grid: FdmGrid, params: MarketParams, position: Position
) -> FdmOperators:
    """Central-difference operators for the transformed PDE.

    diffusion = (sigma^2/2) D_xx, convection = (rho - sigma^2/2) D_x and
    reaction = -rho I with rho the position's base rate; the control
    operators use the same central slope and the nodal identity for the
    value term.
    """
    n, dx = grid.n, grid.dx
    D1 = _first_difference(n, dx)
    D2 = _second_difference(n, dx)
    eye = BandedMatrix.identity(n, bandwidth=1)
    rho = params.base_rate(position)
    diffusion = (params.sigma**2 / 2.0) * D2
    convection = (rho - params.sigma**2 / 2.0) * D1
    reaction = -rho * eye
    if position is Position.LONG:
        c1 = params.r_l - params.r_b
        c2 = -(params.r_b - params.r_l + params.r_f)
    else:
        c1 = params.r_b - params.r_l
        c2 = -params.r_f
    op1 = c1 * (D1 - eye)
    op2 = c2 * D1
    return FdmOperators(
        diffusion=diffusion,
        convection=convection,
        reaction=reaction,
        op1=op1,
        op2=op2,
    )


def interior_system(grid: FdmGrid, params: MarketParams, position: Position):
    """Interior spatial operator, boundary columns and control operators.

    Returns (L, b_L, op1, b_op1, op2, b_op2) with all matrices reduced to
    interior nodes; the mass matrix is the identity and carries no boundary
    coupling.
    """
    ops = build_fdm_operators(grid, params, position)
    L_full = ops.diffusion + ops.convection + ops.reaction
    L, b_L = eliminate_dirichlet(L_full)
    op1, b_op1 = eliminate_dirichlet(ops.op1)
    op2, b_op2 = eliminate_dirichlet(ops.op2)
    return L, b_L, op1, b_op1, op2, b_op2


def run_fdm(params, position, n, N_t, config=None, rannacher_steps=2, theta=0.5):
    """Price with the FDM benchmark; same time loop as the FEM pricer."""
    from .timestepping import run_pricer

    return run_pricer(
        params,
        position,
        method="fdm",
        nE=n,
        N_t=N_t,
        config=config,
        rannacher_steps=rannacher_steps,
        theta=theta,
    )
