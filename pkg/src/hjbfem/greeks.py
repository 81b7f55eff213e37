"""Delta, gamma and theta recovered from the nodal solution.

Derivatives are taken in the log variable and mapped back by the chain
rule: with x = log(S/K),

    delta = V_x / S            gamma = (V_xx - V_x) / S^2.

P1 meshes and FDM grids use slope averaging (which reduces to central
differences on a uniform grid); P2 meshes differentiate the local quadratic
exactly, averaging the two one-sided values at shared vertices.  Theta is
the backward difference in tau with the sign flipped to calendar time; note
it estimates the derivative half a step before the queried level.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh, P2
from .timestepping import SolutionGrid

__all__ = [
    "GreeksGrid",
    "compute_delta",
    "compute_gamma",
    "compute_theta",
    "compute_greeks",
    "greek_at",
]


@dataclass(frozen=True)
class GreeksGrid:
    """Per-node sensitivities at one time level."""

    S: np.ndarray
    delta: np.ndarray
    gamma: np.ndarray
    theta: np.ndarray | None = None


def _p1_derivatives(nodes_x: np.ndarray, values: np.ndarray):
    """Nodal V_x and V_xx from piecewise-linear data.

    The nodal slope averages the two adjacent element slopes (one-sided at
    the ends); V_xx is the standard non-uniform three-point second
    difference, copied outward at the ends.
    """
    h = np.diff(nodes_x)
    slopes = np.diff(values) / h
    v_x = np.empty_like(values)
    v_x[1:-1] = 0.5 * (slopes[:-1] + slopes[1:])
    v_x[0] = slopes[0]
    v_x[-1] = slopes[-1]
    v_xx = np.empty_like(values)
    v_xx[1:-1] = 2.0 * (slopes[1:] - slopes[:-1]) / (h[:-1] + h[1:])
    v_xx[0] = v_xx[1]
    v_xx[-1] = v_xx[-2]
    return v_x, v_xx


def _p2_derivatives(mesh: Mesh, values: np.ndarray):
    """Exact derivatives of the local quadratics, averaged at shared vertices."""
    nE = mesh.nE
    v_x = np.zeros(mesh.n_nodes)
    v_xx = np.zeros(mesh.n_nodes)
    counts = np.zeros(mesh.n_nodes)
    h = mesh.h
    vl = values[0:-2:2]
    vm = values[1:-1:2]
    vr = values[2::2]
    d_left = (-3.0 * vl + 4.0 * vm - vr) / h
    d_mid = (vr - vl) / h
    d_right = (vl - 4.0 * vm + 3.0 * vr) / h
    d2 = 4.0 * (vl - 2.0 * vm + vr) / h**2
    left_ids = 2 * np.arange(nE)
    np.add.at(v_x, left_ids, d_left)
    np.add.at(v_x, left_ids + 1, d_mid)
    np.add.at(v_x, left_ids + 2, d_right)
    np.add.at(v_xx, left_ids, d2)
    np.add.at(v_xx, left_ids + 1, d2)
    np.add.at(v_xx, left_ids + 2, d2)
    np.add.at(counts, left_ids, 1.0)
    np.add.at(counts, left_ids + 1, 1.0)
    np.add.at(counts, left_ids + 2, 1.0)
    return v_x / counts, v_xx / counts


def _derivatives(grid_values: np.ndarray, mesh_or_grid):
    values = np.asarray(grid_values, dtype=float)
    nodes_x = mesh_or_grid.nodes_x
    if values.shape[0] != len(nodes_x):
        raise ValueError(
            f"values length {values.shape[0]} does not match node count {len(nodes_x)}"
        )
    if getattr(mesh_or_grid, "order", None) == P2:
        return _p2_derivatives(mesh_or_grid, values)
    return _p1_derivatives(nodes_x, values)


def compute_delta(grid_values: np.ndarray, mesh_or_grid) -> np.ndarray:
    """Per-node dV/dS at one time level."""
    v_x, _ = _derivatives(grid_values, mesh_or_grid)
    return v_x / mesh_or_grid.nodes_S


def compute_gamma(grid_values: np.ndarray, mesh_or_grid) -> np.ndarray:
    """Per-node d2V/dS2 at one time level."""
    v_x, v_xx = _derivatives(grid_values, mesh_or_grid)
    return (v_xx - v_x) / mesh_or_grid.nodes_S**2


def compute_theta(solution: SolutionGrid, level: int = -1) -> np.ndarray:
    """Per-node dV/dt from the backward difference in tau.

    The estimate is centred between levels ``level-1`` and ``level``; it is
    undefined at the payoff level.
    """
    m = level if level >= 0 else solution.values.shape[1] + level
    if m < 1:
        raise ValueError("theta needs a previous time level (level >= 1)")
    dtau = solution.taus[m] - solution.taus[m - 1]
    return -(solution.values[:, m] - solution.values[:, m - 1]) / dtau


def compute_greeks(solution: SolutionGrid, level: int = -1) -> GreeksGrid:
    """Delta, gamma and theta at one time level (default: t = 0)."""
    geometry = solution.mesh if solution.mesh is not None else solution.grid
    vals = solution.values[:, level]
    return GreeksGrid(
        S=solution.nodes_S.copy(),
        delta=compute_delta(vals, geometry),
        gamma=compute_gamma(vals, geometry),
        theta=compute_theta(solution, level),
    )


def greek_at(greeks: GreeksGrid, field: str, S: float) -> float:
    """Linear interpolation of a nodal Greek array at asset price S."""
    arr = getattr(greeks, field)
    if arr is None:
        raise ValueError(f"greek {field!r} not available")
    if not greeks.S[0] <= S <= greeks.S[-1]:
        raise ValueError(f"query S={S} outside the node range")
    return float(np.interp(S, greeks.S, arr))
