"""Non-uniform log-price mesh whose nodes are uniformly spaced in S.

Element boundaries are the log images of equally spaced asset prices on
[S_min, S_max]; element sizes in x therefore shrink from left to right.
P2 meshes add one midpoint per element, placed in x.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .market import MarketParams

__all__ = ["Mesh", "build_mesh", "strike_node_value", "interpolate"]

P1 = "P1"
P2 = "P2"


@dataclass(frozen=True)
class Mesh:
    """Immutable 1D Lagrange mesh in log-price coordinates.

    ``element_bounds`` are the nE+1 element edges in x; ``nodes_x`` holds all
    degrees of freedom (vertices for P1, vertices interleaved with midpoints
    for P2), ``nodes_S`` their asset-price images and ``h`` the per-element
    sizes in x.
    """

    order: str
    nE: int
    element_bounds: np.ndarray
    nodes_x: np.ndarray
    nodes_S: np.ndarray
    h: np.ndarray
    K: float

    @property
    def n_nodes(self) -> int:
        return len(self.nodes_x)

    @property
    def nodes_per_element(self) -> int:
        return 2 if self.order == P1 else 3

    def element_of(self, x: float) -> int:
        """Index of the element containing x (clamped to the valid range)."""
        e = int(np.searchsorted(self.element_bounds, x, side="right")) - 1
        return min(max(e, 0), self.nE - 1)

    def element_dofs(self, e: int) -> np.ndarray:
        """Global node indices of element e, left to right."""
        if self.order == P1:
            return np.array([e, e + 1])
        return np.array([2 * e, 2 * e + 1, 2 * e + 2])


def build_mesh(params: MarketParams, nE: int, order: str = P1) -> Mesh:
    """Partition the log-price domain into nE elements uniform in S.

    The S images of the element boundaries are equally spaced on
    [S_min, S_max]; their logs give a non-uniform x partition with
    decreasing element sizes.  For P2, each element midpoint is the
    arithmetic mean of its x endpoints.
    """
    if order not in (P1, P2):
        raise ValueError(f"order must be 'P1' or 'P2', got {order!r}")
    if nE < 2:
        raise ValueError(f"need at least 2 elements, got {nE}")
    S_bounds = np.linspace(params.S_min, params.S_max, nE + 1)
    x_bounds = np.log(S_bounds / params.K)
    if order == P1:
        nodes_x = x_bounds.copy()
    else:
        nodes_x = np.empty(2 * nE + 1)
        nodes_x[0::2] = x_bounds
        nodes_x[1::2] = 0.5 * (x_bounds[:-1] + x_bounds[1:])
    return Mesh(
        order=order,
        nE=nE,
        element_bounds=x_bounds,
        nodes_x=nodes_x,
        nodes_S=params.K * np.exp(nodes_x),
        h=np.diff(x_bounds),
        K=params.K,
    )


def _eval_p1(mesh: Mesh, values: np.ndarray, x: float) -> float:
    e = mesh.element_of(x)
    xl, xr = mesh.element_bounds[e], mesh.element_bounds[e + 1]
    t = (x - xl) / (xr - xl)
    return (1.0 - t) * values[e] + t * values[e + 1]


def _eval_p2(mesh: Mesh, values: np.ndarray, x: float) -> float:
    e = mesh.element_of(x)
    xl, xr = mesh.element_bounds[e], mesh.element_bounds[e + 1]
    xi = 2.0 * (x - xl) / (xr - xl) - 1.0  # reference coordinate in [-1, 1]
    vl, vm, vr = values[2 * e], values[2 * e + 1], values[2 * e + 2]
    return (
        vl * (-xi * (1.0 - xi) / 2.0)
        + vm * (1.0 - xi) * (1.0 + xi)
        + vr * xi * (1.0 + xi) / 2.0
    )


def interpolate(mesh: Mesh, values: np.ndarray, x) -> np.ndarray | float:
    """Evaluate the finite-element interpolant at log-price point(s) x.

    Piecewise linear for P1, piecewise quadratic for P2; exact at nodes.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] != mesh.n_nodes:
        raise ValueError(
            f"values has length {values.shape[0]}, mesh has {mesh.n_nodes} nodes"
        )
    evaluator = _eval_p1 if mesh.order == P1 else _eval_p2
    if np.ndim(x) == 0:
        return evaluator(mesh, values, float(x))
    return np.array([evaluator(mesh, values, xi) for xi in np.asarray(x, dtype=float)])


def strike_node_value(grid_values: np.ndarray, mesh: Mesh, S_query: float) -> float:
    """Value of the interpolant at asset price S_query (typically the strike).

    Returns the exact nodal value when S_query is a node; otherwise the
    piecewise linear (P1) or quadratic (P2) interpolant in x.
    """
    x = np.log(S_query / mesh.K)
    lo, hi = mesh.element_bounds[0], mesh.element_bounds[-1]
    if not lo - 1e-12 <= x <= hi + 1e-12:
        raise ValueError(
            f"query S={S_query} outside the mesh domain "
            f"[{mesh.nodes_S[0]:.6g}, {mesh.nodes_S[-1]:.6g}]"
        )
    j = int(np.argmin(np.abs(mesh.nodes_x - x)))
    if abs(mesh.nodes_x[j] - x) < 1e-13 * max(1.0, abs(x)):
        return float(grid_values[j])
    return float(interpolate(mesh, grid_values, x))


def is_strike_on_node(mesh: Mesh, S_query: float | None = None) -> bool:
    """Whether S_query (default: the strike) coincides with a mesh node."""
    S_query = mesh.K if S_query is None else S_query
    x = np.log(S_query / mesh.K)
    return bool(np.min(np.abs(mesh.nodes_x - x)) < 1e-13 * max(1.0, abs(x)))
