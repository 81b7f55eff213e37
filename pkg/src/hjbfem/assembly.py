"""Closed-form P1/P2 element matrices and banded global assembly.

The log transformation makes all PDE coefficients constant, so every element
integral has an exact closed form and no quadrature is needed.  Three local
blocks per element order:

* mass ``M``: integrals of basis products, scales with h;
* stiffness ``K``: stored with a leading minus sign (negative semidefinite,
  zero row sums), scales with 1/h;
* convection ``N``: h-independent slope/weight products.

Global operators are assembled element by element into banded storage
(tridiagonal for P1, pentadiagonal for P2).  Dirichlet boundary rows and
columns are eliminated; the two boundary columns are returned separately so
the time stepper can carry the boundary data contribution explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .banded import BandedMatrix
from .mesh import Mesh, P1, P2

__all__ = [
    "LocalMatrix",
    "BoundaryTerms",
    "local_mass",
    "local_stiffness",
    "local_convection",
    "assemble",
    "assemble_boundary_terms",
    "eliminate_dirichlet",
]

MASS = "mass"
STIFFNESS = "stiffness"
CONVECTION = "convection"


@dataclass(frozen=True)
class LocalMatrix:
    """One element's contribution: a 2x2 (P1) or 3x3 (P2) block."""

    order: str
    kind: str
    entries: np.ndarray
    h: float


def _check_order(order: str) -> None:
    if order not in (P1, P2):
        raise ValueError(f"order must be 'P1' or 'P2', got {order!r}")


def local_mass(order: str, h: float) -> LocalMatrix:
    """Element mass block; rows integrate the basis functions (total h)."""
    _check_order(order)
    if not h > 0:
        raise ValueError(f"element size must be positive, got {h}")
    if order == P1:
        entries = (h / 6.0) * np.array([[2.0, 1.0], [1.0, 2.0]])
    else:
        entries = (h / 30.0) * np.array(
            [[4.0, 2.0, -1.0], [2.0, 16.0, 2.0], [-1.0, 2.0, 4.0]]
        )
    return LocalMatrix(order, MASS, entries, h)


def local_stiffness(order: str, h: float) -> LocalMatrix:
    """Element stiffness block, stored with its leading minus sign."""
    _check_order(order)
    if not h > 0:
        raise ValueError(f"element size must be positive, got {h}")
    if order == P1:
        entries = (-1.0 / h) * np.array([[1.0, -1.0], [-1.0, 1.0]])
    else:
        entries = (-1.0 / (3.0 * h)) * np.array(
            [[7.0, -8.0, 1.0], [-8.0, 16.0, -8.0], [1.0, -8.0, 7.0]]
        )
    return LocalMatrix(order, STIFFNESS, entries, h)


def local_convection(order: str) -> LocalMatrix:
    """Element convection block; independent of the element size."""
    _check_order(order)
    if order == P1:
        entries = 0.5 * np.array([[-1.0, 1.0], [-1.0, 1.0]])
    else:
        entries = (1.0 / 6.0) * np.array(
            [[-3.0, -4.0, 1.0], [4.0, 0.0, -4.0], [-1.0, 4.0, 3.0]]
        )
    return LocalMatrix(order, CONVECTION, entries, h=np.nan)


def _local_block(order: str, kind: str, h: float) -> np.ndarray:
    """Element block in the orientation used by the global operators.

    The convection block is oriented so that row j of the assembled matrix
    applied to nodal values approximates the weighted slope
    ``integral(psi_j * v_x)``.  For P1 this is the closed form above; the P2
    closed form is written with test and trial roles swapped, so assembly
    uses its transpose.  Both orientations agree up to sign on interior rows
    after global assembly.
    """
    if kind == MASS:
        return local_mass(order, h).entries
    if kind == STIFFNESS:
        return local_stiffness(order, h).entries
    if kind == CONVECTION:
        block = local_convection(order).entries
        return block if order == P1 else block.T
    raise ValueError(f"unknown operator kind {kind!r}")


@dataclass(frozen=True)
class BoundaryTerms:
    """Boundary-column contributions of the assembled operators.

    Each array has shape (n_interior, 2): the eliminated first and last
    columns restricted to interior rows.  ``b_hat_M`` is the mass boundary
    column sitting under the time derivative; it equals ``b_M`` but is kept
    as its own field because the stepper treats the two differently.
    """

    b_M: np.ndarray
    b_K: np.ndarray
    b_N: np.ndarray
    b_hat_M: np.ndarray


def assemble(mesh: Mesh, kind: str) -> tuple[BandedMatrix, np.ndarray]:
    """Assemble a global operator over interior nodes.

    Returns the interior banded matrix (bandwidth 1 for P1, 2 for P2) and
    the (n_interior, 2) boundary-column matrix holding the eliminated first
    and last columns.
    """
    n = mesh.n_nodes
    bw = 1 if mesh.order == P1 else 2
    full = BandedMatrix.zeros(n, bw)
    base = _local_block(mesh.order, kind, 1.0)
    if kind == MASS:
        scale = mesh.h
    elif kind == STIFFNESS:
        scale = 1.0 / mesh.h
    else:
        scale = np.ones(mesh.nE)
    per = mesh.nodes_per_element
    first_dof = np.arange(mesh.nE) * (per - 1)
    for a in range(per):
        rows = first_dof + a
        for b in range(per):
            # vertex rows are shared between neighbouring elements
            np.add.at(full.data[bw + (b - a)], rows, base[a, b] * scale)
    return eliminate_dirichlet(full)


def eliminate_dirichlet(full: BandedMatrix) -> tuple[BandedMatrix, np.ndarray]:
    """Drop the first and last row/column of a full-domain operator.

    Returns the interior operator and the two eliminated columns restricted
    to interior rows, shape (n-2, 2).
    """
    n, bw = full.n, full.bandwidth
    ni = n - 2
    interior = BandedMatrix.zeros(ni, bw)
    rows = np.arange(ni)
    for o in range(-bw, bw + 1):
        # interior (i, i+o) maps to full (i+1, i+1+o); offsets are unchanged
        keep = (rows + o >= 0) & (rows + o < ni)
        interior.data[bw + o, keep] = full.data[bw + o, rows[keep] + 1]
    bcols = np.zeros((ni, 2))
    for i in range(min(bw, ni)):
        bcols[i, 0] = full.get(i + 1, 0)
        bcols[ni - 1 - i, 1] = full.get(n - 2 - i, n - 1)
    return interior, bcols


def assemble_boundary_terms(mesh: Mesh) -> tuple[dict, BoundaryTerms]:
    """Assemble all three operators at once.

    Returns a dict {kind: interior BandedMatrix} and the grouped boundary
    columns.
    """
    M, b_M = assemble(mesh, MASS)
    K, b_K = assemble(mesh, STIFFNESS)
    N, b_N = assemble(mesh, CONVECTION)
    ops = {MASS: M, STIFFNESS: K, CONVECTION: N}
    return ops, BoundaryTerms(b_M=b_M, b_K=b_K, b_N=b_N, b_hat_M=b_M.copy())
