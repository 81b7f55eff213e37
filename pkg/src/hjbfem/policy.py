"""Discrete control operators and the per-node policy selection.

The optional term of the HJB equation compares three controls at every
interior node: do nothing, or apply one of two linear operators built from
the convection and mass matrices,

* long position (inf):  op1 = (r_l - r_b) (N - M),  op2 = -(r_b - r_l + r_f) N
* short position (sup): op1 = (r_b - r_l) (N - M),  op2 = -r_f N

where row j of ``N`` applied to nodal values approximates the weighted slope
``integral(psi_j v_x)`` and ``M`` the weighted value.  The policy vector
records the winning control per node; the policy matrix splices the winning
operator rows into one banded matrix so the nonlinear term enters the time
step as an ordinary operator.

Both operators vanish identically when r_b == r_l and r_f == 0, which
reduces the pricer to plain linear Black-Scholes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .banded import BandedMatrix
from .market import MarketParams, Position

__all__ = [
    "ZERO",
    "OP1",
    "OP2",
    "ControlOperators",
    "PolicyMatrix",
    "build_control_operators",
    "select_policy",
    "build_policy_matrix",
]

# policy codes per interior node
ZERO, OP1, OP2 = 0, 1, 2


@dataclass(frozen=True)
class ControlOperators:
    """The two candidate control operators with their boundary columns."""

    op1: BandedMatrix
    b_op1: np.ndarray
    op2: BandedMatrix
    b_op2: np.ndarray
    position: Position

    @property
    def n(self) -> int:
        return self.op1.n

    def apply(self, which: int, v: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Operator action on interior values v with boundary data g."""
        if which == OP1:
            return self.op1 @ v + self.b_op1 @ g
        if which == OP2:
            return self.op2 @ v + self.b_op2 @ g
        return np.zeros(self.n)


@dataclass(frozen=True)
class PolicyMatrix:
    """Row splice of the operators selected by the policy vector."""

    P: BandedMatrix
    b_P: np.ndarray
    policy: np.ndarray

    def apply(self, v: np.ndarray, g: np.ndarray) -> np.ndarray:
        return self.P @ v + self.b_P @ g


def build_control_operators(
    mass: BandedMatrix,
    b_mass: np.ndarray,
    convection: BandedMatrix,
    b_convection: np.ndarray,
    params: MarketParams,
    position: Position,
) -> ControlOperators:
    """Form op1/op2 from assembled mass and convection operators.

    The callers pass the interior operators plus their boundary columns; the
    control operators inherit both so they can be evaluated on full nodal
    data (interior values plus Dirichlet boundary values).
    """
    if position is Position.LONG:
        c1 = params.r_l - params.r_b
        c2 = -(params.r_b - params.r_l + params.r_f)
    else:
        c1 = params.r_b - params.r_l
        c2 = -params.r_f
    op1 = c1 * (convection - mass)
    b_op1 = c1 * (b_convection - b_mass)
    op2 = c2 * convection
    b_op2 = c2 * b_convection
    return ControlOperators(op1=op1, b_op1=b_op1, op2=op2, b_op2=b_op2, position=position)


def select_policy(ops: ControlOperators, v: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Choose the optimal control per interior node.

    ``v`` holds interior nodal values and ``g`` the two boundary values, so
    every operator row is fully evaluable.  The case split follows the
    written order: the zero control wins when neither operator improves on
    it; ties between the two operators route to op2.
    """
    a1 = ops.apply(OP1, v, g)
    a2 = ops.apply(OP2, v, g)
    if ops.position is Position.LONG:
        take1 = (a1 < 0.0) & (a1 < a2)
        take2 = (a2 < 0.0) & (a1 >= a2)
    else:
        take1 = (a1 > 0.0) & (a1 > a2)
        take2 = (a2 > 0.0) & (a1 <= a2)
    return np.where(take1, OP1, np.where(take2, OP2, ZERO)).astype(np.int8)


def build_policy_matrix(ops: ControlOperators, policy: np.ndarray) -> PolicyMatrix:
    """Splice the selected operator rows into one banded matrix."""
    policy = np.asarray(policy)
    if policy.shape[0] != ops.n:
        raise ValueError(
            f"policy length {policy.shape[0]} does not match operator dimension {ops.n}"
        )
    P = BandedMatrix.zeros(ops.n, ops.op1.bandwidth)
    b_P = np.zeros_like(ops.b_op1)
    rows1 = np.flatnonzero(policy == OP1)
    rows2 = np.flatnonzero(policy == OP2)
    if rows1.size:
        P.splice_rows(rows1, ops.op1)
        b_P[rows1] = ops.b_op1[rows1]
    if rows2.size:
        P.splice_rows(rows2, ops.op2)
        b_P[rows2] = ops.b_op2[rows2]
    return PolicyMatrix(P=P, b_P=b_P, policy=policy)
