"""Finite-element pricing of European straddles with stock borrowing fees.

The borrow fee makes the long and short sides of the contract solve
different nonlinear HJB equations; this package discretizes them with P1/P2
Lagrange elements on a log-price mesh (plus a finite-difference benchmark),
marches in time with Crank-Nicolson-Rannacher stepping, resolves the
optional control term by a policy iteration, and post-processes Greeks.
"""
from .banded import BandedMatrix, SingularMatrixError, solve_banded
from .fdm import FdmGrid, build_fdm_grid, build_fdm_operators, run_fdm
from .greeks import GreeksGrid, compute_delta, compute_gamma, compute_greeks, compute_theta, greek_at
from .harness import (
    DEFAULT_LEVELS,
    ConvergenceReport,
    RunConfig,
    price_report,
    run_convergence_study,
    surface_rows,
    greeks_rows,
)
from .market import (
    MarketParams,
    Position,
    boundary_values,
    bs_straddle_greeks,
    bs_straddle_price,
    from_log,
    straddle_payoff,
    to_log,
)
from .mesh import Mesh, build_mesh, interpolate, strike_node_value
from .assembly import (
    BoundaryTerms,
    LocalMatrix,
    assemble,
    local_convection,
    local_mass,
    local_stiffness,
)
from .policy import (
    OP1,
    OP2,
    ZERO,
    ControlOperators,
    PolicyMatrix,
    build_control_operators,
    build_policy_matrix,
    select_policy,
)
from .timestepping import (
    NonConvergenceError,
    SolutionGrid,
    SolverConfig,
    SpatialSystem,
    TimeGrid,
    build_spatial_system,
    policy_newton_step,
    rannacher_schedule,
    run_pricer,
    step_matrices,
)

__version__ = "0.1.0"
