"""Energy-conserving semi-Lagrangian discontinuous Galerkin solver for the
1D1V Vlasov-Ampere system."""

from .advect import ShiftDecomposition, advect_const, decompose_shift
from .dg import (
    DGFunction1D,
    PhaseSpaceField,
    cell_derivative,
    eval_dg,
    integrate,
    integrate_moment,
    project,
)
from .diagnostics import (
    DiagRecord,
    convergence_order,
    error_norms,
    field_error,
    fit_decay_rate,
    observe,
)
from .field import (
    FieldState,
    Moments,
    SolverError,
    ampere_update_ec,
    ampere_update_explicit,
    compute_moments,
    gauss_residual,
    poisson_ldg,
)
from .kernels import active_backend
from .quadrature import Mesh1D, QuadratureRule, global_node, make_gauss_rule
from .scenarios import Scenario, by_name, strong_landau, two_stream_i, two_stream_ii, weak_landau
from .splitting import SplittingScheme, expand_scheme, parse_scheme
from .stepper import SimState, TimeControl, advance, run, step_accel, step_transport

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
