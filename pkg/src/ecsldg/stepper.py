"""The split update cycle for the Vlasov-Ampere system.

One step is a composition of two exact substep maps:

* transport: every v-node line advects in x by v * dt (periodic); the
  field is frozen.
* accel: moments of f give n and J at the x nodes; the field update
  (energy-conserving, explicit comparator, or a Poisson re-solve) yields
  the new E; every x-node line advects in v by -E_used * dt against a
  zero exterior, where E_used is the midpoint field (or the Poisson field
  in the reference mode).

Because each 1D advection is an exact projection of a translate, the
composed step conserves mass for any time step, and the midpoint field
coupling makes the total energy exact as well (degree >= 2).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .advect import advect_lines_nodal
from .dg import DGFunction1D, PhaseSpaceField
from .field import (
    SolverError,
    ampere_update_ec_nodal,
    ampere_update_explicit_nodal,
    moment_arrays,
    poisson_ldg,
)
from .splitting import ACCEL, TRANSPORT, SplittingScheme

EC = "ec"  # semi-implicit energy-conserving Ampere update
AE = "ae"  # explicit Ampere comparator
VP = "vp"  # Poisson re-solve each accel substep (reference mode)

FIELD_MODES = (EC, AE, VP)

# Nodal f magnitude allowed in the outermost v-cells before the run aborts.
V_BOUNDARY_TOL = 1e-12


@dataclass
class TimeControl:
    """Exactly one of cfl / dt drives the step size."""

    cfl: Optional[float] = None
    dt: Optional[float] = None

    def __post_init__(self):
        if (self.cfl is None) == (self.dt is None):
            raise ValueError("exactly one of cfl and dt must be set")


@dataclass
class SimState:
    f: PhaseSpaceField
    e_nodal: np.ndarray  # (N_x, k+1) values at the x Gauss nodes
    lam: float
    t: float = 0.0

    def copy(self) -> "SimState":
        return SimState(self.f.copy(), self.e_nodal.copy(), self.lam, self.t)

    def e_dg(self) -> DGFunction1D:
        return DGFunction1D.from_nodal(self.f.mesh_x, self.f.k, self.e_nodal)

    def reflect_v(self) -> "SimState":
        """Velocity reflection f(x,v) -> f(x,-v); E is unchanged."""
        return SimState(self.f.reflect_v(), self.e_nodal.copy(), self.lam, self.t)


def step_transport(state: SimState, dt: float) -> SimState:
    """x-direction substep: each v line translates by its node velocity."""
    if dt == 0.0:
        return state
    f = state.f
    nx, p, nv, _ = f.values.shape
    lines = np.ascontiguousarray(f.values.transpose(2, 3, 0, 1).reshape(nv * p, nx, p))
    shifts = f.v_nodes().ravel() * dt
    moved = advect_lines_nodal(lines, shifts, f.mesh_x, f.k)
    f.values = np.ascontiguousarray(moved.reshape(nv, p, nx, p).transpose(2, 3, 0, 1))
    return state


def step_accel(state: SimState, dt: float, mode: str = EC) -> SimState:
    """v-direction substep: field update plus velocity advection."""
    if mode not in FIELD_MODES:
        raise ValueError(f"unknown field mode {mode!r}")
    if dt == 0.0:
        return state
    f = state.f
    nx, p, nv, _ = f.values.shape
    n, j = moment_arrays(f)
    if mode == EC:
        e_new = ampere_update_ec_nodal(state.e_nodal, n, j, state.lam, dt)
        e_used = 0.5 * (state.e_nodal + e_new)
    elif mode == AE:
        e_new = ampere_update_explicit_nodal(state.e_nodal, n, j, state.lam, dt)
        e_used = 0.5 * (state.e_nodal + e_new)
    else:  # VP: re-solve Poisson and advect with that field directly
        n_dg = DGFunction1D.from_nodal(f.mesh_x, f.k, n)
        e_new = poisson_ldg(n_dg, state.lam).nodal()
        e_used = e_new
    lines = f.values.reshape(nx * p, nv, p)
    shifts = -dt * e_used.ravel()
    moved = advect_lines_nodal(lines, shifts, f.mesh_v, f.k)
    f.values = moved.reshape(nx, p, nv, p)
    state.e_nodal = e_new
    return state


def advance(state: SimState, dt: float, scheme: SplittingScheme, mode: str = EC) -> SimState:
    """One full step of the composed scheme; re-checks the v-boundary cells."""
    if not dt > 0:
        raise ValueError(f"outer time step must be positive, got {dt}")
    for kind, coeff in scheme.expand():
        if kind == TRANSPORT:
            step_transport(state, coeff * dt)
        else:
            step_accel(state, coeff * dt, mode)
    contamination = state.f.v_boundary_max()
    if contamination > V_BOUNDARY_TOL:
        raise SolverError(
            f"distribution reached the v boundary (|f| = {contamination:.3e} in the "
            "outermost cells); enlarge v_m"
        )
    state.f.zero_v_boundary()
    state.t += dt
    return state


def step_size(state: SimState, control: TimeControl) -> float:
    """dt = CFL / (v_m / dx + max|E| / dv) or the fixed override."""
    if control.dt is not None:
        return control.dt
    f = state.f
    v_m = f.mesh_v.hi
    max_e = float(np.max(np.abs(state.e_nodal)))
    return control.cfl / (v_m / f.mesh_x.dx + max_e / f.mesh_v.dx)


def run(
    state: SimState,
    t_final: float,
    control: TimeControl,
    scheme: SplittingScheme,
    mode: str = EC,
    on_step: Optional[Callable[[SimState], None]] = None,
    stop_times: tuple = (),
    on_stop: Optional[Callable[[SimState], None]] = None,
) -> SimState:
    """Advance to t_final, clipping steps so stop_times and t_final are hit
    exactly; on_step fires after every step, on_stop at each stop time."""
    if not t_final > state.t:
        raise ValueError(f"t_final {t_final} must exceed current time {state.t}")
    snaps = {float(s) for s in stop_times if state.t < s <= t_final}
    eps = 1e-12 * max(1.0, t_final)
    for target in sorted(snaps | {t_final}):
        while state.t < target - eps:
            dt = min(step_size(state, control), target - state.t)
            advance(state, dt, scheme, mode)
            if on_step is not None:
                on_step(state)
        state.t = target  # absorb accumulated round-off
        if on_stop is not None and target in snaps:
            on_stop(state)
    return state
