"""Scalar observables, error norms, decay-rate fitting, convergence orders.

All quadrature sums use the physical Gauss weights (reference weights
scaled by half the cell width per axis) in a fixed ascending reduction
order, so repeated observation of the same state is bit-identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dg import DGFunction1D, PhaseSpaceField
from .field import gauss_residual, moment_arrays
from .quadrature import basis
from .stepper import SimState


@dataclass(frozen=True)
class DiagRecord:
    t: float
    e_electric: float
    e_kinetic: float
    e_total: float
    mass: float
    momentum: float
    gauss_res: float
    l2_f: float
    min_f: float

    CSV_FIELDS = ("t", "E_E", "E_K", "E_total", "L1", "P", "gauss_res")

    def csv_row(self) -> str:
        vals = (self.t, self.e_electric, self.e_kinetic, self.e_total,
                self.mass, self.momentum, self.gauss_res)
        return ",".join(f"{v:.17g}" for v in vals)


def _phase_weights(f: PhaseSpaceField) -> tuple[np.ndarray, np.ndarray]:
    w = basis(f.k).rule.weights
    wx = 0.5 * f.mesh_x.dx * w
    wv = 0.5 * f.mesh_v.dx * w
    return wx, wv


def observe(state: SimState, lam_in_residual: bool = True) -> DiagRecord:
    """All scalar diagnostics of the current state."""
    f = state.f
    wx, wv = _phase_weights(f)
    vmat = f.v_nodes()
    nx, p = f.mesh_x.n_cells, f.k + 1

    flat = f.values.reshape(nx, p, -1)
    line_mass = flat @ np.broadcast_to(wv, vmat.shape).ravel()
    line_mom = flat @ (vmat * wv[None, :]).ravel()
    line_kin = flat @ (vmat * vmat * wv[None, :]).ravel()

    mass = float(np.sum(line_mass * wx[None, :]))
    momentum = float(np.sum(line_mom * wx[None, :]))
    e_kinetic = 0.5 * float(np.sum(line_kin * wx[None, :]))
    e_electric = 0.5 * state.lam**2 * float(np.sum(state.e_nodal**2 * wx[None, :]))

    n_dg = DGFunction1D.from_nodal(f.mesh_x, f.k, moment_arrays(f)[0])
    res = gauss_residual(state.e_dg(), n_dg, state.lam if lam_in_residual else 1.0)

    l2_f = math.sqrt(float(np.einsum("ipjq,p,q->", f.values**2, wx, wv)))
    return DiagRecord(
        t=state.t,
        e_electric=e_electric,
        e_kinetic=e_kinetic,
        e_total=e_electric + e_kinetic,
        mass=mass,
        momentum=momentum,
        gauss_res=res,
        l2_f=l2_f,
        min_f=float(np.min(f.values)),
    )


def error_norms(f_num: PhaseSpaceField, f_ref: PhaseSpaceField) -> tuple[float, float]:
    """(L1, L2) quadrature norms of f_num - f_ref on the shared tensor grid."""
    if (f_num.mesh_x, f_num.mesh_v, f_num.k) != (f_ref.mesh_x, f_ref.mesh_v, f_ref.k):
        raise ValueError("fields must share meshes and degree")
    wx, wv = _phase_weights(f_num)
    diff = f_num.values - f_ref.values
    l1 = float(np.einsum("ipjq,p,q->", np.abs(diff), wx, wv))
    l2 = math.sqrt(float(np.einsum("ipjq,p,q->", diff**2, wx, wv)))
    return l1, l2


def field_error(e_num: np.ndarray, e_ref: np.ndarray, dx: float, k: int) -> float:
    """L2 quadrature norm of the nodal field difference."""
    w = 0.5 * dx * basis(k).rule.weights
    diff = np.asarray(e_num) - np.asarray(e_ref)
    return math.sqrt(float(np.sum(diff**2 * w[None, :])))


def fit_decay_rate(times, energies, guard: int = 3) -> float:
    """Field-amplitude decay rate from the peaks of the electric energy.

    Strict local maxima (with a guard band) of E_E(t) are fitted by least
    squares on (t_peak, log sqrt(E_E)); the slope is directly comparable
    to the linear-theory amplitude rate.
    """
    t = np.asarray(times, dtype=float)
    e = np.asarray(energies, dtype=float)
    if t.shape != e.shape or t.ndim != 1:
        raise ValueError("times and energies must be 1D arrays of equal length")
    if e.size and np.all(e == e[0]):
        return 0.0  # flat series has no peaks and no trend
    peaks = []
    for i in range(guard, len(e) - guard):
        window = e[i - guard:i + guard + 1]
        if e[i] > 0 and e[i] == window.max() and np.sum(window == e[i]) == 1:
            peaks.append(i)
    if len(peaks) < 3:
        raise ValueError(f"found {len(peaks)} electric-energy peaks; need at least 3")
    tp = t[peaks]
    yp = 0.5 * np.log(e[peaks])
    slope = np.polyfit(tp, yp, 1)[0]
    return float(slope)


def convergence_order(h, errors) -> list[float]:
    """Pairwise observed orders log(e1/e2)/log(h1/h2); nan where an error
    vanishes (exactly resolved)."""
    h = np.asarray(h, dtype=float)
    e = np.asarray(errors, dtype=float)
    if h.shape != e.shape or len(h) < 2:
        raise ValueError("need matching h/error sequences with >= 2 levels")
    out = []
    for i in range(1, len(h)):
        if e[i - 1] == 0.0 or e[i] == 0.0:
            out.append(float("nan"))
        else:
            out.append(float(np.log(e[i - 1] / e[i]) / np.log(h[i - 1] / h[i])))
    return out
