"""Exact constant-coefficient semi-Lagrangian DG translation.

The update is the weak form: for every cell j and test function Psi,
integral of u_new * Psi over cell j equals the integral of u * Psi(.+s)
over the cell translated upstream by s.  For constant advection speed the
upstream cell is an exact translate, so splitting it at mesh nodes and
using (k+1)-point Gauss quadrature evaluates the right-hand side exactly;
there is no CFL restriction and no time integrator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dg import DGFunction1D
from .quadrature import PERIODIC, Mesh1D, basis
from ._advect_numpy import FRAC_SNAP


@dataclass(frozen=True)
class ShiftDecomposition:
    """Displacement s split as whole_cells * dx + frac with 0 <= frac < dx."""

    whole_cells: int
    frac: float


def decompose_shift(s: float, mesh: Mesh1D) -> ShiftDecomposition:
    if not math.isfinite(s):
        raise ValueError(f"shift must be finite, got {s}")
    dx = mesh.dx
    sc = s / dx
    c = math.floor(sc)
    rho = sc - c
    if rho > 1.0 - FRAC_SNAP:
        c += 1
        rho = 0.0
    elif rho < FRAC_SNAP:
        rho = 0.0
    return ShiftDecomposition(whole_cells=c, frac=rho * dx)


def advect_const(u: DGFunction1D, s: float) -> DGFunction1D:
    """Translate u by s (u_new(x) = u(x - s) projected back onto the mesh)."""
    dec = decompose_shift(s, u.mesh)
    if dec.frac == 0.0:
        # whole-cell translation: move coefficients, bit-for-bit
        n = u.mesh.n_cells
        if u.mesh.boundary == PERIODIC:
            coeffs = np.roll(u.coeffs, dec.whole_cells, axis=0)
        else:
            coeffs = np.zeros_like(u.coeffs)
            src = np.arange(n) - dec.whole_cells
            keep = (src >= 0) & (src < n)
            coeffs[keep] = u.coeffs[src[keep]]
        return DGFunction1D(u.mesh, u.k, coeffs)
    bas = basis(u.k)
    vals = np.ascontiguousarray(u.nodal()[None, :, :])
    shifts = np.array([s])
    new_vals = kernels.advect_lines(
        vals, shifts, u.mesh.dx, u.mesh.boundary == PERIODIC,
        bas.rule.nodes, bas.rule.weights, bas.vandermonde, bas.to_modal,
    )
    return DGFunction1D.from_nodal(u.mesh, u.k, new_vals[0])


def advect_lines_nodal(vals: np.ndarray, shifts: np.ndarray, mesh: Mesh1D, k: int) -> np.ndarray:
    """Batch form on nodal line data (L, n_cells, k+1), one shift per line."""
    bas = basis(k)
    return kernels.advect_lines(
        np.ascontiguousarray(vals), np.ascontiguousarray(shifts, dtype=float),
        mesh.dx, mesh.boundary == PERIODIC,
        bas.rule.nodes, bas.rule.weights, bas.vandermonde, bas.to_modal,
    )
