"""Piecewise-discontinuous polynomial functions on 1D meshes and their
tensor-product phase-space counterpart.

DGFunction1D stores modal Legendre coefficients per cell; PhaseSpaceField
stores nodal values at the tensor Gauss points (that is what the field
update and the moment formulas consume).  The nodal<->modal conversion is
exact for polynomials of degree <= k, so the two views are equivalent.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quadrature import (
    ZERO_EXTERIOR,
    LegendreBasis,
    Mesh1D,
    basis,
    gauss_points,
    legendre_values,
)

# Dense rule used for projection integrals and oracle-grade integration.
_PROJECT_POINTS = 16


@dataclass
class DGFunction1D:
    """Piecewise polynomial of degree k: coeffs[i, a] multiplies P_a on cell i."""

    mesh: Mesh1D
    k: int
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.mesh.n_cells, self.k + 1):
            raise ValueError(
                f"coeff shape {self.coeffs.shape} != {(self.mesh.n_cells, self.k + 1)}"
            )

    @property
    def basis(self) -> LegendreBasis:
        return basis(self.k)

    @classmethod
    def zeros(cls, mesh: Mesh1D, k: int) -> "DGFunction1D":
        return cls(mesh, k, np.zeros((mesh.n_cells, k + 1)))

    @classmethod
    def from_nodal(cls, mesh: Mesh1D, k: int, vals: np.ndarray) -> "DGFunction1D":
        """Build from values at the k+1 Gauss nodes of each cell (exact)."""
        vals = np.asarray(vals, dtype=float)
        return cls(mesh, k, vals @ basis(k).to_modal)

    def nodal(self) -> np.ndarray:
        """Values at the Gauss nodes, shape (n_cells, k+1)."""
        return self.coeffs @ self.basis.vandermonde.T

    def copy(self) -> "DGFunction1D":
        return DGFunction1D(self.mesh, self.k, self.coeffs.copy())

    def __call__(self, x):
        return eval_dg(self, x)


def project(fn, mesh: Mesh1D, k: int, n_quad: int = _PROJECT_POINTS) -> DGFunction1D:
    """Cell-wise L2 projection of a pointwise function onto degree k.

    The projection integrals use an n_quad-point Gauss rule per cell, so
    polynomials of degree <= k are reproduced exactly and smooth functions
    are projected to quadrature accuracy far below the approximation error.
    """
    xg, wg = gauss_points(max(n_quad, k + 1))
    centers = mesh.cell_center(np.arange(mesh.n_cells))
    pts = centers[:, None] + 0.5 * mesh.dx * xg[None, :]
    vals = np.asarray(fn(pts), dtype=float)
    if vals.shape != pts.shape:
        vals = np.broadcast_to(vals, pts.shape)
    p = legendre_values(k, xg)  # (k+1, n_quad)
    scale = (2 * np.arange(k + 1) + 1) / 2.0
    coeffs = (vals * wg[None, :]) @ p.T * scale[None, :]
    return DGFunction1D(mesh, k, coeffs)


def eval_dg(u: DGFunction1D, x) -> np.ndarray | float:
    """Evaluate u at x (scalar or array).

    Interfaces belong to the cell on their right; periodic meshes wrap,
    zero_exterior meshes return 0 outside [lo, hi).
    """
    mesh = u.mesh
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    shape = x.shape
    x = np.atleast_1d(x).ravel()
    if mesh.boundary == ZERO_EXTERIOR:
        inside = (x >= mesh.lo) & (x < mesh.hi)
        xw = np.where(inside, x, mesh.lo)
    else:
        inside = np.ones(x.shape, dtype=bool)
        xw = mesh.lo + np.mod(x - mesh.lo, mesh.length)
    i = np.floor((xw - mesh.lo) / mesh.dx).astype(int)
    i = np.clip(i, 0, mesh.n_cells - 1)
    xi = (xw - mesh.cell_center(i)) / (0.5 * mesh.dx)
    p = legendre_values(u.k, xi)  # (k+1, M)
    out = np.einsum("ma,am->m", u.coeffs[i], p)
    out = np.where(inside, out, 0.0)
    if scalar:
        return float(out[0])
    return out.reshape(shape)


def integrate(u: DGFunction1D) -> float:
    """Exact integral of u over its domain."""
    return float(u.mesh.dx * np.sum(u.coeffs[:, 0]))


def integrate_moment(u: DGFunction1D, p: int) -> float:
    """Exact integral of u(x) * x**p for p in {0, 1, 2}."""
    if p not in (0, 1, 2):
        raise ValueError(f"moment power {p} not in {{0, 1, 2}}")
    # integrand degree k+p; k+2 Gauss points are exact to degree 2k+3
    xg, wg = gauss_points(u.k + 2)
    centers = u.mesh.cell_center(np.arange(u.mesh.n_cells))
    pts = centers[:, None] + 0.5 * u.mesh.dx * xg[None, :]
    pv = legendre_values(u.k, xg)  # (k+1, G)
    vals = u.coeffs @ pv  # (n_cells, G)
    return float(0.5 * u.mesh.dx * np.sum(vals * pts**p * wg[None, :]))


def cell_derivative(u: DGFunction1D) -> DGFunction1D:
    """Cell-wise strong derivative, re-embedded in degree k.

    No inter-cell jump contribution: this is the broken derivative used by
    the Gauss-law residual.
    """
    dcoeffs = u.coeffs @ u.basis.deriv.T * (2.0 / u.mesh.dx)
    return DGFunction1D(u.mesh, u.k, dcoeffs)


def l2_norm(u: DGFunction1D) -> float:
    """Exact L2 norm of the piecewise polynomial."""
    mode_weights = 2.0 / (2 * np.arange(u.k + 1) + 1)
    return float(np.sqrt(0.5 * u.mesh.dx * np.sum(u.coeffs**2 * mode_weights[None, :])))


@dataclass
class PhaseSpaceField:
    """Nodal distribution function on the tensor Gauss grid.

    values[i, p, j, q] is f at x-node (i, p) and v-node (j, q).  The first
    and last v-cells are kept identically zero (compact support); the
    stepper asserts this after every step.
    """

    mesh_x: Mesh1D
    mesh_v: Mesh1D
    k: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = self.k + 1
        expected = (self.mesh_x.n_cells, p, self.mesh_v.n_cells, p)
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} != {expected}")

    @classmethod
    def zeros(cls, mesh_x: Mesh1D, mesh_v: Mesh1D, k: int) -> "PhaseSpaceField":
        p = k + 1
        return cls(mesh_x, mesh_v, k, np.zeros((mesh_x.n_cells, p, mesh_v.n_cells, p)))

    @classmethod
    def project_separable(cls, fx, fv, mesh_x: Mesh1D, mesh_v: Mesh1D, k: int) -> "PhaseSpaceField":
        """Project f(x, v) = fx(x) * fv(v); exact tensor factorization of the 2D L2 projection."""
        ux = project(fx, mesh_x, k)
        uv = project(fv, mesh_v, k)
        vals = np.einsum("ip,jq->ipjq", ux.nodal(), uv.nodal())
        out = cls(mesh_x, mesh_v, k, vals)
        out.zero_v_boundary()
        return out

    @classmethod
    def project2d(cls, fn, mesh_x: Mesh1D, mesh_v: Mesh1D, k: int,
                  n_quad: int = _PROJECT_POINTS) -> "PhaseSpaceField":
        """Full 2D cell-wise L2 projection of a callable f(x, v)."""
        xg, wg = gauss_points(max(n_quad, k + 1))
        px = mesh_x.cell_center(np.arange(mesh_x.n_cells))[:, None] + 0.5 * mesh_x.dx * xg[None, :]
        pv = mesh_v.cell_center(np.arange(mesh_v.n_cells))[:, None] + 0.5 * mesh_v.dx * xg[None, :]
        vals = np.asarray(fn(px[:, :, None, None], pv[None, None, :, :]), dtype=float)
        p = legendre_values(k, xg)  # (k+1, G)
        scale = (2 * np.arange(k + 1) + 1) / 2.0
        proj = p * wg[None, :] * scale[:, None]  # (k+1, G): quadrature x basis
        bas = basis(k)
        modal = np.einsum("igjh,ag,bh->iajb", vals, proj, proj, optimize=True)
        nodal = np.einsum("iajb,pa,qb->ipjq", modal, bas.vandermonde, bas.vandermonde, optimize=True)
        out = cls(mesh_x, mesh_v, k, nodal)
        out.zero_v_boundary()
        return out

    def copy(self) -> "PhaseSpaceField":
        return PhaseSpaceField(self.mesh_x, self.mesh_v, self.k, self.values.copy())

    def x_nodes(self) -> np.ndarray:
        return self.mesh_x.node_matrix(basis(self.k).rule)

    def v_nodes(self) -> np.ndarray:
        return self.mesh_v.node_matrix(basis(self.k).rule)

    def x_line(self, j: int, q: int) -> DGFunction1D:
        """The x-dependence at fixed v-node (j, q), as a DG function."""
        return DGFunction1D.from_nodal(self.mesh_x, self.k, self.values[:, :, j, q])

    def set_x_line(self, j: int, q: int, u: DGFunction1D) -> None:
        self.values[:, :, j, q] = u.nodal()

    def v_line(self, i: int, p: int) -> DGFunction1D:
        """The v-dependence at fixed x-node (i, p)."""
        return DGFunction1D.from_nodal(self.mesh_v, self.k, self.values[i, p])

    def set_v_line(self, i: int, p: int, u: DGFunction1D) -> None:
        self.values[i, p] = u.nodal()

    def reflect_v(self) -> "PhaseSpaceField":
        """f(x, v) -> f(x, -v); exact on the grid (symmetric mesh and nodes)."""
        vals = self.values[:, :, ::-1, ::-1].copy()
        return PhaseSpaceField(self.mesh_x, self.mesh_v, self.k, vals)

    def zero_v_boundary(self) -> None:
        self.values[:, :, 0, :] = 0.0
        self.values[:, :, -1, :] = 0.0

    def v_boundary_max(self) -> float:
        return float(
            max(np.max(np.abs(self.values[:, :, 0, :])), np.max(np.abs(self.values[:, :, -1, :])))
        )
