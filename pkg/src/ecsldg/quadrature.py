"""Uniform 1D meshes, Gauss-Legendre rules, and the Legendre modal basis.

Everything downstream (DG projection, the advection kernel, the field
solver, the diagnostics) shares these tables.  The reference interval is
[-1, 1]; all cell-local work is affine-mapped onto it.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_DEGREE = 8

PERIODIC = "periodic"
ZERO_EXTERIOR = "zero_exterior"


def legendre_values(degree: int, x: np.ndarray) -> np.ndarray:
    """Evaluate P_0..P_degree at points x via the three-term recurrence.

    Returns an array of shape (degree+1,) + x.shape.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((degree + 1,) + x.shape)
    out[0] = 1.0
    if degree >= 1:
        out[1] = x
    for a in range(1, degree):
        out[a + 1] = ((2 * a + 1) * x * out[a] - a * out[a - 1]) / (a + 1)
    return out


def _legendre_and_derivative(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = legendre_values(n, x)
    if n == 0:
        return p[0], np.zeros_like(x)
    # (1-x^2) P_n'(x) = n (P_{n-1}(x) - x P_n(x))
    dp = n * (p[n - 1] - x * p[n]) / (1.0 - x * x)
    return p[n], dp


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule with k+1 nodes on (-1, 1); exact to degree 2k+1."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n_points(self) -> int:
        return self.order + 1


def gauss_points(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].

    Newton iteration on the roots of P_n from Chebyshev initial guesses,
    converged to 1e-15 and symmetrized so that nodes[i] == -nodes[n-1-i]
    exactly (velocity reflection relies on this).
    """
    if n < 1:
        raise ValueError(f"need at least one quadrature point, got {n}")
    i = np.arange(n)
    x = np.cos(np.pi * (4 * i + 3) / (4 * n + 2))
    for _ in range(100):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    x = 0.5 * (x - x[::-1])  # enforce exact symmetry
    _, dp = _legendre_and_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    w = 0.5 * (w + w[::-1])
    order = np.argsort(x)
    return x[order], w[order]


@lru_cache(maxsize=None)
def make_gauss_rule(k: int) -> QuadratureRule:
    """Gauss-Legendre rule with k+1 points, for polynomial degree k."""
    if not 0 <= k <= MAX_DEGREE:
        raise ValueError(f"degree k={k} outside supported range [0, {MAX_DEGREE}]")
    nodes, weights = gauss_points(k + 1)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(order=k, nodes=nodes, weights=weights)


class LegendreBasis:
    """Degree-k modal Legendre basis sampled at its own Gauss nodes.

    Tables
    ------
    vandermonde : V[p, a] = P_a(xi_p); nodal values from modal coeffs via C @ V.T.
    to_modal    : W[p, a] = (2a+1)/2 * w_p * P_a(xi_p); modal coeffs from nodal
                  values via vals @ W (exact for polynomials of degree <= k).
    deriv       : reference-space differentiation matrix on modal coeffs,
                  (d/dxi) sum c_a P_a = sum (D @ c)_a P_a.
    """

    def __init__(self, k: int):
        self.k = k
        self.rule = make_gauss_rule(k)
        xi = self.rule.nodes
        p = legendre_values(k, xi)  # (k+1, k+1): p[a, i] = P_a(xi_i)
        self.vandermonde = np.ascontiguousarray(p.T)
        scale = (2 * np.arange(k + 1) + 1) / 2.0
        self.to_modal = np.ascontiguousarray(
            self.vandermonde * self.rule.weights[:, None] * scale[None, :]
        )
        d = np.zeros((k + 1, k + 1))
        for b in range(k + 1):
            for a in range(b - 1, -1, -2):
                d[a, b] = 2 * a + 1
        self.deriv = d
        for arr in (self.vandermonde, self.to_modal, self.deriv):
            arr.setflags(write=False)


@lru_cache(maxsize=None)
def basis(k: int) -> LegendreBasis:
    """Shared immutable LegendreBasis instance for degree k."""
    return LegendreBasis(k)


@dataclass(frozen=True)
class Mesh1D:
    """Uniform partition of [lo, hi] into n_cells cells."""

    lo: float
    hi: float
    n_cells: int
    boundary: str = PERIODIC

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"need hi > lo, got [{self.lo}, {self.hi}]")
        if self.n_cells < 1:
            raise ValueError(f"need at least one cell, got {self.n_cells}")
        if self.boundary not in (PERIODIC, ZERO_EXTERIOR):
            raise ValueError(f"unknown boundary kind {self.boundary!r}")

    @property
    def dx(self) -> float:
        return (self.hi - self.lo) / self.n_cells

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def cell_center(self, i) -> float:
        return self.lo + (np.asarray(i) + 0.5) * self.dx

    def cell_edges(self) -> np.ndarray:
        return self.lo + np.arange(self.n_cells + 1) * self.dx

    def node_matrix(self, rule: QuadratureRule) -> np.ndarray:
        """Physical quadrature nodes, shape (n_cells, rule.n_points)."""
        centers = self.cell_center(np.arange(self.n_cells))
        return centers[:, None] + 0.5 * self.dx * rule.nodes[None, :]

    def locate(self, x: float) -> int:
        """Cell index containing x; interfaces belong to the right cell."""
        return int(np.floor((x - self.lo) / self.dx))


def global_node(mesh: Mesh1D, cell: int, q: int, rule: QuadratureRule) -> float:
    """Physical coordinate of local Gauss node q in a given cell."""
    if not 0 <= cell < mesh.n_cells:
        raise IndexError(f"cell {cell} out of range [0, {mesh.n_cells})")
    if not 0 <= q < rule.n_points:
        raise IndexError(f"node {q} out of range [0, {rule.n_points})")
    return mesh.cell_center(cell) + 0.5 * mesh.dx * rule.nodes[q]
