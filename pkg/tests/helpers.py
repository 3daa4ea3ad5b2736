"""Shared oracles for the test suite.

These deliberately avoid the library's transfer-matrix path: translation
errors are judged against direct dense quadrature of the shifted
polynomial, split at its interior breakpoints.
"""
import numpy as np

from ecsldg.dg import DGFunction1D, eval_dg
from ecsldg.quadrature import gauss_points, legendre_values


def brute_force_advect(u: DGFunction1D, s: float, n_panels: int = 200,
                       pts_per_panel: int = 5) -> DGFunction1D:
    """Reference translation: per target cell, integrate u(x - s) against
    each Legendre mode with a composite Gauss rule, splitting the cell at
    the breakpoints of the shifted function first (u(x - s) is only
    piecewise smooth, so panels must not straddle a jump)."""
    mesh, k = u.mesh, u.k
    xg, wg = gauss_points(pts_per_panel)
    out = np.zeros_like(u.coeffs)
    for j in range(mesh.n_cells):
        lo = mesh.lo + j * mesh.dx
        hi = lo + mesh.dx
        cuts = {lo, hi}
        m_lo = int(np.floor((lo - s - mesh.lo) / mesh.dx)) - 1
        m_hi = int(np.ceil((hi - s - mesh.lo) / mesh.dx)) + 1
        for m in range(m_lo, m_hi + 1):
            xb = mesh.lo + m * mesh.dx + s
            if lo < xb < hi:
                cuts.add(xb)
        cuts = sorted(cuts)
        for a in range(k + 1):
            acc = 0.0
            for seg_lo, seg_hi in zip(cuts[:-1], cuts[1:]):
                n_sub = max(1, int(round(n_panels * (seg_hi - seg_lo) / mesh.dx)))
                edges = np.linspace(seg_lo, seg_hi, n_sub + 1)
                for p_lo, p_hi in zip(edges[:-1], edges[1:]):
                    xm = 0.5 * (p_lo + p_hi) + 0.5 * (p_hi - p_lo) * xg
                    vals = eval_dg(u, xm - s)
                    xi = (xm - 0.5 * (lo + hi)) / (0.5 * mesh.dx)
                    pa = legendre_values(k, xi)[a]
                    acc += 0.5 * (p_hi - p_lo) * float(np.sum(wg * vals * pa))
            out[j, a] = acc * (2 * a + 1) / mesh.dx
    return DGFunction1D(mesh, k, out)


def random_dg(mesh, k, rng, scale=1.0) -> DGFunction1D:
    coeffs = rng.normal(size=(mesh.n_cells, k + 1)) * scale
    return DGFunction1D(mesh, k, coeffs)
