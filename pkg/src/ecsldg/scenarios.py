"""Benchmark initial conditions.

All four distributions are separable, f0(x, v) = X(x) * V(v), with V a
unit-mass velocity profile and X the density 1 + trigonometric
perturbation, so every scenario is globally neutral against the unit ion
background and the initial field has a closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dg import PhaseSpaceField
from .field import compute_moments, poisson_ldg
from .quadrature import PERIODIC, ZERO_EXTERIOR, Mesh1D
from .stepper import SimState

_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Scenario:
    """Named initial condition with its domain and defaults."""

    name: str
    density: Callable  # X(x), mean 1
    velocity_profile: Callable  # V(v), unit mass
    analytic_e: Callable  # closed-form E(x, lam) with lam^2 dE/dx = 1 - X(x)
    length: float
    v_max: float = 10.0
    lam: float = 1.0

    def f0(self, x, v):
        return self.density(np.asarray(x)) * self.velocity_profile(np.asarray(v))

    def build(self, n_x: int, n_v: int, k: int, lam: float | None = None) -> SimState:
        """Project f0, zero the v-boundary cells, and initialize E by the
        periodic LDG Poisson solve on the projected density."""
        mesh_x = Mesh1D(0.0, self.length, n_x, PERIODIC)
        mesh_v = Mesh1D(-self.v_max, self.v_max, n_v, ZERO_EXTERIOR)
        f = PhaseSpaceField.project_separable(
            self.density, self.velocity_profile, mesh_x, mesh_v, k
        )
        use_lam = self.lam if lam is None else lam
        e = poisson_ldg(compute_moments(f).n, use_lam)
        return SimState(f=f, e_nodal=e.nodal(), lam=use_lam, t=0.0)


def _cosine_density(alpha: float, kappa: float):
    def density(x):
        return 1.0 + alpha * np.cos(kappa * np.asarray(x))

    def analytic_e(x, lam=1.0):
        # lam^2 E' = 1 - density = -alpha cos(kappa x), zero-mean solution
        return -(alpha / (kappa * lam * lam)) * np.sin(kappa * np.asarray(x))

    return density, analytic_e


def _maxwellian(v):
    return np.exp(-np.asarray(v) ** 2 / 2.0) / _SQRT2PI


def weak_landau() -> Scenario:
    """Small sinusoidal density perturbation on a Maxwellian (alpha=0.01)."""
    density, analytic_e = _cosine_density(0.01, 0.5)
    return Scenario("weak_landau", density, _maxwellian, analytic_e,
                    length=4.0 * math.pi)


def strong_landau() -> Scenario:
    """Same profile with perturbation alpha=0.5."""
    density, analytic_e = _cosine_density(0.5, 0.5)
    return Scenario("strong_landau", density, _maxwellian, analytic_e,
                    length=4.0 * math.pi)


def two_stream_i() -> Scenario:
    """Symmetric counter-streaming profile (1 + 5 v^2) Maxwellian with a
    three-mode density perturbation.

    The raw profile integrates to 12/7 per unit length; it is rescaled to
    unit mean density so the neutral-background field solve applies.
    """
    alpha, kappa = 0.01, 0.5

    def density(x):
        x = np.asarray(x)
        return 1.0 + alpha * (
            (np.cos(2 * kappa * x) + np.cos(3 * kappa * x)) / 1.2 + np.cos(kappa * x)
        )

    def velocity_profile(v):
        v = np.asarray(v)
        return (1.0 + 5.0 * v * v) * np.exp(-v * v / 2.0) / (6.0 * _SQRT2PI)

    def analytic_e(x, lam=1.0):
        x = np.asarray(x)
        return -(alpha / (lam * lam)) * (
            np.sin(2 * kappa * x) / (2 * kappa * 1.2)
            + np.sin(3 * kappa * x) / (3 * kappa * 1.2)
            + np.sin(kappa * x) / kappa
        )

    return Scenario("two_stream_i", density, velocity_profile, analytic_e,
                    length=4.0 * math.pi)


def two_stream_ii(lam: float = 1.0) -> Scenario:
    """Two drifting cold beams (v0 = 0.99, vt = 0.3) on a long domain;
    lam is configurable (1 or 0.01)."""
    alpha, kappa = 0.05, 2.0 / 13.0
    v0, vt = 0.99, 0.3
    density, analytic_e = _cosine_density(alpha, kappa)

    def velocity_profile(v):
        v = np.asarray(v)
        return (
            np.exp(-((v - v0) ** 2) / (2 * vt * vt))
            + np.exp(-((v + v0) ** 2) / (2 * vt * vt))
        ) / (2.0 * _SQRT2PI * vt)

    return Scenario("two_stream_ii", density, velocity_profile, analytic_e,
                    length=13.0 * math.pi, lam=lam)


_FACTORIES = {
    "weak_landau": weak_landau,
    "strong_landau": strong_landau,
    "two_stream_i": two_stream_i,
    "two_stream_ii": two_stream_ii,
}

SCENARIO_NAMES = tuple(sorted(_FACTORIES))


def by_name(name: str) -> Scenario:
    try:
        return _FACTORIES[name]()
    except KeyError:
        raise ValueError(
            f"unknown scenario {name!r}; choose from {list(SCENARIO_NAMES)}"
        ) from None
