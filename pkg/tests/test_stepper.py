import math

import numpy as np
import pytest

from ecsldg.dg import PhaseSpaceField
from ecsldg.diagnostics import observe
from ecsldg.field import SolverError, moment_arrays
from ecsldg.quadrature import Mesh1D, basis
from ecsldg.scenarios import weak_landau
from ecsldg.splitting import parse_scheme
from ecsldg.stepper import (
    EC,
    SimState,
    TimeControl,
    advance,
    run,
    step_accel,
    step_size,
    step_transport,
)

SCHEMES = ("lie", "strang", "ss3", "tenlie")


def small_state(n=16, k=2):
    return weak_landau().build(n, n, k)


class TestTransport:
    def test_zero_dt_is_identity(self):
        st = small_state()
        before = st.f.values.copy()
        step_transport(st, 0.0)
        assert np.array_equal(st.f.values, before)

    def test_x_independent_profile_invariant(self):
        sc = weak_landau()
        mx = Mesh1D(0.0, sc.length, 16, "periodic")
        mv = Mesh1D(-10.0, 10.0, 16, "zero_exterior")
        f = PhaseSpaceField.project_separable(
            lambda x: np.ones_like(x), sc.velocity_profile, mx, mv, 2)
        st = SimState(f=f, e_nodal=np.zeros((16, 3)), lam=1.0, t=0.0)
        before = st.f.values.copy()
        step_transport(st, 0.37)
        assert np.max(np.abs(st.f.values - before)) < 1e-13

    def test_conserves_all_velocity_moments(self):
        st = small_state()
        r0 = observe(st)
        step_transport(st, 0.1)
        r1 = observe(st)
        assert r1.mass == pytest.approx(r0.mass, rel=1e-13)
        assert r1.momentum == pytest.approx(r0.momentum, abs=1e-13)
        assert r1.e_kinetic == pytest.approx(r0.e_kinetic, rel=1e-13)
        assert np.array_equal(st.e_nodal, st.e_nodal)  # field untouched


class TestAccel:
    def test_zero_dt_is_identity(self):
        st = small_state()
        before = st.f.values.copy()
        e_before = st.e_nodal.copy()
        step_accel(st, 0.0, EC)
        assert np.array_equal(st.f.values, before)
        assert np.array_equal(st.e_nodal, e_before)

    def test_zero_field_even_distribution_is_fixed_point(self):
        st = small_state()
        st.e_nodal[:] = 0.0
        before = st.f.values.copy()
        step_accel(st, 0.1, EC)
        # J = 0 keeps E at zero; zero shift keeps f bitwise
        assert np.max(np.abs(st.e_nodal)) < 1e-14
        assert np.array_equal(st.f.values, before)

    def test_single_substep_conserves_energy_and_mass(self):
        st = weak_landau().build(64, 64, 2)
        r0 = observe(st)
        step_accel(st, 0.1, EC)
        r1 = observe(st)
        assert abs(r1.e_total - r0.e_total) / r0.e_total < 1e-12
        assert abs(r1.mass - r0.mass) / r0.mass < 1e-13

    def test_momentum_identity(self):
        # dP = -dt * integral(n* E_half) after one accel substep
        st = weak_landau().build(32, 32, 2)
        r0 = observe(st)
        n_star, _ = moment_arrays(st.f)
        e_old = st.e_nodal.copy()
        dt = 0.13
        step_accel(st, dt, EC)
        e_half = 0.5 * (e_old + st.e_nodal)
        wx = 0.5 * st.f.mesh_x.dx * basis(2).rule.weights
        predicted = -dt * float(np.sum(n_star * e_half * wx[None, :]))
        r1 = observe(st)
        assert r1.momentum - r0.momentum == pytest.approx(predicted, abs=1e-12)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            step_accel(small_state(), 0.1, "poisson")


class TestAdvance:
    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_uniform_maxwellian_is_fixed_point(self, scheme):
        mx = Mesh1D(0.0, 4 * math.pi, 12, "periodic")
        mv = Mesh1D(-8.0, 8.0, 12, "zero_exterior")
        f = PhaseSpaceField.project_separable(
            lambda x: np.ones_like(x),
            lambda v: np.exp(-v**2 / 2) / math.sqrt(2 * math.pi), mx, mv, 2)
        st = SimState(f=f, e_nodal=np.zeros((12, 3)), lam=1.0, t=0.0)
        f0 = st.f.values.copy()
        advance(st, 0.25, parse_scheme(scheme), EC)
        assert np.max(np.abs(st.e_nodal)) < 1e-13
        assert np.max(np.abs(st.f.values - f0)) < 1e-12

    @pytest.mark.parametrize("scheme", SCHEMES)
    @pytest.mark.parametrize("mode", ("ec", "ae", "vp"))
    def test_mass_conserved_all_schemes_modes(self, scheme, mode):
        st = weak_landau().build(24, 24, 2)
        r0 = observe(st)
        for _ in range(5):
            advance(st, 0.2, parse_scheme(scheme), mode)
        r1 = observe(st)
        assert abs(r1.mass - r0.mass) / r0.mass < 1e-12

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_energy_conserved_ec_mode(self, scheme):
        st = weak_landau().build(32, 32, 2)
        r0 = observe(st)
        for _ in range(10):
            advance(st, 0.3, parse_scheme(scheme), EC)
        r1 = observe(st)
        assert abs(r1.e_total - r0.e_total) / r0.e_total < 1e-12

    def test_l2_nonincreasing(self):
        st = weak_landau().build(32, 32, 2)
        prev = observe(st).l2_f
        for _ in range(10):
            advance(st, 0.5, parse_scheme("strang"), EC)
            cur = observe(st).l2_f
            assert cur <= prev * (1 + 1e-12)
            prev = cur

    def test_strang_beats_lie_against_small_dt_reference(self):
        def err(scheme, dt):
            st = weak_landau().build(24, 24, 2)
            ref = weak_landau().build(24, 24, 2)
            n = int(round(2.0 / dt))
            for _ in range(n):
                advance(st, dt, parse_scheme(scheme), EC)
            for _ in range(40 * n):
                advance(ref, dt / 40, parse_scheme(scheme), EC)
            from ecsldg.diagnostics import error_norms
            return error_norms(st.f, ref.f)[1]

        assert err("strang", 0.5) < err("lie", 0.5)

    def test_nonpositive_dt_rejected(self):
        with pytest.raises(ValueError):
            advance(small_state(), 0.0, parse_scheme("lie"), EC)

    def test_boundary_contamination_fatal(self):
        # support touching the v boundary: transport is fine but accel pulls
        # mass through the clipped edge and the guard must trip
        sc = weak_landau()
        mx = Mesh1D(0.0, sc.length, 8, "periodic")
        mv = Mesh1D(-2.0, 2.0, 8, "zero_exterior")  # far too small for a Maxwellian
        f = PhaseSpaceField.project_separable(sc.density, sc.velocity_profile, mx, mv, 2)
        st = SimState(f=f, e_nodal=0.5 * np.ones((8, 3)), lam=1.0, t=0.0)
        with pytest.raises(SolverError, match="v_m"):
            for _ in range(3):
                advance(st, 0.5, parse_scheme("strang"), EC)


class TestReversibility:
    @pytest.mark.parametrize("scheme", ("strang", "tenlie"))
    def test_reflection_recovers_initial_state_to_spatial_error(self, scheme):
        st = weak_landau().build(24, 24, 2)
        f0 = st.f.copy()
        control = TimeControl(cfl=2.0)
        run(st, 1.0, control, parse_scheme(scheme), EC)
        st = st.reflect_v()
        run(st, 2.0, control, parse_scheme(scheme), EC)
        st = st.reflect_v()
        from ecsldg.diagnostics import error_norms
        _, l2 = error_norms(st.f, f0)
        # temporal error cancels; what is left is the coarse-grid spatial error
        assert l2 < 5e-3
        # and it is far from machine zero (projection is lossy)
        assert l2 > 1e-8


class TestRun:
    def test_step_size_rule(self):
        st = small_state()
        st.e_nodal[:] = 0.0
        dx = st.f.mesh_x.dx
        v_m = st.f.mesh_v.hi
        assert step_size(st, TimeControl(cfl=1.0)) == pytest.approx(dx / v_m)
        st.e_nodal[:] = 2.0
        dv = st.f.mesh_v.dx
        expected = 1.0 / (v_m / dx + 2.0 / dv)
        assert step_size(st, TimeControl(cfl=1.0)) == pytest.approx(expected)
        assert step_size(st, TimeControl(dt=0.125)) == 0.125

    def test_exactly_one_time_control(self):
        with pytest.raises(ValueError):
            TimeControl()
        with pytest.raises(ValueError):
            TimeControl(cfl=1.0, dt=0.1)

    def test_run_lands_exactly_on_final_time(self):
        st = small_state()
        run(st, 0.77, TimeControl(cfl=3.0), parse_scheme("strang"), EC)
        assert st.t == 0.77

    def test_run_hits_stop_times(self):
        st = small_state()
        seen = []
        run(st, 1.0, TimeControl(dt=0.03), parse_scheme("lie"), EC,
            stop_times=(0.25, 0.5), on_stop=lambda s: seen.append(s.t))
        assert seen == [0.25, 0.5]

    def test_on_step_called_each_step(self):
        st = small_state()
        count = [0]
        run(st, 0.5, TimeControl(dt=0.1), parse_scheme("lie"), EC,
            on_step=lambda s: count.__setitem__(0, count[0] + 1))
        assert count[0] == 5
