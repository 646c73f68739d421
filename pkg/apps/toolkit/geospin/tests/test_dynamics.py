"""Tests for RK4, geodesic integration and the mode equation."""

import math

import numpy as np
import pytest
from loguru import logger

from geospin.core.errors import (
    ChartDomainError,
    GridMisalignmentError,
    InsufficientSamplesError,
    IntegrationError,
    InvalidParameterError,
)
from geospin.dynamics.geodesic import (
    GeodesicState,
    convergence_factor,
    geodesic_rhs,
    integrate_geodesic,
    logdet_rate_residual,
    random_unit_geodesic,
    speed,
)
from geospin.dynamics.integrator import rk4_path, rk4_step, sample_times, step_count
from geospin.dynamics.mode import (
    ModeState,
    SampledScalar,
    evolve_mode,
    evolve_mode_schrodinger,
    mode_volume_factor,
)
from geospin.geometry.manifold import metric_at, sample_point, sample_vector
from geospin.geometry.oracles import closed_form_half_plane_geodesic


def semicircle(half_plane, t_end=1.0, h=1e-3):
    return integrate_geodesic(half_plane, GeodesicState.of(half_plane, (0.0, 1.0), (1.0, 0.0)), t_end, h)


class TestIntegrator:
    """Tests for the RK4 core."""

    def test_step_count_tolerates_rounding(self):
        assert step_count(0.0, 1.0, 1e-3) == 1000
        assert step_count(0.0, 0.3, 0.1) == 3

    def test_last_step_is_shortened(self):
        times = sample_times(0.0, 1.0, 0.3)
        assert times[-1] == 1.0
        assert len(times) == 5
        assert times[-2] == pytest.approx(0.9)

    def test_rejects_bad_step(self):
        with pytest.raises(InvalidParameterError):
            step_count(0.0, 1.0, 0.0)
        with pytest.raises(InvalidParameterError):
            step_count(1.0, 1.0, 0.1)

    def test_exponential(self):
        """y' = y: one RK4 step matches the fourth-order Taylor polynomial."""
        h = 0.1
        y = rk4_step(lambda t, y: y, 0.0, np.array([1.0]), h)
        assert y[0] == pytest.approx(1 + h + h**2 / 2 + h**3 / 6 + h**4 / 24, rel=1e-15)

    def test_path_starts_at_initial_value(self):
        path = list(rk4_path(lambda t, y: -y, 0.0, np.array([2.0]), 1.0, 0.25))
        assert path[0][0] == 0.0
        assert path[0][1][0] == 2.0
        assert path[-1][0] == 1.0
        assert path[-1][1][0] == pytest.approx(2 * math.exp(-1), rel=1e-4)

    def test_complex_state(self):
        path = list(rk4_path(lambda t, y: 1j * y, 0.0, np.array([1.0 + 0j]), math.pi, 1e-2))
        assert abs(path[-1][1][0] - (-1.0)) < 1e-8


class TestGeodesic:
    """Tests for integrate_geodesic."""

    def test_rhs(self, half_plane):
        s = GeodesicState.of(half_plane, (0.0, 1.0), (1.0, 0.0))
        dx, dv = geodesic_rhs(half_plane, s)
        assert np.array_equal(dx, [1.0, 0.0])
        # dv = −W v with W = [[0, −1], [1, 0]]
        assert np.allclose(dv, [0.0, -1.0], atol=1e-15)

    def test_speed(self, plane):
        assert speed(plane, GeodesicState.of(plane, (0, 0), (3, 4))) == 5.0

    def test_euclidean_straight_line(self, plane):
        traj = integrate_geodesic(plane, GeodesicState.of(plane, (0.0, 0.0), (1.0, 0.0)), 1.0, 1e-3)
        final = traj.final()
        assert final.t == 1.0
        assert np.allclose(final.x.as_array(), [1.0, 0.0], rtol=0, atol=1e-12)
        assert final.v.components == (1.0, 0.0)

    def test_half_plane_semicircle(self, half_plane):
        """From (0, 1) with v = (1, 0) the geodesic stays on x² + y² = 1."""
        traj = semicircle(half_plane)
        xy = traj.positions
        assert np.max(np.abs(xy[:, 0] ** 2 + xy[:, 1] ** 2 - 1)) < 1e-6
        for s in traj.samples[::100]:
            x, y, vx, vy = closed_form_half_plane_geodesic(s.t)
            assert s.x.coordinates == pytest.approx((x, y), abs=1e-6)
            assert s.v.components == pytest.approx((vx, vy), abs=1e-6)

    def test_speed_is_conserved(self, zoo_field, rng):
        p = sample_point(zoo_field, rng)
        direction = sample_vector(zoo_field, rng).as_array()
        g = metric_at(zoo_field, p).g
        v = 0.1 * direction / math.sqrt(direction @ g @ direction)
        traj = integrate_geodesic(zoo_field, GeodesicState.of(zoo_field, p, v), 2.0, 1e-3)
        assert traj.speed_drift < 1e-6

    def test_unit_speed_is_conserved_over_five(self, zoo_field, rng):
        traj = random_unit_geodesic(zoo_field, rng, 5.0, 1e-3)
        assert traj.speeds[0] == pytest.approx(1.0, rel=1e-12)
        assert traj.times[-1] == 5.0
        assert traj.speed_drift <= 1e-6 * (1 + traj.speeds[0])

    def test_large_drift_is_logged(self, disk):
        """At h = 1 RK4 visibly changes the speed along x = tanh(t/2)."""
        messages = []
        handler = logger.add(messages.append, level="WARNING", format="{message}")
        try:
            traj = integrate_geodesic(disk, GeodesicState.of(disk, (0.0, 0.0), (0.5, 0.0)), 2.0, 1.0)
        finally:
            logger.remove(handler)
        assert traj.speed_drift > 2e-6
        assert any("Speed drift" in m for m in messages)

    def test_sphere_equator(self, unit_sphere):
        traj = integrate_geodesic(unit_sphere, GeodesicState.of(unit_sphere, (math.pi / 2, 0.0), (0.0, 1.0)), math.pi, 1e-3)
        assert traj.final().x.coordinates == pytest.approx((math.pi / 2, math.pi), abs=1e-8)

    def test_leaves_chart(self, unit_sphere):
        """A meridian θ = π/2 + t reaches the south pole at t = π/2."""
        s0 = GeodesicState.of(unit_sphere, (math.pi / 2, 0.0), (1.0, 0.0))
        with pytest.raises(IntegrationError) as exc:
            integrate_geodesic(unit_sphere, s0, 3.0, 1e-2)
        last = exc.value.last_state
        assert isinstance(last, GeodesicState)
        assert last.x.coordinates[0] < math.pi
        assert last.t < math.pi / 2

    def test_leaving_chart_keeps_accepted_samples(self, unit_sphere):
        s0 = GeodesicState.of(unit_sphere, (math.pi / 2, 0.0), (1.0, 0.0))
        with pytest.raises(IntegrationError) as exc:
            integrate_geodesic(unit_sphere, s0, 3.0, 1e-2)
        partial = exc.value.partial
        assert partial.samples[0].t == 0.0
        assert partial.final() is exc.value.last_state
        assert exc.value.details["x"] == list(exc.value.last_state.x)

    def test_start_outside_chart(self, unit_sphere):
        with pytest.raises(ChartDomainError):
            integrate_geodesic(unit_sphere, GeodesicState.of(unit_sphere, (-0.1, 0.0), (1.0, 0.0)), 1.0, 1e-2)

    def test_deterministic(self, disk):
        s0 = GeodesicState.of(disk, (0.1, -0.2), (0.3, 0.4))
        a = integrate_geodesic(disk, s0, 0.5, 1e-2)
        b = integrate_geodesic(disk, s0, 0.5, 1e-2)
        assert np.array_equal(a.positions, b.positions)


class TestLogdetRate:
    """d/dt ln√g(x(t)) = w⁽ʳ⁾ along geodesics."""

    def test_semicircle(self, half_plane):
        assert logdet_rate_residual(semicircle(half_plane, t_end=2.0)) < 1e-5

    def test_zoo(self, zoo_field, rng):
        p = sample_point(zoo_field, rng)
        direction = sample_vector(zoo_field, rng).as_array()
        g = metric_at(zoo_field, p).g
        v = 0.1 * direction / math.sqrt(direction @ g @ direction)
        traj = integrate_geodesic(zoo_field, GeodesicState.of(zoo_field, p, v), 2.0, 1e-3)
        assert logdet_rate_residual(traj) < 1e-5

    def test_euclidean_is_zero(self, plane):
        traj = integrate_geodesic(plane, GeodesicState.of(plane, (0, 0), (1, 2)), 1.0, 0.1)
        assert logdet_rate_residual(traj) == 0.0

    def test_needs_three_samples(self, plane):
        traj = integrate_geodesic(plane, GeodesicState.of(plane, (0, 0), (1, 0)), 0.1, 0.1)
        with pytest.raises(InsufficientSamplesError):
            logdet_rate_residual(traj)


class TestConvergence:
    def test_fourth_order(self, half_plane):
        s0 = GeodesicState.of(half_plane, (0.0, 1.0), (1.0, 0.0))
        assert 12.0 <= convergence_factor(half_plane, s0, 0.2, 0.04) <= 20.0


class TestModeEquation:
    """Tests for evolve_mode and its Schrödinger form."""

    def test_sech_squared(self, half_plane):
        """Along the semicircle w⁽ʳ⁾ = 2 tanh t, so ψ(t) = ψ(0) sech² t."""
        traj = semicircle(half_plane)
        states = evolve_mode(SampledScalar.from_trajectory(traj), ModeState(0.0, (1.0, -2.0)), 2e-3)
        assert states[-1].t == pytest.approx(1.0)
        for s in states:
            assert s.psi[0] == pytest.approx(1 / math.cosh(s.t) ** 2, abs=1e-6)
            assert s.psi[1] == pytest.approx(-2 / math.cosh(s.t) ** 2, abs=1e-6)

    def test_matches_volume_factor(self, half_plane):
        traj = semicircle(half_plane)
        states = evolve_mode(SampledScalar.from_trajectory(traj), ModeState(0.0, (1.0,)), 2e-3)
        factors = mode_volume_factor(traj, [s.t for s in states])
        assert max(abs(s.psi[0] - f) for s, f in zip(states, factors)) < 1e-6

    def test_schrodinger_form_agrees(self, half_plane):
        traj = semicircle(half_plane)
        w = SampledScalar.from_trajectory(traj)
        real = evolve_mode(w, ModeState(0.0, (1.0, 0.5)), 4e-3)
        complex_ = evolve_mode_schrodinger(w, ModeState(0.0, (1.0, 0.5)), 4e-3, hbar=0.7)
        for a, b in zip(real, complex_):
            assert a.t == b.t
            assert max(abs(x - y) for x, y in zip(a.psi, b.psi)) < 1e-12

    def test_constant_on_euclidean(self, plane):
        traj = integrate_geodesic(plane, GeodesicState.of(plane, (0, 0), (1, 1)), 1.0, 0.01)
        states = evolve_mode(SampledScalar.from_trajectory(traj), ModeState(0.0, (3.0,)), 0.02)
        assert all(s.psi == (3.0,) for s in states)

    def test_odd_multiple_rejected(self, half_plane):
        w = SampledScalar.from_trajectory(semicircle(half_plane))
        with pytest.raises(GridMisalignmentError):
            evolve_mode(w, ModeState(0.0, (1.0,)), 3e-3)

    def test_start_time_must_be_first_sample(self, half_plane):
        w = SampledScalar.from_trajectory(semicircle(half_plane))
        with pytest.raises(GridMisalignmentError):
            evolve_mode(w, ModeState(0.5, (1.0,)), 2e-3)

    def test_trailing_samples_must_fill_a_step(self, half_plane):
        """999 intervals of 1e-3 do not split into steps of 2e-3."""
        w = SampledScalar.from_trajectory(semicircle(half_plane, t_end=0.999))
        assert len(w.times) == 1000
        with pytest.raises(GridMisalignmentError) as exc:
            evolve_mode(w, ModeState(0.0, (1.0,)), 2e-3)
        assert exc.value.details["samples"] == 1000

    def test_non_uniform_samples_rejected(self):
        w = SampledScalar(times=np.array([0.0, 0.1, 0.3, 0.4]), values=np.zeros(4))
        with pytest.raises(GridMisalignmentError):
            evolve_mode(w, ModeState(0.0, (1.0,)), 0.2)

    def test_rejects_nonfinite_amplitude(self):
        with pytest.raises(InvalidParameterError):
            ModeState(0.0, (float("inf"),))
