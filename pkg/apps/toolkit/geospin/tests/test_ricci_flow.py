"""Tests for the Ricci flow driver and the curvature/Hamiltonian check."""

import math

import numpy as np
import pytest

from geospin.api.schemas import FlowMode
from geospin.core.errors import InvalidParameterError
from geospin.geometry.manifold import MetricField
from geospin.geometry.ricci_flow import corollary_check, einstein_constant, ricci_flow_integrate
from geospin.geometry.zoo import warped_product


class TestHomotheticFlow:
    """Tests for Einstein metrics, where g(t) = c(t)·g₀."""

    def test_sphere_scale_and_curvature(self, unit_sphere):
        traj = ricci_flow_integrate(unit_sphere, (1.0, 0.0), 0.4, 0.01)
        assert traj.mode == FlowMode.HOMOTHETIC
        assert traj.einstein_constant == pytest.approx(1.0, abs=1e-9)
        for t, c, R in zip(traj.times, traj.scale, traj.scalar):
            assert c == pytest.approx(1 - 2 * t, abs=1e-12)
            assert R == pytest.approx(2 / (1 - 2 * t), rel=1e-9)
        assert not traj.extinct

    def test_sphere_extinction(self, unit_sphere):
        traj = ricci_flow_integrate(unit_sphere, (1.0, 0.0), 0.75, 0.01)
        assert traj.extinct
        assert traj.extinction_time == pytest.approx(0.5, abs=1e-6)
        assert traj.times[-1] < 0.5

    def test_hyperbolic_expansion(self, half_plane):
        traj = ricci_flow_integrate(half_plane, (0.0, 1.0), 1.0, 0.01)
        assert traj.scale[-1] == pytest.approx(3.0, rel=1e-12)
        assert traj.scalar[-1] == pytest.approx(-2.0 / 3.0, rel=1e-9)

    def test_residual_vanishes(self, unit_sphere, half_plane):
        for field, p in ((unit_sphere, (1.0, 0.0)), (half_plane, (0.0, 1.0))):
            traj = ricci_flow_integrate(field, p, 0.45, 0.005)
            worst = max(abs(R) for R in traj.scalar)
            assert max(traj.residual) <= 1e-6 * (1 + worst)

    def test_flat_is_static(self, plane):
        traj = ricci_flow_integrate(plane, (0.0, 0.0), 1.0, 0.1)
        assert all(c == 1.0 for c in traj.scale)
        assert all(R == 0.0 for R in traj.scalar)
        assert all(w == 0.0 for w in traj.w_r)

    def test_metric_follows_scale(self, half_plane):
        traj = ricci_flow_integrate(half_plane, (0.0, 2.0), 0.5, 0.05)
        g0 = traj.metrics[0]
        assert np.allclose(traj.metrics[-1], traj.scale[-1] * g0, rtol=1e-14)

    def test_domain_outside_default_box(self):
        """Without a sampling box the Einstein test samples around the point."""
        field = MetricField.from_strings("far", ["x", "y"], [["1/y^2", "0"], ["0", "1/y^2"]], ["y > 5"])
        assert einstein_constant(field, (0.0, 6.0)) == pytest.approx(-1.0, abs=1e-9)
        traj = ricci_flow_integrate(field, (0.0, 6.0), 0.1, 0.01)
        assert traj.mode == FlowMode.HOMOTHETIC
        assert traj.scale[-1] == pytest.approx(1.2, rel=1e-12)


class TestPointwiseFlow:
    """Tests for non-Einstein metrics."""

    def test_auto_selects_pointwise(self):
        field = warped_product("r^2")
        traj = ricci_flow_integrate(field, (1.0, 0.0), 0.1, 0.01)
        assert traj.mode == FlowMode.POINTWISE
        assert traj.einstein_constant is None

    def test_residual_vanishes(self):
        field = warped_product("r^2")
        traj = ricci_flow_integrate(field, (1.0, 0.0), 0.1, 0.01)
        worst = max(abs(R) for R in traj.scalar)
        assert max(traj.residual) <= 1e-6 * (1 + worst)

    def test_homothetic_requires_einstein(self):
        with pytest.raises(InvalidParameterError):
            ricci_flow_integrate(warped_product("r^2"), (1.0, 0.0), 0.1, 0.01, FlowMode.HOMOTHETIC)

    def test_forced_pointwise_on_sphere_matches_homothetic(self, unit_sphere):
        pointwise = ricci_flow_integrate(unit_sphere, (1.0, 0.0), 0.3, 0.01, FlowMode.POINTWISE)
        homothetic = ricci_flow_integrate(unit_sphere, (1.0, 0.0), 0.3, 0.01, FlowMode.HOMOTHETIC)
        assert np.allclose(pointwise.scale, homothetic.scale, rtol=1e-12)
        assert np.allclose(pointwise.scalar, homothetic.scalar, rtol=1e-9)


class TestEinsteinConstant:
    def test_sphere(self, unit_sphere):
        assert einstein_constant(unit_sphere, (1.0, 0.0), seed=3) == pytest.approx(1.0, abs=1e-9)

    def test_non_einstein(self):
        assert einstein_constant(warped_product("r^2"), (1.0, 0.0)) is None


class TestCorollaryCheck:
    """Tests for corollary_check: H = −iħw⁽ʳ⁾ against H' = iħR."""

    def test_sphere_initial_values(self, unit_sphere):
        """R(0) = 2, so H(0) = H'(0) = 2i at ħ = 1."""
        report = corollary_check(ricci_flow_integrate(unit_sphere, (1.0, 0.0), 0.2, 0.01), hbar=1.0)
        first = report.samples[0]
        assert first.H.re == 0.0
        assert first.H.im == pytest.approx(2.0, rel=1e-12)
        assert first.H_prime.im == pytest.approx(2.0, rel=1e-12)
        assert report.passed

    def test_hbar_scales_values(self, half_plane):
        traj = ricci_flow_integrate(half_plane, (0.0, 1.0), 0.2, 0.01)
        report = corollary_check(traj, hbar=0.5)
        assert report.samples[0].H_prime.im == pytest.approx(-1.0, rel=1e-12)
        assert report.tolerance == pytest.approx(1e-6 * 0.5 * (1 + 2.0), rel=1e-12)
        assert report.passed

    def test_rejects_non_positive_hbar(self, unit_sphere):
        traj = ricci_flow_integrate(unit_sphere, (1.0, 0.0), 0.1, 0.01)
        with pytest.raises(InvalidParameterError):
            corollary_check(traj, hbar=0.0)

    def test_flat(self, plane):
        report = corollary_check(ricci_flow_integrate(plane, (0.0, 0.0), 0.5, 0.1), hbar=1.0)
        assert report.max_abs_difference == 0.0
        assert report.passed

    def test_extinction_time_near_half(self, unit_sphere):
        traj = ricci_flow_integrate(unit_sphere, (math.pi / 3, 0.5), 0.75, 1e-3)
        assert abs(traj.extinction_time - 0.5) <= 1e-6
        assert corollary_check(traj).passed
