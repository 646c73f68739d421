"""Tests for Riemann, Ricci and scalar curvature."""

import math

import numpy as np
import pytest

from geospin.core.config import settings
from geospin.core.errors import DegenerateMetricError
from geospin.geometry.curvature import (
    christoffel_partials_at,
    christoffel_partials_identity,
    curvature_at,
    einstein_constant_at,
    identity_chain_residual,
    is_einstein,
    metric_rate_along,
    scalar_curvature,
    w_r_from_metric_rate,
)
from geospin.geometry.manifold import sample_point, sample_vector
from geospin.geometry.oracles import fd_scalar_curvature
from geospin.geometry.zoo import euclidean, poincare_half_plane, sphere, warped_product


class TestScalarCurvature:
    """Tests for scalar_curvature on the zoo."""

    @pytest.mark.parametrize(
        "build, expected",
        [
            (lambda: euclidean(2), 0.0),
            (lambda: euclidean(3), 0.0),
            (lambda: sphere(1.0), 2.0),
            (lambda: sphere(2.0), 0.5),
            (poincare_half_plane, -2.0),
            (lambda: warped_product("sinh(r)"), -2.0),
        ],
    )
    def test_constant_curvature(self, build, expected, rng):
        field = build()
        for _ in range(20):
            assert scalar_curvature(field, sample_point(field, rng)) == pytest.approx(expected, abs=1e-6)

    def test_disk(self, disk, rng):
        for _ in range(20):
            assert scalar_curvature(disk, sample_point(disk, rng)) == pytest.approx(-2.0, abs=1e-6)

    def test_scaling_law(self, unit_sphere, half_plane, rng):
        """R(c·g) = R(g)/c."""
        for field in (unit_sphere, half_plane):
            for c in (0.5, 3.0):
                p = sample_point(field, rng)
                R = scalar_curvature(field, p)
                assert scalar_curvature(field.scaled(c), p) == pytest.approx(R / c, rel=1e-9)

    def test_matches_finite_differences(self, zoo_field, rng):
        for _ in range(5):
            p = sample_point(zoo_field, rng)
            assert abs(scalar_curvature(zoo_field, p) - fd_scalar_curvature(zoo_field, p)) < 1e-5

    def test_non_constant(self):
        """f = r²: K = −f''/f = −2/r², so R = −4/r²."""
        field = warped_product("r^2")
        r = 1.3
        assert scalar_curvature(field, (r, 0.2)) == pytest.approx(-4 / r**2, rel=1e-10)


class TestRiemannRicci:
    """Tests for the Riemann and Ricci tensors."""

    def test_sphere_ricci_is_metric(self, unit_sphere):
        theta = 1.1
        bundle = curvature_at(unit_sphere, (theta, 0.3))
        assert np.allclose(bundle.ricci, np.diag([1.0, math.sin(theta) ** 2]), atol=1e-12)
        assert bundle.riemann[0, 1, 0, 1] == pytest.approx(math.sin(theta) ** 2, rel=1e-12)

    def test_euclidean_flat(self, plane):
        bundle = curvature_at(plane, (0.1, 0.2))
        assert not bundle.riemann.any()
        assert not bundle.ricci.any()
        assert bundle.scalar == 0.0

    def test_antisymmetry(self, zoo_field, rng):
        riemann = curvature_at(zoo_field, sample_point(zoo_field, rng)).riemann
        assert np.allclose(riemann, -riemann.transpose(0, 1, 3, 2), rtol=0, atol=1e-12)

    def test_ricci_symmetric(self, zoo_field, rng):
        for _ in range(5):
            ricci = curvature_at(zoo_field, sample_point(zoo_field, rng)).ricci
            assert np.allclose(ricci, ricci.T, rtol=0, atol=1e-9 * (1 + np.abs(ricci).max()))


class TestChristoffelPartials:
    """The identity path for ∂Γ agrees with the symbolic one."""

    def test_identity_path_matches_symbolic(self, rng):
        for field in (sphere(1.0), poincare_half_plane(), warped_product()):
            for _ in range(5):
                p = sample_point(field, rng)
                assert np.allclose(
                    christoffel_partials_identity(field, p), christoffel_partials_at(field, p), rtol=1e-10, atol=1e-10
                )

    def test_identity_path_used_above_limit(self, monkeypatch):
        monkeypatch.setattr(settings, "symbolic_christoffel_max_dim", 1)
        field = sphere(1.0)
        assert scalar_curvature(field, (1.0, 0.0)) == pytest.approx(2.0, abs=1e-9)


class TestMetricRate:
    """Tests for w_r_from_metric_rate and the identity chain."""

    def test_identity_metric(self):
        assert w_r_from_metric_rate(np.eye(2), np.diag([2.0, 4.0])) == 3.0

    def test_homothetic(self):
        """ġ = k·g gives w⁽ʳ⁾ = n·k/2."""
        g = np.array([[2.0, 0.5], [0.5, 1.0]])
        assert w_r_from_metric_rate(g, -2.0 * g) == pytest.approx(-2.0, rel=1e-14)

    def test_not_positive_definite(self):
        with pytest.raises(DegenerateMetricError):
            w_r_from_metric_rate(np.diag([1.0, -1.0]), np.eye(2))

    def test_rate_along_euclidean(self, plane):
        assert not metric_rate_along(plane, (0, 0), (1, 1)).any()

    def test_identity_chain(self, zoo_field, rng):
        """tr W = A·v = ½ tr(g⁻¹ ġ)."""
        for _ in range(20):
            p = sample_point(zoo_field, rng)
            assert identity_chain_residual(zoo_field, p, sample_vector(zoo_field, rng)) < 1e-9


class TestEinstein:
    """Tests for Einstein detection."""

    def test_sphere(self, unit_sphere, rng):
        points = [sample_point(unit_sphere, rng) for _ in range(4)]
        assert is_einstein(unit_sphere, points) == pytest.approx(1.0, abs=1e-9)

    def test_half_plane(self, half_plane, rng):
        points = [sample_point(half_plane, rng) for _ in range(4)]
        assert is_einstein(half_plane, points) == pytest.approx(-1.0, abs=1e-9)

    def test_flat(self, plane):
        assert is_einstein(plane, [(0.0, 0.0), (1.0, 1.0)]) == 0.0

    def test_varying_curvature(self):
        field = warped_product("r^2")
        assert is_einstein(field, [(0.5, 0.0), (1.5, 0.0)]) is None

    def test_pointwise_constant(self, unit_sphere):
        rho, defect = einstein_constant_at(unit_sphere, (0.7, 0.0))
        assert rho == pytest.approx(1.0, abs=1e-12)
        assert defect < 1e-12
