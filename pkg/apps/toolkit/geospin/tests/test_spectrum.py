"""Tests for the nonsymmetric eigen solver and the geometric Hamiltonian."""

import numpy as np
import pytest

from geospin.core.errors import ConvergenceError, DimensionMismatchError, InvalidParameterError
from geospin.geometry.connection import christoffel_at
from geospin.geometry.geospin import geospin_matrix
from geospin.geometry.oracles import characteristic_cubic, cubic_roots
from geospin.spectrum.eigen import balance, eig_real_nonsymmetric, hessenberg, hessenberg_qr
from geospin.spectrum.hamiltonian import (
    diagonal_hamiltonian,
    geometric_spectrum,
    hamiltonian_matrix,
    map_eigenvalue,
    multiset_distance,
    spectrum_map,
)

ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


class TestEigen:
    """Tests for eig_real_nonsymmetric."""

    def test_rotation(self):
        result = eig_real_nonsymmetric(ROTATION)
        assert result.eigenvalues == [complex(0, -1), complex(0, 1)]
        assert all(result.reliable)

    def test_symmetric(self):
        values = eig_real_nonsymmetric([[2.0, 1.0], [1.0, 2.0]]).eigenvalues
        assert values[0] == pytest.approx(1.0, abs=1e-14)
        assert values[1] == pytest.approx(3.0, abs=1e-14)

    def test_one_by_one(self):
        assert eig_real_nonsymmetric([[5.0]]).eigenvalues == [complex(5.0)]

    def test_sorted_by_real_then_imag(self, rng):
        values = eig_real_nonsymmetric(rng.standard_normal((5, 5)), vectors=False).eigenvalues
        assert values == sorted(values, key=lambda z: (z.real, z.imag))

    def test_matches_cubic_formula(self, rng):
        for _ in range(50):
            m = rng.standard_normal((3, 3))
            values = eig_real_nonsymmetric(m, vectors=False).eigenvalues
            roots = cubic_roots(*characteristic_cubic(m))
            assert multiset_distance(values, roots) < 1e-9 * (1 + np.linalg.norm(m, 2))

    def test_matches_lapack(self, rng):
        for n in (2, 4, 6):
            m = rng.standard_normal((n, n))
            values = eig_real_nonsymmetric(m, vectors=False).eigenvalues
            assert multiset_distance(values, list(np.linalg.eigvals(m))) < 1e-9 * (1 + np.linalg.norm(m, 2))

    def test_complex_pairs_are_exact_conjugates(self, rng):
        values = eig_real_nonsymmetric(rng.standard_normal((6, 6)), vectors=False).eigenvalues
        for z in values:
            if z.imag:
                assert z.conjugate() in values

    def test_residuals(self, rng):
        m = rng.standard_normal((4, 4))
        result = eig_real_nonsymmetric(m)
        for lam, x, residual in zip(result.eigenvalues, result.eigenvectors, result.residuals):
            assert np.linalg.norm(x) == pytest.approx(1.0, rel=1e-12)
            assert residual == pytest.approx(np.linalg.norm(m @ x - lam * x), rel=1e-9, abs=1e-15)
            assert residual < 1e-8 * np.linalg.norm(m, 2)

    def test_not_square(self):
        with pytest.raises(DimensionMismatchError):
            eig_real_nonsymmetric(np.zeros((2, 3)))

    def test_nonfinite(self):
        with pytest.raises(InvalidParameterError):
            eig_real_nonsymmetric([[1.0, float("nan")], [0.0, 1.0]])


class TestReductions:
    """Tests for balancing, Hessenberg reduction and QR."""

    def test_balance_preserves_spectrum(self):
        m = np.array([[1.0, 1e6, 0.0], [1e-6, 2.0, 1e4], [0.0, 1e-4, 3.0]])
        b = balance(m)
        assert np.abs(b).max() < np.abs(m).max()
        assert multiset_distance(list(np.linalg.eigvals(b)), list(np.linalg.eigvals(m))) < 1e-8

    def test_hessenberg_shape(self, rng):
        h = hessenberg(rng.standard_normal((5, 5)))
        assert not np.tril(h, -2).any()

    def test_hessenberg_is_similarity(self, rng):
        m = rng.standard_normal((5, 5))
        h = hessenberg(m)
        assert np.trace(h) == pytest.approx(np.trace(m), abs=1e-12)
        assert multiset_distance(list(np.linalg.eigvals(h)), list(np.linalg.eigvals(m))) < 1e-9

    def test_sweep_cap(self):
        h = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [0.0, 7.0, 8.0]])
        with pytest.raises(ConvergenceError) as exc:
            hessenberg_qr(h, max_sweeps=0)
        assert exc.value.details["unresolved"] == 3


class TestHamiltonian:
    """Tests for Ĥ = −iħW."""

    def test_entries_are_imaginary(self, rng):
        w = rng.standard_normal((3, 3))
        H = hamiltonian_matrix(w, hbar=0.5)
        assert not H.entries.real.any()
        assert np.array_equal(H.entries.imag, -0.5 * w)

    def test_energies(self):
        w = np.array([[2.0, 1.0], [0.0, -3.0]])
        H = hamiltonian_matrix(w, hbar=2.0)
        assert np.array_equal(H.energies, [4.0, -6.0])
        assert np.array_equal(H.diagonal, [-4j, 6j])

    def test_diagonal_hamiltonian(self):
        w = np.array([[2.0, 1.0], [5.0, -3.0]])
        assert np.array_equal(diagonal_hamiltonian(w, hbar=1.0), np.diag(hamiltonian_matrix(w, hbar=1.0).diagonal))

    def test_accepts_geospin_matrix(self, half_plane):
        W = geospin_matrix(christoffel_at(half_plane, (0.0, 1.0)), (1.0, 0.0))
        assert np.allclose(hamiltonian_matrix(W, hbar=1.0).entries, [[0, 1j], [-1j, 0]], atol=1e-15)

    def test_rejects_non_positive_hbar(self):
        with pytest.raises(InvalidParameterError):
            hamiltonian_matrix(ROTATION, hbar=0.0)
        with pytest.raises(InvalidParameterError):
            hamiltonian_matrix(ROTATION, hbar=-1.0)


class TestSpectrumMap:
    """Tests for the eigenvalue map λ ↦ −iħλ."""

    def test_map(self):
        assert map_eigenvalue(complex(0, 1), 1.0) == 1.0
        assert map_eigenvalue(complex(0, -1), 1.0) == -1.0
        assert map_eigenvalue(complex(2, 3), 0.5) == complex(1.5, -1.0)

    def test_rotation_spectrum(self):
        spectrum = spectrum_map([1j, -1j], hbar=1.0, W=ROTATION)
        assert spectrum.mapped == [-1.0, 1.0]
        assert spectrum.crosscheck_residual < 1e-12

    def test_multiset_distance(self):
        assert multiset_distance([1, 2j], [2j, 1]) == 0.0
        assert multiset_distance([1], [1, 2]) == float("inf")
        assert multiset_distance([0, 0], [0, 1e-3]) == pytest.approx(1e-3)

    def test_geometric_spectrum_crosscheck(self, rng):
        for _ in range(10):
            w = rng.standard_normal((4, 4))
            spectrum = geometric_spectrum(w, hbar=0.7)
            assert spectrum.crosscheck_residual < 1e-9 * (1 + 0.7 * np.linalg.norm(w, 2))
            assert all(spectrum.reliable)

    def test_half_plane(self, half_plane):
        W = geospin_matrix(christoffel_at(half_plane, (0.0, 1.0)), (1.0, 0.0))
        spectrum = geometric_spectrum(W, hbar=1.0)
        assert multiset_distance(spectrum.eigenvalues, [1j, -1j]) < 1e-14
        assert multiset_distance(spectrum.mapped, [1.0, -1.0]) < 1e-14

    def test_rejects_non_positive_hbar(self):
        with pytest.raises(InvalidParameterError):
            spectrum_map([1j], hbar=0.0)
