"""Geometric Hamiltonian Ĥ = −iħW and its spectrum.

Ĥ has purely imaginary entries and is in general not Hermitian; nothing here
symmetrizes it. Its eigenvalues follow from those of W by
λ ↦ ħλ⁽ⁱᵐ⁾ − iħλ⁽ˢ⁾ (that is, multiplication by −iħ), and the map is
cross-checked against an independent LAPACK solve of Ĥ itself.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from loguru import logger

from geospin.core.config import settings
from geospin.core.errors import InvalidParameterError
from geospin.geometry.geospin import GeospinMatrix, split_diag_offdiag
from geospin.spectrum.eigen import eig_real_nonsymmetric, sort_eigenvalues

CROSSCHECK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    entries: np.ndarray  # complex, = −iħ·W
    hbar: float
    source: np.ndarray  # the real W
    energies: np.ndarray  # E⁽ᵏ⁾ = ħ Wᵏₖ
    diagonal: np.ndarray  # H⁽ᵏ⁾ = −i E⁽ᵏ⁾


@dataclass
class ComplexSpectrum:
    eigenvalues: list[complex]  # of W, sorted by (real, imag)
    mapped: list[complex]  # λ⁽ʳᵉ⁾ of Ĥ, same order
    hbar: float
    residuals: list[Optional[float]] = field(default_factory=list)
    reliable: list[bool] = field(default_factory=list)
    crosscheck_residual: Optional[float] = None


def _check_hbar(hbar: float) -> float:
    if not (hbar > 0 and np.isfinite(hbar)):
        raise InvalidParameterError("hbar", hbar, "must be positive")
    return float(hbar)


def _as_w(W: "GeospinMatrix | np.ndarray") -> np.ndarray:
    return W.w if isinstance(W, GeospinMatrix) else np.asarray(W, dtype=float)


def hamiltonian_matrix(W: "GeospinMatrix | np.ndarray", hbar: Optional[float] = None) -> HamiltonianMatrix:
    """Ĥ = −iħW entrywise, with the diagonal energies E⁽ᵏ⁾ = ħWᵏₖ.

    Raises:
        InvalidParameterError: hbar <= 0
    """
    hbar = _check_hbar(settings.hbar if hbar is None else hbar)
    w = _as_w(W)
    entries = np.zeros(w.shape, dtype=complex)
    # real parts stay exactly zero
    entries.imag = -hbar * w
    energies = hbar * np.diag(w)
    diagonal = np.zeros(energies.shape, dtype=complex)
    diagonal.imag = -energies
    return HamiltonianMatrix(entries=entries, hbar=hbar, source=w, energies=energies, diagonal=diagonal)


def diagonal_hamiltonian(W: "GeospinMatrix | np.ndarray", hbar: Optional[float] = None) -> np.ndarray:
    """Ĥ built from the diagonal part W⁽ʳ⁾ alone; equals diag(H⁽¹⁾, …, H⁽ⁿ⁾)."""
    w_r, _ = split_diag_offdiag(_as_w(W))
    return hamiltonian_matrix(w_r, hbar).entries


def map_eigenvalue(lam: complex, hbar: float) -> complex:
    """λ⁽ʳᵉ⁾ = ħλ⁽ⁱᵐ⁾ − iħλ⁽ˢ⁾."""
    return complex(hbar * lam.imag, -hbar * lam.real)


def multiset_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Largest distance after greedily pairing each value of `a` with its nearest unused value in `b`."""
    if len(a) != len(b):
        return float("inf")
    remaining = list(b)
    worst = 0.0
    for z in a:
        index = min(range(len(remaining)), key=lambda i: abs(remaining[i] - z))
        worst = max(worst, abs(remaining.pop(index) - z))
    return worst


def spectrum_map(
    eigs: Sequence[complex], hbar: Optional[float] = None, W: "GeospinMatrix | np.ndarray | None" = None
) -> ComplexSpectrum:
    """Map eigenvalues of W to eigenvalues of Ĥ.

    When W is given, eig(Ĥ) is also computed independently and compared with
    the mapped values; a mismatch above 1e-9·(1 + ‖Ĥ‖) is logged.
    """
    hbar = _check_hbar(settings.hbar if hbar is None else hbar)
    eigs = sort_eigenvalues([complex(z) for z in eigs])
    mapped = [map_eigenvalue(z, hbar) for z in eigs]
    spectrum = ComplexSpectrum(eigenvalues=eigs, mapped=mapped, hbar=hbar)
    if W is not None:
        H = hamiltonian_matrix(W, hbar).entries
        reference = [complex(z) for z in np.linalg.eigvals(H)]
        spectrum.crosscheck_residual = multiset_distance(mapped, reference)
        bound = CROSSCHECK_TOL * (1.0 + float(np.linalg.norm(H, ord=2)))
        if spectrum.crosscheck_residual > bound:
            logger.warning(f"eig(Ĥ) differs from −iħ·eig(W) by {spectrum.crosscheck_residual:.3e}")
    return spectrum


def geometric_spectrum(W: "GeospinMatrix | np.ndarray", hbar: Optional[float] = None) -> ComplexSpectrum:
    """eig(W), the mapped Hamiltonian eigenvalues, residuals and the cross-check."""
    result = eig_real_nonsymmetric(_as_w(W))
    spectrum = spectrum_map(result.eigenvalues, hbar, W)
    spectrum.residuals = result.residuals
    spectrum.reliable = result.reliable
    return spectrum
