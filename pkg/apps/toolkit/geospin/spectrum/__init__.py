"""Nonsymmetric eigen solver and the geometric Hamiltonian."""

from geospin.spectrum.eigen import EigenResult, eig_real_nonsymmetric
from geospin.spectrum.hamiltonian import (
    ComplexSpectrum,
    HamiltonianMatrix,
    geometric_spectrum,
    hamiltonian_matrix,
    spectrum_map,
)

__all__ = [
    "ComplexSpectrum",
    "EigenResult",
    "HamiltonianMatrix",
    "eig_real_nonsymmetric",
    "geometric_spectrum",
    "hamiltonian_matrix",
    "spectrum_map",
]
