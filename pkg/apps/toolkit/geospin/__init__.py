"""Geospin: geodesic flow, geospin matrix and geometric Hamiltonian toolkit."""

__version__ = "0.1.0"
