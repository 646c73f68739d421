"""Geodesic flow and the mode equation."""
