"""Shared fixtures: zoo manifolds and a seeded generator."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add the toolkit directory to the Python path
toolkit_path = Path(__file__).parent.parent.parent
if str(toolkit_path) not in sys.path:
    sys.path.insert(0, str(toolkit_path))

from geospin.geometry.zoo import (  # noqa: E402
    euclidean,
    flat_torus,
    poincare_disk,
    poincare_half_plane,
    sphere,
    warped_product,
)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


@pytest.fixture
def plane():
    return euclidean(2)


@pytest.fixture
def unit_sphere():
    return sphere(1.0)


@pytest.fixture
def half_plane():
    return poincare_half_plane()


@pytest.fixture
def disk():
    return poincare_disk()


@pytest.fixture(
    params=[
        lambda: euclidean(2),
        lambda: euclidean(3),
        lambda: sphere(1.0),
        poincare_half_plane,
        poincare_disk,
        lambda: flat_torus(2),
        warped_product,
    ],
    ids=["euclidean2", "euclidean3", "sphere", "half_plane", "disk", "flat_torus", "warped"],
)
def zoo_field(request):
    """Every zoo manifold at its default parameters."""
    return request.param()
