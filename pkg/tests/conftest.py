import os

os.environ["TESTING"] = "test_config.cfg"

import numpy as np
import pytest
from click.testing import CliRunner

from hopf_eikonal.cli import cli as hopf_cli
from hopf_eikonal.models import HopfMapSpec, SamplingSpec

# (m, n) pairs of the solution family used across the suite
SOLUTION_PAIRS = [(1, 1), (1, 2), (2, 1), (1, 3), (2, 3), (3, 2), (-1, 2)]


@pytest.fixture
def cli():
    yield hopf_cli


@pytest.fixture
def runner():
    yield CliRunner()


@pytest.fixture
def spec11():
    yield HopfMapSpec(1, 1)


@pytest.fixture
def spec23():
    yield HopfMapSpec(2, 3)


@pytest.fixture
def sampling():
    yield SamplingSpec(count=200, seed=7)


@pytest.fixture
def rng():
    yield np.random.default_rng(2024)


@pytest.fixture
def regular_points(rng):
    """Cartesian points on the toroidal shell eta in [0.2, 2.0], away from every singular locus"""
    from hopf_eikonal.coords import _to_cartesian

    etas = rng.uniform(0.2, 2.0, size=100)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=(100, 2))
    yield [np.array(_to_cartesian(eta, xi, phi, 1e-12)) for eta, (xi, phi) in zip(etas, angles)]


@pytest.fixture
def unlinked_circles():
    """Two unit circles in the z = 0 plane, the second translated by (10, 0, 0)"""
    angles = np.linspace(0.0, 2.0 * np.pi, 400, endpoint=False)
    circle = np.column_stack([np.cos(angles), np.sin(angles), np.zeros_like(angles)])
    yield circle, circle + np.array([10.0, 0.0, 0.0])


@pytest.fixture
def hopf_link():
    """Unit circle in z = 0 and a unit circle in y = 0 centred at (1, 0, 0); they link once"""
    angles = np.linspace(0.0, 2.0 * np.pi, 400, endpoint=False)
    first = np.column_stack([np.cos(angles), np.sin(angles), np.zeros_like(angles)])
    second = np.column_stack([1.0 + np.cos(angles), np.zeros_like(angles), np.sin(angles)])
    yield first, second
