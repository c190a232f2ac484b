"""Shared potentials and boundary conditions."""

import numpy as np
import pytest

from transmission_eigen_toolkit.potential.model import BoundaryCondition, Potential


@pytest.fixture
def unit_well():
    return Potential.square_well(1.0, 1.0)


@pytest.fixture
def deep_well():
    """Square well with three bound states."""
    return Potential.square_well(-20.0, 1.0)


@pytest.fixture
def two_step():
    return Potential.two_step(1.0, 1.0)


@pytest.fixture
def spike():
    return Potential.delta(0.5, 2.0, 1.0)


@pytest.fixture
def staircase():
    return Potential.piecewise(1.0, [(0.0, 0.3, 2.0), (0.3, 0.7, -1.5), (0.7, 1.0, 0.5)])


@pytest.fixture
def robin():
    return BoundaryCondition.non_dirichlet(0.7)


@pytest.fixture
def neumann():
    return BoundaryCondition.non_dirichlet(0.0)


@pytest.fixture
def dirichlet():
    return BoundaryCondition.dirichlet()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
