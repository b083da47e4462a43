import json
import os

import numpy as np
import pytest

from fraclab import (
    assemble_mass,
    assemble_stiffness,
    build_grid,
    make_params,
    solve_eigs,
)

DATA = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


def load_data(name):
    with open(os.path.join(DATA, name)) as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def params_s25():
    return make_params(1, 0.25)


@pytest.fixture(scope="session")
def params_s40():
    return make_params(1, 0.4)


@pytest.fixture(scope="session")
def grid400():
    return build_grid(-1.0, 1.0, 400)


@pytest.fixture(scope="session")
def ops400(params_s25, grid400):
    """(A, M) at s=0.25 on the 400-cell reference grid, shared read-only."""
    return assemble_stiffness(grid400, params_s25), assemble_mass(grid400)


@pytest.fixture(scope="session")
def eigs400(ops400, grid400):
    A, M = ops400
    return solve_eigs(A, M, grid400.interior_indices, 5)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(42)
