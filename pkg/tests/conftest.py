import numpy as np
import pytest

import sparsebeam as sb

# The reference simulation study: 8 half-wavelength elements, SOI at
# broadside with 10 dB SNR, two 20 dB interferers at +/-30 deg and a
# 40 dB interferer at 70 deg, 100 snapshots.
INTERFERERS = ((-30.0, 20.0), (30.0, 20.0), (70.0, 40.0))


@pytest.fixture(scope="session")
def geometry():
    return sb.ArrayGeometry(8, 0.5)


@pytest.fixture(scope="session")
def scenario():
    return sb.Scenario(0.0, 10.0, INTERFERERS, 100, 1.0, 12345)


@pytest.fixture(scope="session")
def snapshots(scenario, geometry):
    return sb.generate_snapshots(scenario, geometry)


@pytest.fixture(scope="session")
def sample_r(snapshots):
    return sb.sample_covariance(snapshots)


@pytest.fixture(scope="session")
def grid():
    return sb.interference_grid(0.0, 1.0)


@pytest.fixture(scope="session")
def a_grid(geometry, grid):
    return sb.steering_matrix(geometry, grid)


@pytest.fixture(scope="session")
def a0(geometry):
    return sb.steering_vector(geometry, 0.0)


@pytest.fixture(scope="session")
def q_weights(a_grid, snapshots):
    return sb.build_q(a_grid, snapshots)
