import math

import numpy as np
import pytest

from gexp import Grid1D, Kind, VolatilityBand, catalog, make_drift


@pytest.fixture(scope="session")
def band_classical():
    return VolatilityBand(1.0, 1.0)


@pytest.fixture(scope="session")
def band_wide():
    return VolatilityBand(0.5, 1.0)


@pytest.fixture(scope="session")
def grid():
    return Grid1D()


@pytest.fixture(scope="session")
def payoffs():
    return catalog()


@pytest.fixture(scope="session")
def ou_spec():
    return make_drift("ou")


def classical_params(drift_id: str, x: float, horizon: float = 1.0):
    """Terminal law N(mean, var) of the classical (v = 1) reduction of the
    qv-driven equation for the shipped drifts with a closed-form solution."""
    if drift_id == "zero":
        return x, horizon
    if drift_id == "ou":
        return x * math.exp(-horizon), (1.0 - math.exp(-2.0 * horizon)) / 2.0
    raise ValueError(drift_id)
