import numpy as np
import pytest

from dualdetect import FusionParams, Priors, SignalModel


@pytest.fixture
def model():
    return SignalModel(0.0, 3.0, 6.0)


@pytest.fixture
def priors():
    return Priors(0.59, 0.25, 0.16)


@pytest.fixture
def params():
    return FusionParams(5, 3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240915)
