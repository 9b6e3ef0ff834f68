import numpy as np
import pytest

from phasetv import ModelParams, PhasePair

REFERENCE_PARAMS = ModelParams(lambda1=2.5, lambda2=2.5, lambda3=5.0, beta=0.001)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_pair(rng, shape, spread=1.0):
    return PhasePair(rng.uniform(-spread, spread, shape), rng.uniform(-spread, spread, shape))
