import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from graphlets.core import CliqueBasis, GraphletModel, WeightedNetwork

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def triangle():
    return WeightedNetwork.from_edges(3, [(0, 1, 2), (0, 2, 2), (1, 2, 2)])


@pytest.fixture
def two_clique_model():
    return GraphletModel(CliqueBasis(4, ((0, 1, 2), (2, 3))), np.array([1.0, 3.0]))
