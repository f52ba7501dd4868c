
import pytest
from hypothesis import settings

from srfgame.gaussian import GaussianGame
from srfgame.model import CostFunction, DemandModel

settings.register_profile("default", deadline=None, max_examples=20)
settings.load_profile("default")


@pytest.fixture
def exp_game_120():
    return GaussianGame(100, 120.0, DemandModel.exponential(1.0))


@pytest.fixture
def exp_game_100():
    return GaussianGame(100, 100.0, DemandModel.exponential(1.0))


@pytest.fixture
def lomax_cost():
    return CostFunction.quadratic(0.001)
