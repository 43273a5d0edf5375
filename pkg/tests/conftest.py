import pytest

from noma_er.channel import LinkStats, PairStats, path_loss_linear
from noma_er.rate import ScenarioParams


def make_pair(n=1, d_near=10.0, d_far=50.0, d_p=40.0):
    return PairStats(LinkStats(path_loss_linear(d_near), n), LinkStats(path_loss_linear(d_far), n),
                     LinkStats(path_loss_linear(d_p), 1))


@pytest.fixture
def pair():
    """Two users at 10 m and 50 m, PR at 40 m, single antenna."""
    return make_pair(1)


@pytest.fixture
def pair4():
    return make_pair(4)


@pytest.fixture
def sp():
    """I = 0 dB, theta = 1, K = 2 with unit bandwidth, block and noise."""
    return ScenarioParams(1.0, 1.0, 2)
