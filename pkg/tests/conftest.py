import numpy as np
import pytest

from zbuscert import (
    ThreeNodeParams,
    TwoNodeParams,
    assemble_system,
    index_loads,
    three_node,
    two_node,
)


def build(feeder):
    """Assemble a feeder into (feeder, system, indexed loads)."""
    system = assemble_system(feeder.network, feeder.wye, feeder.delta, feeder.v_slack)
    return feeder, system, index_loads(feeder.network, feeder.wye, feeder.delta)


@pytest.fixture
def two_node_case():
    def make(s_l, **kwargs):
        return build(two_node(TwoNodeParams(s_l=s_l, **kwargs)))

    return make


@pytest.fixture
def three_node_case():
    def make(theta):
        return build(three_node(ThreeNodeParams(theta=theta)))

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
