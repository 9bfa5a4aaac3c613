import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from core.api import SystemState
from core.engine import ShptEngine
from core.trie import build_ideal_hpt

settings.register_profile('default', max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile('ci', max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'default'))

EXAMPLE_KEYS = ['0010', '0011', '0110']
ROOT_SPLIT_KEYS = ['00', '01', '1']

bit_labels = st.text(alphabet='01', max_size=10)
key_sets = st.sets(st.text(alphabet='01', min_size=1, max_size=8), min_size=1, max_size=8)


def materialized(keys, peers: int = 8, seed: int = 0) -> SystemState:
    state = SystemState(peers=peers, seed=seed)
    build_ideal_hpt(keys).materialize(state)
    return state


@pytest.fixture
def example_state() -> SystemState:
    return materialized(EXAMPLE_KEYS)


@pytest.fixture
def single_peer() -> SystemState:
    return SystemState(peers=1)


@pytest.fixture
def engine(single_peer) -> ShptEngine:
    return ShptEngine(single_peer)
