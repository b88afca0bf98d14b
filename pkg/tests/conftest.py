import numpy as np
import pytest

from core.state import ModelState
from data.models import FeatureMapping, InteractionSet
from evaluation.synthetic import generate_synthetic
from training.config import TrainConfig


@pytest.fixture
def toy_mapping():
    # user features: user:u0, young, user:u1, user:u2, old; item features: a, b, c
    return FeatureMapping.build(
        ['u0', 'u1', 'u2'],
        ['i0', 'i1', 'i2'],
        [['user:u0', 'young'], ['user:u1', 'young'], ['user:u2', 'old']],
        [['a'], ['a', 'b'], ['b', 'c']],
    )


@pytest.fixture
def toy_interactions():
    return InteractionSet([0, 0, 1, 1, 2, 2], [0, 2, 1, 2, 0, 1], [1, 0, 1, 0, 0, 1])


@pytest.fixture
def toy_model(toy_mapping):
    return ModelState.initialize(
        toy_mapping.n_features('user'), toy_mapping.n_features('item'), 4, seed=0, dtype=np.float64
    )


@pytest.fixture
def serial_config():
    return TrainConfig(base_learning_rate=0.05, epochs_max=5, threads=1, early_stop_patience=2, rng_seed=7)


@pytest.fixture(scope='session')
def small_dataset():
    return generate_synthetic(
        n_users=120, n_items=60, n_tags=20, n_groups=4, tags_per_item=3,
        interactions_per_user=12, noise=0.1, words_per_user=3, seed=3, name='small'
    )
