import numpy as np
import pytest

from posespace.musicspace import build_space, pca2
from posespace.synth import SynthParams, synth_catalog, synth_dataset
from posespace.training import TrainConfig, make_windows, train_joint


@pytest.fixture(scope="session")
def trained_result():
    """Well-trained 2-frame model shared by engine/server/acceptance tests."""
    clips = synth_dataset(10, SynthParams(seed=0))
    dataset = make_windows(clips, 2)
    return train_joint(dataset, TrainConfig(frames_per_window=2, epochs=25, seed=0))


@pytest.fixture(scope="session")
def trained_checkpoint(trained_result):
    return trained_result.checkpoint


@pytest.fixture(scope="session")
def music_space():
    catalog = synth_catalog(240, np.random.default_rng(5))
    return build_space(pca2(catalog.tracks), catalog.tracks)
