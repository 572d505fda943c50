"""Shared fixtures: tiny deterministic datasets and fast optimizer settings.

Unit tests run the swarm with few iterations; anything that checks the full
default configuration lives in test_acceptance.py.
"""

import numpy as np
import pytest

from gbfsvm import synth
from gbfsvm.data_io import Dataset


@pytest.fixture
def blobs40():
    """40 points in two well-separated 2-d blobs, 20 per class."""
    return synth.blobs(20, 20, (0.0, 0.0), (6.0, 6.0), 0.5, 0.5, seed=1, name="blobs40")


@pytest.fixture
def overlap80():
    """80 points with genuine class overlap, for nontrivial ball splitting."""
    return synth.blobs(40, 40, (0.0, 0.0), (1.6, 1.6), 1.0, 1.0, seed=2, name="overlap80")


@pytest.fixture
def fast_pso():
    """Optimizer overrides that keep unit tests quick but still converge on
    the tiny problems used here."""
    return dict(pop=30, max_iter=150)


@pytest.fixture
def tiny_csv(tmp_path, blobs40):
    """The blobs40 dataset written as a headered CSV, label in the last column."""
    path = tmp_path / "blobs40.csv"
    synth.to_csv(blobs40, path)
    return str(path)


def random_training_set(rng, m=None, d=None, zero_radii=False):
    """A random but valid ball training set with both labels present."""
    m = int(m if m is not None else rng.integers(2, 12))
    d = int(d if d is not None else rng.integers(1, 5))
    labels = np.ones(m, dtype=int)
    labels[rng.random(m) < 0.5] = -1
    labels[0], labels[-1] = 1, -1  # both classes occur
    from gbfsvm.svm_core import BallTrainingSet

    return BallTrainingSet(
        centers=rng.uniform(-3, 3, (m, d)),
        radii=np.zeros(m) if zero_radii else rng.uniform(0, 1.5, m),
        labels=labels,
        memberships=rng.uniform(0.05, 1.0, m),
    )
