import numpy as np
import pytest

from rocfit import LabeledSample


@pytest.fixture
def toy_sample() -> LabeledSample:
    """Twelve observations over seven unique marker values.

    Per threshold x1..x7 the outcomes are 0; 1; 0,0; 0,0,1; 0,1,1; 1; 1.
    """
    scores = [1, 2, 3, 3, 4, 4, 4, 5, 5, 5, 6, 7]
    labels = [0, 1, 0, 0, 0, 0, 1, 0, 1, 1, 1, 1]
    return LabeledSample(scores=np.asarray(scores, dtype=float),
                         labels=np.asarray(labels))


@pytest.fixture
def diagonal_sample() -> LabeledSample:
    """One unique score value: the ROC curve is the diagonal."""
    return LabeledSample(scores=np.array([0.5, 0.5, 0.5]),
                         labels=np.array([0, 1, 0]))


@pytest.fixture
def separated_sample() -> LabeledSample:
    """All class-1 scores strictly above all class-0 scores."""
    return LabeledSample(scores=np.array([0.1, 0.2, 0.8, 0.9]),
                         labels=np.array([0, 0, 1, 1]))


def random_discrete_sample(rng: np.random.Generator, max_n: int = 30,
                           max_levels: int = 6) -> LabeledSample:
    """Small discrete sample with both classes present."""
    while True:
        n = int(rng.integers(2, max_n + 1))
        levels = int(rng.integers(1, max_levels + 1))
        scores = rng.integers(0, levels, size=n).astype(float)
        labels = rng.integers(0, 2, size=n)
        if 0 < labels.sum() < n:
            return LabeledSample(scores=scores, labels=labels)
