import numpy as np
import pytest

from oceval import BoundingBox, Detection, GroundTruthInstance


def random_box(rng, size=100.0, min_side=1.0):
    x1 = rng.uniform(0.0, size)
    y1 = rng.uniform(0.0, size)
    w = rng.uniform(min_side, size / 2)
    h = rng.uniform(min_side, size / 2)
    return BoundingBox(x1, y1, x1 + w, y1 + h)


def random_scene(rng, max_m=4, max_n=4, categories=3, size=100.0):
    m = int(rng.integers(0, max_m + 1))
    n = int(rng.integers(0, max_n + 1))
    dets = [
        Detection(random_box(rng, size), int(rng.integers(1, categories + 1)), float(rng.uniform()))
        for _ in range(m)
    ]
    gts = [
        GroundTruthInstance(random_box(rng, size), int(rng.integers(1, categories + 1)))
        for _ in range(n)
    ]
    return dets, gts


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
