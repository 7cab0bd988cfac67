"""
Shared builders and options for the pyctc2d tests.

Every random builder takes a seeded ``numpy.random.Generator``.
"""
import numpy as np
import pytest
from hypothesis import strategies as st
from numpy.random import default_rng

from pyctc2d.tensors import Label, ProbMap2D, ProbSeq1D, TransitionMap, Variant


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run acceptance-scale tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="acceptance scale; use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return default_rng(20260302)


def random_seq(rng, frames, classes, sharpness=1.5) -> ProbSeq1D:
    return ProbSeq1D.from_logits(sharpness * rng.standard_normal((frames, classes)))


def random_map(rng, height, width, classes, sharpness=1.5) -> ProbMap2D:
    return ProbMap2D.from_logits(sharpness * rng.standard_normal((height, width, classes)))


def random_psi(rng, height, width, variant=Variant.SIMPLIFIED) -> TransitionMap:
    variant = Variant(variant)
    if variant is Variant.FULL:
        shape = (height, width - 1, height)
    else:
        shape = (width - 1, height)
    return TransitionMap.from_logits(rng.standard_normal(shape), rng.standard_normal(height), variant)


def random_label(rng, classes, max_len) -> Label:
    length = int(rng.integers(0, max_len + 1))
    return Label(rng.integers(1, classes, size=length))


def uniform_seq(frames, classes) -> ProbSeq1D:
    return ProbSeq1D(np.full((frames, classes), 1.0 / classes))


def delta_seq(classes_per_frame, num_classes) -> ProbSeq1D:
    """All the probability on one class per frame."""

    values = np.zeros((len(classes_per_frame), num_classes))
    values[np.arange(len(classes_per_frame)), classes_per_frame] = 1.0
    return ProbSeq1D(values)


def delta_path(heights, classes, height, num_classes, variant=Variant.SIMPLIFIED):
    """
    A map and transitions putting all the probability on one (row, class) path.

    Off-path positions hold the blank.
    """

    width = len(heights)
    values = np.zeros((height, width, num_classes))
    values[:, :, 0] = 1.0
    for w, (h, c) in enumerate(zip(heights, classes)):
        values[h, w, :] = 0.0
        values[h, w, c] = 1.0
    gamma = np.zeros(height)
    gamma[heights[0]] = 1.0
    if Variant(variant) is Variant.FULL:
        trans = np.full((height, width - 1, height), 1.0 / height)
        for w in range(1, width):
            trans[heights[w - 1], w - 1, :] = 0.0
            trans[heights[w - 1], w - 1, heights[w]] = 1.0
    else:
        trans = np.zeros((width - 1, height))
        trans[np.arange(width - 1), list(heights[1:])] = 1.0
    return ProbMap2D(values), TransitionMap(trans, gamma=gamma, variant=variant)


def labels(num_classes, max_len):
    """Hypothesis strategy for labels over ``num_classes`` classes, blank included."""

    return st.lists(st.integers(1, num_classes - 1), max_size=max_len).map(Label)
