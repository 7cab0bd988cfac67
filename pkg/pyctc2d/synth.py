"""
Generator of synthetic "scene text" feature maps.

Original Date:   2 March 2026

Each instance is an (H, W, F) grid of real features holding a label
written along a (flat, slanted or sinusoidal) baseline. Feature channels:

    0 .. K-1   evidence of each real symbol (class k + 1)
    K          text line evidence, along the baseline, across the full width
    K+1 ..     pure noise

Each symbol occupies a contiguous span of columns; spans are separated
by single evidence-free gap columns, so repeated symbols stay feasible.
Optional clutter stamps distractor symbol evidence (no line evidence)
at least two rows off the baseline over every column it covers.

Instance ``i`` of a configuration depends on nothing but
``(config, i)``.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
import logging
from typing import List, NamedTuple, Tuple

import numpy as np
from numpy import arange, clip, exp, pi, rint, sin, zeros
from numpy.random import default_rng

from pyctc2d.ctc2d_cfg import SynthConfig
from pyctc2d.tensors import Alphabet, Label

logger = logging.getLogger(__name__)

gMinClutterOffset = 2  # rows between a distractor and the baseline


class SynthInstance(NamedTuple):
    """One synthetic instance."""

    features: np.ndarray  #: (H, W, F) features.
    label: Label  #: Written label.
    baseline: Tuple[int, ...]  #: True row (0-based) of every column; diagnostics only.
    alphabet: Alphabet  #: Symbols of the label's classes.


def make_baseline(config: SynthConfig, rng) -> np.ndarray:
    """Per-column baseline row, 0-based, within ``[0, height - 1]``."""

    H, W = config.height, config.width
    center = (H - 1) / 2.0
    w = arange(W)
    if config.curvature == "flat":
        rows = np.full(W, float(rng.integers(0, H)))
    elif config.curvature == "slanted":
        direction = 1.0 if rng.random() < 0.5 else -1.0
        rows = center + direction * config.amplitude * (2.0 * w / max(W - 1, 1) - 1.0)
    else:
        phase = rng.uniform(0.0, 2.0 * pi)
        rows = center + config.amplitude * sin(2.0 * pi * config.periods * w / W + phase)
    return clip(rint(rows), 0, H - 1).astype(int)


def symbol_spans(length: int, width: int, max_span: int, rng) -> List[Tuple[int, int]]:
    """
    Column ranges ``[start, stop)`` of each symbol, left to right, with one gap column between neighbors.

    Raises:
        ValueError: If ``length`` symbols can't fit ``width`` columns.
    """

    if length == 0:
        return []
    span = min(max_span, (width - (length - 1)) // length)
    if span < 1:
        raise ValueError(f"A label of {length} symbols doesn't fit {width} columns.")
    extent = length * span + length - 1
    offset = int(rng.integers(0, width - extent + 1))
    return [(offset + k * (span + 1), offset + k * (span + 1) + span) for k in range(length)]


def _bump(height, row, bump_width):
    h = arange(height)
    return exp(-((h - row) ** 2) / (2.0 * bump_width ** 2))


def _stamp_clutter(features, config, baseline, spans, rng):
    H = config.height
    K = config.num_symbols
    for start, stop in spans:
        if rng.random() >= config.clutter:
            continue
        span = stop - start
        col = int(rng.integers(0, config.width - span + 1))
        near = baseline[col : col + span]
        rows = [h for h in range(H) if np.abs(h - near).min() >= gMinClutterOffset]
        if not rows:
            continue
        row = rows[int(rng.integers(0, len(rows)))]
        symbol = int(rng.integers(0, K))
        bump = _bump(H, row, config.bump_width)
        features[:, col : col + span, symbol] += bump[:, None]


def generate_instance(config: SynthConfig, index: int) -> SynthInstance:
    """Instance ``index`` of the data set described by ``config``."""

    config.check()
    rng = default_rng([config.seed, index])
    H, W, K = config.height, config.width, config.num_symbols
    alphabet = Alphabet.default(K + 1)
    length = int(rng.integers(config.min_label_len, config.max_label_len + 1))
    label = Label(rng.integers(1, K + 1, size=length))
    baseline = make_baseline(config, rng)
    spans = symbol_spans(length, W, config.max_span, rng)
    features = zeros((H, W, config.num_features))
    for symbol, (start, stop) in zip(label, spans):
        for w in range(start, stop):
            features[:, w, symbol - 1] += _bump(H, baseline[w], config.bump_width)
    for w in range(W):
        features[:, w, K] += _bump(H, baseline[w], config.bump_width)
    if config.clutter > 0.0:
        _stamp_clutter(features, config, baseline, spans, rng)
    if config.noise > 0.0:
        features += config.noise * rng.standard_normal(features.shape)
    features.setflags(write=False)
    return SynthInstance(features, label, tuple(int(b) for b in baseline), alphabet)


def generate(config: SynthConfig, count: int, start: int = 0) -> List[SynthInstance]:
    """
    Instances ``start`` through ``start + count - 1`` of the data set described by ``config``.

    Raises:
        ConfigError: If the configured labels can't fit the map.
    """

    config.check()
    logger.debug("Generating %d instances (seed %d, from %d).", count, config.seed, start)
    return [generate_instance(config, i) for i in range(start, start + count)]


def stack_features(instances) -> np.ndarray:
    """(N, H, W, F) stack of the instances' features."""

    return np.stack([inst.features for inst in instances])
