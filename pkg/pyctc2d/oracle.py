"""
Exhaustive reference implementations of the CTC quantities, for small instances.

Original Date:   2 March 2026

Every path is enumerated and its probability multiplied out in the
linear domain; nothing here shares code with the dynamic programs it
checks. The enumeration order is lexicographic over
``(c0, h0, c1, h1, ...)``, which is the decoders' tie-break order.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
from collections import defaultdict
from itertools import product
from typing import Dict, Iterator, NamedTuple, Tuple

from pyctc2d.decoder import collapse
from pyctc2d.errors import SizeGuardError
from pyctc2d.tensors import Label, ProbMap2D, ProbSeq1D, TransitionMap, check_consistent

gMaxFrames = 8  # 1D size guard: frames...
gMaxClasses1D = 4  # ...and classes.
gMaxHeight = 3  # 2D size guard: rows...
gMaxWidth = 5  # ...columns...
gMaxClasses2D = 3  # ...and classes.


class EnumeratedPath(NamedTuple):
    """One concrete path; ``heights`` is empty for 1D paths."""

    heights: Tuple[int, ...]
    classes: Tuple[int, ...]
    probability: float
    label: Label


def _guard_1d(x: ProbSeq1D):
    if x.width > gMaxFrames or x.num_classes > gMaxClasses1D:
        raise SizeGuardError(
            f"Refusing to enumerate {x.num_classes}^{x.width} paths "
            f"(limits: {gMaxFrames} frames, {gMaxClasses1D} classes)."
        )


def _guard_2d(x: ProbMap2D):
    if x.height > gMaxHeight or x.width > gMaxWidth or x.num_classes > gMaxClasses2D:
        raise SizeGuardError(
            f"Refusing to enumerate ({x.height}*{x.num_classes})^{x.width} paths "
            f"(limits: {gMaxHeight} rows, {gMaxWidth} columns, {gMaxClasses2D} classes)."
        )


def enumerate_paths_1d(x: ProbSeq1D) -> Iterator[EnumeratedPath]:
    """Every class path through ``x``, in tie-break order."""

    _guard_1d(x)
    p = x.values
    for classes in product(range(x.num_classes), repeat=x.width):
        prob = 1.0
        for t, c in enumerate(classes):
            prob *= p[t, c]
        yield EnumeratedPath((), classes, prob, collapse(classes))


def enumerate_paths_2d(x: ProbMap2D, psi: TransitionMap) -> Iterator[EnumeratedPath]:
    """Every joint (row, class) path through ``x``, in tie-break order."""

    _guard_2d(x)
    check_consistent(x, psi)
    p = x.values
    trans = psi.full_values()
    gamma = psi.gamma
    cells = list(product(range(x.num_classes), range(x.height)))
    for steps in product(cells, repeat=x.width):
        classes = tuple(c for c, _ in steps)
        heights = tuple(h for _, h in steps)
        prob = gamma[heights[0]]
        for w, (c, h) in enumerate(steps):
            if w:
                prob *= trans[heights[w - 1], w - 1, h]
            prob *= p[h, w, c]
        yield EnumeratedPath(heights, classes, prob, collapse(classes))


def _paths(x, psi):
    if isinstance(x, ProbMap2D):
        if psi is None:
            psi = TransitionMap.uniform(x.height, x.width)
        return enumerate_paths_2d(x, psi)
    return enumerate_paths_1d(x)


def oracle_ctc_prob(x: ProbSeq1D, y) -> float:
    """``P(y|x)``, summed over every class path collapsing to ``y``."""

    y = Label(y)
    return sum(path.probability for path in enumerate_paths_1d(x) if path.label == y)


def oracle_ctc2d_prob(x: ProbMap2D, psi: TransitionMap, y) -> float:
    """``P(y|x, psi, gamma)``, summed over every joint path collapsing to ``y``."""

    y = Label(y)
    return sum(path.probability for path in enumerate_paths_2d(x, psi) if path.label == y)


def oracle_best_path(x, psi: TransitionMap = None) -> EnumeratedPath:
    """
    Most probable single path; the first in tie-break order wins ties.

    Args:
        x(ProbSeq1D or ProbMap2D): Predictions.
        psi(TransitionMap): Path transitions, for 2D input. (Default = uniform)
    """

    best = None
    for path in _paths(x, psi):
        if best is None or path.probability > best.probability:
            best = path
    return best


def oracle_label_distribution(x, psi: TransitionMap = None) -> Dict[Label, float]:
    """Probability of every label reachable by some path (zero-probability labels included)."""

    res = defaultdict(float)
    for path in _paths(x, psi):
        res[path.label] += path.probability
    return dict(res)


def oracle_best_label(x, psi: TransitionMap = None) -> Tuple[Label, float]:
    """
    Most probable label; ties go to the shorter, then lexicographically smaller, one.

    This is the ranking the beam decoder uses.
    """

    dist = oracle_label_distribution(x, psi)
    label = min(dist, key=lambda y: (-dist[y], len(y), y))
    return label, dist[label]
