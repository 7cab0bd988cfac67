"""
Decoders for 1D and 2D CTC predictions.

Original Date:   2 March 2026

Ties are broken the same way everywhere: lowest class index first,
then lowest height index.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
from collections import defaultdict
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from numpy import argmax, logaddexp

from pyctc2d.ctc2d import height_marginals, marginal_emissions
from pyctc2d.ctc2d_util import NEG_INF, renormalize, safe_log
from pyctc2d.tensors import BLANK, Label, ProbMap2D, ProbSeq1D, TransitionMap, Variant, check_consistent


class PathChoice(NamedTuple):
    """One row and one class per map column."""

    heights: Tuple[int, ...]
    classes: Tuple[int, ...]


class DecodeResult(NamedTuple):
    """Decoded label, with its path (greedy) or prefix (beam) log-probability."""

    label: Label
    score: float
    path: Optional[PathChoice] = None


def collapse(classes) -> Label:
    """Merge adjacent duplicates, then drop blanks."""

    res = []
    prev = None
    for c in classes:
        c = int(c)
        if c != prev and c != BLANK:
            res.append(c)
        prev = c
    return Label(res)


def greedy_decode_1d(x: ProbSeq1D) -> DecodeResult:
    """Best class of every frame, collapsed."""

    best = argmax(x.log_values, axis=1)
    score = float(x.log_values[np.arange(x.width), best].sum())
    return DecodeResult(collapse(best), score)


def greedy_decode_2d(x: ProbMap2D, psi: TransitionMap) -> DecodeResult:
    """
    Best (row, class) pair of every column, weighted by the path transitions, collapsed.

    Column 0 weighs row ``h`` by ``gamma[h]``; later columns by the
    transition into ``h``. For the full variant, the transition row is
    the one leaving the previously chosen height.

    Returns:
        DecodeResult: With the chosen ``PathChoice``; its score is the
            path's log-probability.
    """

    check_consistent(x, psi)
    H, W, C = x.values.shape
    heights = []
    classes = []
    score = 0.0
    if psi.variant is Variant.FULL:
        row_weights = psi.log_gamma
        for w in range(W):
            if w:
                row_weights = psi.log_values[heights[-1], w - 1]
            # (C, H) so that the flat argmax prefers low classes, then low heights.
            cell = (row_weights[:, None] + x.log_values[:, w, :]).T
            ix = int(argmax(cell))
            c, h = divmod(ix, H)
            heights.append(h)
            classes.append(c)
            score += float(cell[c, h])
    else:
        log_pi = np.vstack((psi.log_gamma[None, :], psi.log_values))
        cells = (log_pi.T[:, :, None] + x.log_values).transpose(1, 2, 0).reshape(W, C * H)
        best = argmax(cells, axis=1)
        for ix in best:
            c, h = divmod(int(ix), H)
            heights.append(h)
            classes.append(c)
        score = float(cells[np.arange(W), best].sum())
    return DecodeResult(collapse(classes), score, PathChoice(tuple(heights), tuple(classes)))


def _rank_key(item):
    prefix, (pb, pnb) = item
    return (-logaddexp(pb, pnb), len(prefix), prefix)


def prefix_beam_search(log_probs, beam_width) -> List[DecodeResult]:
    """
    Prefix beam search over per-frame class log-probabilities.

    Every prefix keeps two log-probabilities: of the paths so far
    ending in a blank, and of those ending in its last symbol.

    Args:
        log_probs(array): (T, C) log-probabilities.
        beam_width(int): Prefixes kept after each frame.

    Returns:
        [DecodeResult]: At most ``beam_width`` results, best first.
    """

    if beam_width < 1:
        raise ValueError(f"beam_width must be at least one; got {beam_width}.")
    T, C = log_probs.shape
    beams = {(): (0.0, NEG_INF)}
    for t in range(T):
        lp = log_probs[t]
        nxt = defaultdict(lambda: [NEG_INF, NEG_INF])
        for prefix, (pb, pnb) in beams.items():
            total = logaddexp(pb, pnb)
            entry = nxt[prefix]
            entry[0] = logaddexp(entry[0], total + lp[BLANK])
            if prefix:
                entry[1] = logaddexp(entry[1], pnb + lp[prefix[-1]])
            for c in range(1, C):
                longer = nxt[prefix + (c,)]
                via = pb if prefix and prefix[-1] == c else total
                longer[1] = logaddexp(longer[1], via + lp[c])
        ranked = sorted(nxt.items(), key=_rank_key)
        alive = [item for item in ranked if np.isfinite(logaddexp(*item[1]))]
        beams = dict((alive or ranked)[:beam_width])
    ranked = sorted(beams.items(), key=_rank_key)
    return [DecodeResult(Label(prefix), float(logaddexp(pb, pnb))) for prefix, (pb, pnb) in ranked]


def beam_decode(x, beam_width, psi: TransitionMap = None) -> List[DecodeResult]:
    """
    Beam search decode of a 1D sequence or of a 2D map.

    A 2D map is first reduced to per-column class distributions by
    marginalizing over height with the path's prior row probabilities
    (gamma for column 0, the transitions after that; chained through the
    source row for the full variant). The 1D prefix search then runs on
    the result.

    Args:
        x(ProbSeq1D or ProbMap2D): Predictions.
        beam_width(int): Prefixes kept after each frame or column.
        psi(TransitionMap): Path transitions, for 2D input.
            (Default = None, meaning uniform simplified transitions)

    Returns:
        [DecodeResult]: Ranked by prefix log-probability; ties go to the
            shorter, then lexicographically smaller, prefix.
    """

    if isinstance(x, ProbMap2D):
        if psi is None:
            psi = TransitionMap.uniform(x.height, x.width)
        check_consistent(x, psi)
        m = height_marginals(psi.gamma[None], psi.values[None], psi.variant)
        e = renormalize(marginal_emissions(x.values[None], m)[0])
        return prefix_beam_search(safe_log(e), beam_width)
    return prefix_beam_search(x.log_values, beam_width)
