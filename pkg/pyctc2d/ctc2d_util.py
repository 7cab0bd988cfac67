"""
General purpose numerical utilities for pyctc2d.

Original Date:   2 March 2026

Holds the shift-invariant softmax, log-domain helpers shared by the
dynamic programs, and the edit distance used for evaluation.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
import numpy as np
from numpy import errstate, exp, isfinite, log, ones, zeros
from scipy.special import logsumexp

from pyctc2d.errors import InvalidTensorError, ValidationReport

NEG_INF = -np.inf  # Log-domain zero.


def _check_finite(logits, what="logits"):
    """Raise ``InvalidTensorError`` if ``logits`` holds a NaN or infinity."""

    bad = ~isfinite(logits)
    if bad.any():
        ix = tuple(int(i) for i in np.argwhere(bad)[0])
        val = float(logits[ix])
        raise InvalidTensorError(
            ValidationReport(False, f"non-finite {what} value {val} at index {ix}", "entry", ix, val)
        )


def softmax_normalize(logits, axis=-1):
    """
    Normalize raw scores into probabilities, along one axis.

    The axis maximum is subtracted before exponentiation, which makes
    the result invariant to adding a constant along ``axis``.

    Args:
        logits(array): Raw, finite, real valued grid.
        axis(int): Axis to normalize along (class, or height, axis).
            (Optional; default = -1.)

    Returns:
        array: Probabilities summing to one along ``axis``.

    Raises:
        InvalidTensorError: If any input is not finite.
    """

    logits = np.asarray(logits, dtype=float)
    _check_finite(logits)
    shifted = logits - logits.max(axis=axis, keepdims=True)
    e = exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def log_softmax(logits, axis=-1):
    """Log-domain companion of ``softmax_normalize()``, with the same shift invariance."""

    logits = np.asarray(logits, dtype=float)
    _check_finite(logits)
    shifted = logits - logits.max(axis=axis, keepdims=True)
    return shifted - log(exp(shifted).sum(axis=axis, keepdims=True))


def renormalize(values, axis=-1):
    """
    Explicitly rescale non-negative values to unit sum along ``axis``.

    Rows summing to zero become uniform.
    """

    values = np.clip(np.asarray(values, dtype=float), 0.0, None)
    sums = values.sum(axis=axis, keepdims=True)
    n = values.shape[axis]
    res = np.divide(values, sums, out=ones(values.shape) / n, where=sums > 0)
    return res


def safe_log(x):
    """Natural log, mapping zero to ``-inf`` without a warning."""

    with errstate(divide="ignore"):
        return log(x)


def log_sum(a, axis):
    """``logsumexp()`` along ``axis``, quiet when every term is ``-inf``."""

    with errstate(divide="ignore", invalid="ignore"):
        return logsumexp(a, axis=axis)


def _expand_mask(mask, ndim):
    return mask.reshape(mask.shape + (1,) * (ndim - mask.ndim))


def combine_predecessors(a, skip):
    """
    Sum, in log domain, the lattice states able to precede each state.

    State ``s`` may be reached from ``s``, ``s - 1`` and, where ``skip``
    allows it, ``s - 2``.

    Args:
        a(array): Log-probabilities, shaped (batch, states, ...).
        skip(array): Boolean (batch, states) mask of states reachable from ``s - 2``.

    Returns:
        array: Same shape as ``a``.
    """

    out = a.copy()
    out[:, 1:] = np.logaddexp(out[:, 1:], a[:, :-1])
    skipped = np.where(_expand_mask(skip[:, 2:], a.ndim), a[:, :-2], NEG_INF)
    out[:, 2:] = np.logaddexp(out[:, 2:], skipped)
    return out


def combine_successors(a, skip):
    """
    Adjoint of ``combine_predecessors()``: sum the states each state may move on to.

    Args:
        a(array): Log-probabilities, shaped (batch, states, ...).
        skip(array): Boolean (batch, states) mask of states reachable from ``s - 2``.

    Returns:
        array: Same shape as ``a``.
    """

    out = a.copy()
    out[:, :-1] = np.logaddexp(out[:, :-1], a[:, 1:])
    skipped = np.where(_expand_mask(skip[:, 2:], a.ndim), a[:, 2:], NEG_INF)
    out[:, :-2] = np.logaddexp(out[:, :-2], skipped)
    return out


def edit_distance(hyp, ref):
    """
    Levenshtein distance between two sequences.

    Args:
        hyp([int] or str): Hypothesis.
        ref([int] or str): Reference.

    Returns:
        int: Minimum number of insertions, deletions and substitutions.
    """

    hyp = list(hyp)
    ref = list(ref)
    prev = np.arange(len(ref) + 1)
    for i, h in enumerate(hyp, start=1):
        cur = zeros(len(ref) + 1, dtype=int)
        cur[0] = i
        for j, r in enumerate(ref, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (h != r))
        prev = cur
    return int(prev[-1])


def normalized_edit_distance(hyp, ref):
    """Edit distance divided by the reference length (empty references count as length one)."""

    return edit_distance(hyp, ref) / max(len(ref), 1)
