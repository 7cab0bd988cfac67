"""
Behavioral model of the vanilla connectionist temporal classification loss.

Original Date:   2 March 2026

The forward (alpha) and backward dynamic programs run in log domain
over the blank-interleaved label lattice. The batched entry points take
stacked log-probabilities, shaped (batch, frames, classes), together with
an ``ExpandedBatch`` of padded labels; the single item operations, at the
bottom of this file, wrap them.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
import logging
from typing import NamedTuple

import numpy as np
from numpy import arange, exp, isfinite

from pyctc2d.ctc2d_util import NEG_INF, combine_predecessors, combine_successors
from pyctc2d.errors import InfeasibleLabelError, ShapeMismatchError
from pyctc2d.tensors import Label, ProbSeq1D, expand_batch, min_width

logger = logging.getLogger(__name__)


class LossPolicy(NamedTuple):
    """How a batch loss treats items with no valid alignment."""

    permissive: bool = False  #: Clamp, rather than raise, on infeasible items.
    clamp: float = float("inf")  #: Per-item loss substituted in permissive mode.


class AlphaTable(NamedTuple):
    """Forward variables of one item."""

    values: np.ndarray  #: (states, frames) log-probabilities; ``-inf`` marks unreachable states.


def emission_table(log_probs, batch):
    """
    Gather each lattice state's class log-probability, for every frame.

    Args:
        log_probs(array): (B, T, C) log-probabilities.
        batch(ExpandedBatch): Padded expanded labels.

    Returns:
        array: (B, T, S) table; padding states hold ``-inf``.
    """

    B, T, _ = log_probs.shape
    S = batch.classes.shape[1]
    ix = np.broadcast_to(batch.classes[:, None, :], (B, T, S))
    emit = np.take_along_axis(log_probs, ix, axis=2)
    valid = arange(S)[None, :] < batch.lengths[:, None]
    return np.where(valid[:, None, :], emit, NEG_INF)


def final_states(table, lengths):
    """Log-sum of the last two lattice states (last symbol, or trailing blank) of each item."""

    rows = arange(len(lengths))
    last = table[rows, lengths - 1]
    prev = np.where(lengths >= 2, table[rows, np.maximum(lengths - 2, 0)], NEG_INF)
    return np.logaddexp(last, prev)


def final_mask(batch):
    """(B, S) boolean mask of the states a complete path may end in."""

    S = batch.classes.shape[1]
    s = arange(S)[None, :]
    lengths = batch.lengths[:, None]
    return (s == lengths - 1) | (s == lengths - 2)


def ctc_forward_batch(log_probs, batch):
    """
    Run the alpha recursion for a batch.

    Args:
        log_probs(array): (B, T, C) log-probabilities.
        batch(ExpandedBatch): Padded expanded labels.

    Returns:
        (array, array): Per-item ``log P(y|x)`` (``-inf`` when no
            alignment survives), and the (B, T, S) alpha table.
    """

    log_probs = np.asarray(log_probs, dtype=float)
    B, T, _ = log_probs.shape
    if T < 1:
        raise ShapeMismatchError("At least one frame is needed.")
    emit = emission_table(log_probs, batch)
    S = emit.shape[2]
    alpha = np.full((B, T, S), NEG_INF)
    alpha[:, 0, :2] = emit[:, 0, :2]
    for t in range(1, T):
        alpha[:, t] = combine_predecessors(alpha[:, t - 1], batch.skip) + emit[:, t]
    return final_states(alpha[:, -1], batch.lengths), alpha


def ctc_backward_batch(log_probs, batch):
    """
    Run the backward recursion for a batch.

    The backward variable at (t, s) excludes the emission at frame ``t``,
    so that ``alpha + beta`` is the log-probability of all paths through
    state ``s`` at frame ``t``.

    Returns:
        array: (B, T, S) backward table.
    """

    log_probs = np.asarray(log_probs, dtype=float)
    emit = emission_table(log_probs, batch)
    B, T, S = emit.shape
    bwd = np.full((B, T, S), NEG_INF)
    bwd[:, -1] = np.where(final_mask(batch), 0.0, NEG_INF)
    for t in range(T - 2, -1, -1):
        bwd[:, t] = combine_successors(bwd[:, t + 1] + emit[:, t + 1], batch.skip)
    return bwd


def state_posteriors(alpha, bwd, log_p):
    """Per-state occupancy probabilities; all zero for items with ``log_p = -inf``."""

    ok = isfinite(log_p)
    shift = np.where(ok, log_p, 0.0)[:, None, None]
    with np.errstate(invalid="ignore"):
        post = exp(alpha + bwd - shift)
    post[~ok] = 0.0
    return post


def scatter_states(post, classes, num_classes):
    """Sum per-state occupancies into per-class occupancies: (B, T, S) -> (B, T, C)."""

    onehot = classes[:, :, None] == arange(num_classes)[None, None, :]
    return np.einsum("bts,bsc->btc", post, onehot.astype(float))


def ctc_occupancy_batch(log_probs, batch):
    """
    Posterior class occupancy of every frame.

    Returns:
        (array, array): Per-item ``log P(y|x)``, and the (B, T, C)
            occupancy; each feasible item's frames sum to one.
    """

    log_probs = np.asarray(log_probs, dtype=float)
    log_p, alpha = ctc_forward_batch(log_probs, batch)
    bwd = ctc_backward_batch(log_probs, batch)
    post = state_posteriors(alpha, bwd, log_p)
    return log_p, scatter_states(post, batch.classes, log_probs.shape[2])


def resolve_losses(log_p, labels, width, policy, what="frames"):
    """
    Turn per-item log-probabilities into per-item losses, honoring ``policy``.

    Raises:
        InfeasibleLabelError: In strict mode, for the first infeasible item.
    """

    losses = -np.asarray(log_p, dtype=float)
    for b in np.flatnonzero(~isfinite(log_p)):
        need = min_width(labels[b])
        if need > width:
            reason = ""
        else:
            reason = f"label has zero probability (min_width={need}, {width} {what} available)"
        if not policy.permissive:
            raise InfeasibleLabelError(need, width, reason, unit=what)
        logger.warning(
            "Item %d (label %s) is infeasible (min_width=%d, width=%d); loss clamped to %s.",
            b,
            tuple(labels[b]),
            need,
            width,
            policy.clamp,
        )
        losses[b] = policy.clamp
    return losses


def ctc_loss_batch(log_probs, labels, policy=LossPolicy()):
    """
    Mean vanilla CTC loss of a batch.

    Args:
        log_probs(array): (B, T, C) log-probabilities.
        labels([Label]): Target labels.
        policy(LossPolicy): Infeasibility handling. (Default = strict)

    Returns:
        (float, array): Mean loss, and the per-item losses.
    """

    log_probs = np.asarray(log_probs, dtype=float)
    labels = [Label(y) for y in labels]
    if len(labels) != log_probs.shape[0]:
        raise ShapeMismatchError(f"{len(labels)} labels for a batch of {log_probs.shape[0]}.")
    for y in labels:
        y.check(log_probs.shape[2])
    log_p, _ = ctc_forward_batch(log_probs, expand_batch(labels))
    losses = resolve_losses(log_p, labels, log_probs.shape[1], policy)
    return float(losses.mean()), losses


def _single(x: ProbSeq1D, y):
    y = Label(y)
    y.check(x.num_classes)
    return y, x.log_values[None], expand_batch([y])


def ctc_forward(x: ProbSeq1D, y):
    """
    Forward probability of ``y`` given the per-frame distributions ``x``.

    Returns:
        (float, AlphaTable): ``log P(y|x)`` (``-inf`` if infeasible), and the alpha table.
    """

    y, log_probs, batch = _single(x, y)
    log_p, alpha = ctc_forward_batch(log_probs, batch)
    return float(log_p[0]), AlphaTable(alpha[0].T.copy())


def ctc_loss(x: ProbSeq1D, y, policy=LossPolicy()):
    """``-log P(y|x)``; infeasibility raises, or is clamped, according to ``policy``."""

    y, log_probs, batch = _single(x, y)
    log_p, _ = ctc_forward_batch(log_probs, batch)
    return float(resolve_losses(log_p, [y], x.width, policy)[0])


def ctc_occupancy(x: ProbSeq1D, y):
    """
    Posterior class occupancy, shaped (frames, classes).

    Raises:
        InfeasibleLabelError: If ``y`` has no valid alignment.
    """

    y, log_probs, batch = _single(x, y)
    log_p, occ = ctc_occupancy_batch(log_probs, batch)
    resolve_losses(log_p, [y], x.width, LossPolicy())
    return occ[0]


def ctc_grad(x: ProbSeq1D, y):
    """
    Gradient of ``ctc_loss()`` with respect to the per-frame logits.

    Returns:
        array: (frames, classes) gradient; each frame sums to zero.

    Raises:
        InfeasibleLabelError: If ``y`` has no valid alignment.
    """

    return x.values - ctc_occupancy(x, y)


def logit_grad_batch(log_probs, occ):
    """Softmax-composed loss gradient, ``p - occupancy``, for a batch."""

    return exp(log_probs) - occ


def label_total(x: ProbSeq1D, labels):
    """Sum of ``P(y|x)`` over the given labels; used to check normalization."""

    return float(sum(exp(ctc_forward(x, y)[0]) for y in labels))
