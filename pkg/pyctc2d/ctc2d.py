"""
Behavioral model of the two dimensional CTC loss.

Original Date:   2 March 2026

A 2D path visits one height row per map column, moving strictly left
to right. Its probability is the product of the initial height
distribution (gamma), the class probabilities it emits and the path
transition probabilities between consecutive columns. The loss sums
the probabilities of all paths whose collapsed class sequence is the
target label.

Two formulations of the path transitions are supported:

    - full: ``psi[j, w, h]``, the probability of moving from row ``j`` of
      column ``w`` to row ``h`` of column ``w + 1``;
    - simplified: ``psi_hat[w, h]``, the same for every source row.

The full variant runs the beta recursion over (state, height, column)
explicitly. The simplified variant needs less: since the next row
doesn't depend on the current one, summing the recursion over heights
leaves a vanilla recursion over the height-marginal emissions

    E[w, c] = sum_h pi[w, h] * x[h, w, c],  pi[0] = gamma, pi[w] = psi_hat[w - 1],

and the beta table is recovered from the vanilla alpha table afterwards,
when it's asked for.

Batched arrays hold linear probabilities (the recursions themselves run on
their logs; ``ctc2d_log_grads_batch()`` takes the logs directly):

    x      (B, H, W, C)
    trans  (B, W - 1, H)      simplified
           (B, H, W - 1, H)   full
    gamma  (B, H)

Internal beta / backward tables are laid out (B, W, S, H).

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
from typing import NamedTuple, Optional

import numpy as np
from numpy import arange, concatenate, einsum, exp, isfinite

from pyctc2d.ctc import (
    LossPolicy,
    ctc_backward_batch,
    ctc_forward_batch,
    ctc_occupancy_batch,
    final_mask,
    final_states,
    resolve_losses,
    scatter_states,
)
from pyctc2d.ctc2d_util import NEG_INF, combine_predecessors, combine_successors, log_sum, safe_log
from pyctc2d.errors import ShapeMismatchError
from pyctc2d.tensors import (
    Label,
    ProbMap2D,
    TransitionMap,
    Variant,
    check_consistent,
    expand_batch,
)


class BetaTable(NamedTuple):
    """Forward variables of one 2D item."""

    values: np.ndarray  #: (states, heights, columns) log-probabilities.


class Posteriors2D(NamedTuple):
    """Occupancy statistics of a batch, under the posterior over valid paths."""

    log_p: np.ndarray  #: (B,) ``log P(y|x)``.
    class_occ: np.ndarray  #: (B, H, W, C) expected class emissions per position.
    height_occ: np.ndarray  #: (B, W, H) probability that the path visits each row.
    transition_occ: np.ndarray  #: (B, W - 1, H) simplified; (B, H, W - 1, H) full.


class Grad2D(NamedTuple):
    """Loss gradients with respect to the logits feeding a 2D loss."""

    class_logits: np.ndarray  #: Same shape as the class map.
    transition_logits: np.ndarray  #: Same shape as the transition map.
    gamma_logits: Optional[np.ndarray] = None  #: Present only when gamma is trained.


def height_priors(gamma, trans):
    """
    Per-column row weights of the simplified variant: ``pi[0] = gamma``, ``pi[w] = psi_hat[w - 1]``.

    Applies to log-probabilities just the same.

    Returns:
        array: (B, W, H).
    """

    return concatenate((gamma[:, None, :], trans), axis=1)


def height_marginals(gamma, trans, variant=Variant.SIMPLIFIED):
    """
    Prior probability of the path visiting each row of each column.

    For the simplified variant these are just the row weights; the full
    variant chains them, ``m[w] = m[w - 1] @ psi[:, w - 1, :]``.

    Returns:
        array: (B, W, H).
    """

    if Variant(variant) is Variant.SIMPLIFIED:
        return height_priors(gamma, trans)
    res = [gamma]
    for w in range(trans.shape[2]):
        res.append(einsum("bj,bjh->bh", res[-1], trans[:, :, w, :]))
    return np.stack(res, axis=1)


def marginal_emissions(x, pi):
    """
    Height-marginal class probabilities, ``E[b, w, c] = sum_h pi[b, w, h] * x[b, h, w, c]``.

    Args:
        x(array): (B, H, W, C) class probabilities.
        pi(array): (B, W, H) row weights.

    Returns:
        array: (B, W, C); each column sums to one.
    """

    return einsum("bwh,bhwc->bwc", pi, x)


def log_marginal_emissions(log_x, log_pi):
    """Log-domain ``marginal_emissions()``, reduced over height with ``logsumexp``."""

    return log_sum(log_pi.transpose(0, 2, 1)[..., None] + log_x, axis=1)


def emission_table_2d(log_x, batch):
    """
    Gather each lattice state's class log-probability, at every position.

    Returns:
        array: (B, W, S, H) table; padding states hold ``-inf``.
    """

    B, H, W, _ = log_x.shape
    S = batch.classes.shape[1]
    lx = log_x.transpose(0, 2, 1, 3)
    ix = np.broadcast_to(batch.classes[:, None, None, :], (B, W, H, S))
    emit = np.take_along_axis(lx, ix, axis=3).transpose(0, 1, 3, 2)
    valid = arange(S)[None, :] < batch.lengths[:, None]
    return np.where(valid[:, None, :, None], emit, NEG_INF)


def _check_batch(x, trans, gamma, batch, variant):
    B, H, W, _ = x.shape
    if variant is Variant.FULL:
        expected = (B, H, W - 1, H)
    else:
        expected = (B, W - 1, H)
    if trans.shape != expected:
        raise ShapeMismatchError(f"Expected {variant.value} transitions shaped {expected}; got {trans.shape}.")
    if gamma.shape != (B, H):
        raise ShapeMismatchError(f"Expected gamma shaped {(B, H)}; got {gamma.shape}.")
    if batch.classes.shape[0] != B:
        raise ShapeMismatchError(f"{batch.classes.shape[0]} labels for a batch of {B}.")
    if W < 1:
        raise ShapeMismatchError("At least one column is needed.")


def _as_logs(x, trans, gamma):
    return tuple(safe_log(np.asarray(a, dtype=float)) for a in (x, trans, gamma))


def _simplified_forward(log_x, log_trans, log_gamma, batch):
    log_pi = height_priors(log_gamma, log_trans)
    log_e = log_marginal_emissions(log_x, log_pi)
    log_p, alpha = ctc_forward_batch(log_e, batch)
    return log_p, alpha, log_pi, log_e


def _beta_from_alpha(alpha, log_pi, log_x, batch):
    """Recover the (B, W, S, H) beta table of the simplified variant from its marginal alpha table."""

    emit = emission_table_2d(log_x, batch)
    log_pi = log_pi[:, :, None, :]
    S = emit.shape[2]
    beta = np.empty(emit.shape)
    first = (arange(S) < 2)[None, :, None]
    beta[:, 0] = np.where(first, log_pi[:, 0] + emit[:, 0], NEG_INF)
    if alpha.shape[1] > 1:
        prev = combine_predecessors(alpha[:, :-1].transpose(0, 2, 1), batch.skip).transpose(0, 2, 1)
        beta[:, 1:] = prev[..., None] + log_pi[:, 1:] + emit[:, 1:]
    return beta


def _full_forward(log_x, log_psi, log_gamma, batch):
    emit = emission_table_2d(log_x, batch)
    B, W, S, H = emit.shape
    beta = np.full((B, W, S, H), NEG_INF)
    first = (arange(S) < 2)[None, :, None]
    beta[:, 0] = np.where(first, log_gamma[:, None, :] + emit[:, 0], NEG_INF)
    for w in range(1, W):
        prev = combine_predecessors(beta[:, w - 1], batch.skip)
        moved = log_sum(prev[:, :, :, None] + log_psi[:, None, :, w - 1, :], axis=2)
        beta[:, w] = moved + emit[:, w]
    log_p = final_states(log_sum(beta[:, -1], axis=2), batch.lengths)
    return log_p, beta, emit


def ctc2d_forward_batch(x, trans, gamma, batch, variant=Variant.SIMPLIFIED):
    """
    Run the beta recursion for a batch.

    Returns:
        (array, array): Per-item ``log P(y|x)`` (``-inf`` when no path
            survives), and the (B, W, S, H) beta table.
    """

    variant = Variant(variant)
    log_x, log_trans, log_gamma = _as_logs(x, trans, gamma)
    _check_batch(log_x, log_trans, log_gamma, batch, variant)
    if variant is Variant.FULL:
        log_p, beta, _ = _full_forward(log_x, log_trans, log_gamma, batch)
        return log_p, beta
    log_p, alpha, log_pi, _ = _simplified_forward(log_x, log_trans, log_gamma, batch)
    return log_p, _beta_from_alpha(alpha, log_pi, log_x, batch)


def _full_backward(emit, log_psi, batch):
    B, W, S, H = emit.shape
    bwd = np.full((B, W, S, H), NEG_INF)
    bwd[:, -1] = np.where(final_mask(batch)[:, :, None], 0.0, NEG_INF)
    for w in range(W - 2, -1, -1):
        ahead = bwd[:, w + 1] + emit[:, w + 1]
        moved = log_sum(log_psi[:, None, :, w, :] + ahead[:, :, None, :], axis=3)
        bwd[:, w] = combine_successors(moved, batch.skip)
    return bwd


def ctc2d_backward_batch(x, trans, gamma, batch, variant=Variant.SIMPLIFIED):
    """
    Backward table, shaped (B, W, S, H), excluding the emission at each position.

    In the simplified variant the table doesn't depend on the row, and
    is the marginal backward table broadcast over heights.
    """

    variant = Variant(variant)
    log_x, log_trans, log_gamma = _as_logs(x, trans, gamma)
    _check_batch(log_x, log_trans, log_gamma, batch, variant)
    H = log_x.shape[1]
    if variant is Variant.FULL:
        return _full_backward(emission_table_2d(log_x, batch), log_trans, batch)
    log_e = log_marginal_emissions(log_x, height_priors(log_gamma, log_trans))
    bwd = ctc_backward_batch(log_e, batch)
    return np.repeat(bwd[..., None], H, axis=3)


def _simplified_posteriors(log_x, log_trans, log_gamma, batch):
    log_pi = height_priors(log_gamma, log_trans)
    log_e = log_marginal_emissions(log_x, log_pi)
    log_p, occ1d = ctc_occupancy_batch(log_e, batch)
    # Share of each row in a column's marginal emission.
    with np.errstate(invalid="ignore"):
        resp = exp(log_pi.transpose(0, 2, 1)[..., None] + log_x - log_e[:, None])
    resp = np.where(isfinite(log_e)[:, None], resp, 0.0)
    class_occ = resp * occ1d[:, None]
    height_occ = class_occ.sum(axis=3).transpose(0, 2, 1)
    return Posteriors2D(log_p, class_occ, height_occ, height_occ[:, 1:])


def _full_posteriors(log_x, log_psi, log_gamma, batch):
    log_p, beta, emit = _full_forward(log_x, log_psi, log_gamma, batch)
    bwd = _full_backward(emit, log_psi, batch)
    B, W, S, H = beta.shape
    C = log_x.shape[3]
    ok = isfinite(log_p)
    shift = np.where(ok, log_p, 0.0)
    with np.errstate(invalid="ignore"):
        post = exp(beta + bwd - shift[:, None, None, None])
    post[~ok] = 0.0
    # (B, W, S, H) -> (B, W*H, S) for the class scatter, then back.
    flat = post.transpose(0, 1, 3, 2).reshape(B, W * H, S)
    class_occ = scatter_states(flat, batch.classes, C).reshape(B, W, H, C).transpose(0, 2, 1, 3)
    height_occ = post.sum(axis=2)
    trans_occ = np.zeros((B, H, W - 1, H))
    for w in range(W - 1):
        prev = combine_predecessors(beta[:, w], batch.skip)
        ahead = bwd[:, w + 1] + emit[:, w + 1]
        joint = log_sum(prev[:, :, :, None] + ahead[:, :, None, :], axis=1) + log_psi[:, :, w, :]
        with np.errstate(invalid="ignore"):
            trans_occ[:, :, w, :] = exp(joint - shift[:, None, None])
    trans_occ[~ok] = 0.0
    return Posteriors2D(log_p, class_occ, height_occ, trans_occ)


def _posteriors(log_x, log_trans, log_gamma, batch, variant):
    _check_batch(log_x, log_trans, log_gamma, batch, variant)
    if variant is Variant.FULL:
        return _full_posteriors(log_x, log_trans, log_gamma, batch)
    return _simplified_posteriors(log_x, log_trans, log_gamma, batch)


def ctc2d_posteriors_batch(x, trans, gamma, batch, variant=Variant.SIMPLIFIED):
    """
    Class, height and transition occupancies of a batch.

    Items without a valid path get all-zero occupancies, and ``log_p = -inf``.
    """

    return _posteriors(*_as_logs(x, trans, gamma), batch, Variant(variant))


def ctc2d_log_grads_batch(log_x, log_trans, log_gamma, batch, variant=Variant.SIMPLIFIED):
    """
    Per-item loss gradients with respect to the class, transition and gamma logits.

    Takes log-probabilities, as produced by ``log_softmax()`` of the
    logits along their last axis, so arbitrarily confident predictions
    never underflow to zero probability.

    Returns:
        (array, array, array, array): ``log_p``, and the class,
            transition and gamma logit gradients.
    """

    variant = Variant(variant)
    log_x, log_trans, log_gamma = (np.asarray(a, dtype=float) for a in (log_x, log_trans, log_gamma))
    post = _posteriors(log_x, log_trans, log_gamma, batch, variant)
    q = post.height_occ
    dclass = exp(log_x) * q.transpose(0, 2, 1)[..., None] - post.class_occ
    if variant is Variant.FULL:
        dtrans = exp(log_trans) * q[:, :-1, :].transpose(0, 2, 1)[..., None] - post.transition_occ
    else:
        dtrans = exp(log_trans) - post.transition_occ
    dgamma = exp(log_gamma) - q[:, 0, :]
    ok = isfinite(post.log_p)
    for g in (dclass, dtrans, dgamma):
        g[~ok] = 0.0
    return post.log_p, dclass, dtrans, dgamma


def ctc2d_grads_batch(x, trans, gamma, batch, variant=Variant.SIMPLIFIED):
    """``ctc2d_log_grads_batch()`` of linear probabilities."""

    return ctc2d_log_grads_batch(*_as_logs(x, trans, gamma), batch, variant)


def ctc2d_loss_batch(x, trans, gamma, labels, variant=Variant.SIMPLIFIED, policy=LossPolicy()):
    """
    Mean 2D CTC loss of a batch.

    Args:
        x(array): (B, H, W, C) class probabilities.
        trans(array): Path transitions, shaped per ``variant``.
        gamma(array): (B, H) initial row distributions.
        labels([Label]): Target labels.
        variant(Variant): Transition formulation. (Default = Variant.SIMPLIFIED)
        policy(LossPolicy): Infeasibility handling. (Default = strict)

    Returns:
        (float, array): Mean loss, and the per-item losses.
    """

    variant = Variant(variant)
    log_x, log_trans, log_gamma = _as_logs(x, trans, gamma)
    labels = [Label(y) for y in labels]
    for y in labels:
        y.check(log_x.shape[3])
    batch = expand_batch(labels)
    _check_batch(log_x, log_trans, log_gamma, batch, variant)
    if variant is Variant.FULL:
        log_p = _full_forward(log_x, log_trans, log_gamma, batch)[0]
    else:
        log_p = _simplified_forward(log_x, log_trans, log_gamma, batch)[0]
    losses = resolve_losses(log_p, labels, log_x.shape[2], policy, what="columns")
    return float(losses.mean()), losses


def _single(x: ProbMap2D, psi: TransitionMap, y):
    check_consistent(x, psi)
    y = Label(y)
    y.check(x.num_classes)
    return y, (x.values[None], psi.values[None], psi.gamma[None]), expand_batch([y])


def ctc2d_forward(x: ProbMap2D, psi: TransitionMap, y):
    """
    Forward probability of ``y`` given the class map ``x`` and path transitions ``psi``.

    Returns:
        (float, BetaTable): ``log P(y|x)`` (``-inf`` if infeasible), and the beta table.
    """

    y, arrays, batch = _single(x, psi, y)
    log_p, beta = ctc2d_forward_batch(*arrays, batch, psi.variant)
    return float(log_p[0]), BetaTable(beta[0].transpose(1, 2, 0).copy())


def ctc2d_loss(x: ProbMap2D, psi: TransitionMap, y, policy=LossPolicy()):
    """``-log P(y|x)``; infeasibility raises, or is clamped, according to ``policy``."""

    y, arrays, _ = _single(x, psi, y)
    return ctc2d_loss_batch(*arrays, [y], psi.variant, policy)[0]


def ctc2d_posteriors(x: ProbMap2D, psi: TransitionMap, y) -> Posteriors2D:
    """Occupancies of one item, with the batch axis dropped."""

    y, arrays, batch = _single(x, psi, y)
    post = ctc2d_posteriors_batch(*arrays, batch, psi.variant)
    return Posteriors2D(float(post.log_p[0]), *(a[0] for a in post[1:]))


def ctc2d_grad(x: ProbMap2D, psi: TransitionMap, y, train_gamma=False) -> Grad2D:
    """
    Gradients of ``ctc2d_loss()`` with respect to the class, transition and (optionally) gamma logits.

    Args:
        x(ProbMap2D): Class map.
        psi(TransitionMap): Path transitions (either variant) and gamma.
        y(Label): Target.
        train_gamma(bool): Also return the gamma logit gradient. (Default = False)

    Raises:
        InfeasibleLabelError: If ``y`` has no valid path.
    """

    y, arrays, batch = _single(x, psi, y)
    log_p, dclass, dtrans, dgamma = ctc2d_grads_batch(*arrays, batch, psi.variant)
    resolve_losses(log_p, [y], x.width, LossPolicy(), what="columns")
    return Grad2D(dclass[0], dtrans[0], dgamma[0] if train_gamma else None)


def expand_simplified(psi_hat: TransitionMap) -> TransitionMap:
    """Full transition map with every source row equal to the simplified map's column."""

    if psi_hat.variant is Variant.FULL:
        return psi_hat
    return TransitionMap(np.array(psi_hat.full_values()), gamma=psi_hat.gamma, variant=Variant.FULL)
