"""
Common interface to the training losses.

Original Date:   2 March 2026

This class is virtual and must be instantiated and over-ridden by each
loss used for training. It provides a consistent interface from the
readout's logits to per-item losses, logit gradients and decoded labels,
so that the trainer needn't care which loss it's driving.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
from abc import ABC, abstractmethod
from typing import List, NamedTuple, Optional

import numpy as np
from numpy import arange, exp, isfinite

from pyctc2d.ctc import LossPolicy, ctc_occupancy_batch, resolve_losses
from pyctc2d.ctc2d import ctc2d_log_grads_batch
from pyctc2d.ctc2d_util import log_softmax, log_sum
from pyctc2d.decoder import collapse, greedy_decode_2d
from pyctc2d.readout import ReadoutOutput
from pyctc2d.tensors import Label, ProbMap2D, TransitionMap, Variant, expand_batch


class LossResult(NamedTuple):
    """Per-item losses and the logit gradients of their sum."""

    losses: np.ndarray
    dclass: np.ndarray
    dtrans: np.ndarray
    dgamma: Optional[np.ndarray]


class Loss(ABC):
    """Abstract base class providing a consistent interface to the training losses."""

    name = ""

    def __init__(self, policy: LossPolicy = LossPolicy()):
        super().__init__()
        self.policy = policy

    @abstractmethod
    def evaluate(self, output: ReadoutOutput, labels) -> LossResult:
        """Per-item losses of a batch, and the gradients of their sum with respect to ``output``'s logits."""

    @abstractmethod
    def decode(self, output: ReadoutOutput) -> List[Label]:
        """Greedy decode of every item in a batch."""


class VanillaLoss(Loss):
    """
    Vanilla CTC over height-collapsed class distributions.

    The class map is softmaxed, collapsed over height (by mean, or max)
    and renormalized before the 1D loss is taken. All of it happens in
    log domain.
    """

    name = "vanilla"

    def __init__(self, collapse_mode="mean", policy: LossPolicy = LossPolicy()):
        super().__init__(policy)
        if collapse_mode not in ("mean", "max"):
            raise ValueError(f"Unknown height collapse mode: {collapse_mode}")
        self.collapse_mode = collapse_mode

    def _collapse(self, log_x):
        """
        Collapsed log-probabilities, and each row's share of every collapsed class.

        Returns:
            (array, array): (N, W, C) renormalized log-probabilities, and
                the (N, H, W, C) row shares.
        """

        H = log_x.shape[1]
        if self.collapse_mode == "mean":
            log_m = log_sum(log_x, axis=1) - np.log(H)
            share = exp(log_x - log_m[:, None] - np.log(H))
        else:
            winner = log_x.argmax(axis=1)
            log_m = np.take_along_axis(log_x, winner[:, None], axis=1)[:, 0]
            share = (arange(H)[None, :, None, None] == winner[:, None]).astype(float)
        return log_m - log_sum(log_m, axis=2)[..., None], share

    def evaluate(self, output, labels):
        labels = [Label(y) for y in labels]
        log_x = log_softmax(output.class_logits, axis=-1)
        W = log_x.shape[2]
        log_p, share = self._collapse(log_x)
        log_prob, occ = ctc_occupancy_batch(log_p, expand_batch(labels))
        losses = resolve_losses(log_prob, labels, W, self.policy, what="columns")
        # Gradient with respect to the collapsed log-probabilities, then back through each row's softmax.
        g = exp(log_p) - occ
        g[~isfinite(log_prob)] = 0.0
        routed = share * g[:, None]
        dclass = routed - exp(log_x) * routed.sum(axis=3, keepdims=True)
        return LossResult(losses, dclass, np.zeros(output.transition_logits.shape), None)

    def decode(self, output):
        log_p = self._collapse(log_softmax(output.class_logits, axis=-1))[0]
        return [collapse(row) for row in log_p.argmax(axis=2)]


class CTC2DLoss(Loss):
    """2D CTC over the class map and the readout's (simplified) path transitions."""

    name = "2d"

    def __init__(self, variant=Variant.SIMPLIFIED, train_gamma=False, policy: LossPolicy = LossPolicy()):
        super().__init__(policy)
        self.variant = Variant(variant)
        self.train_gamma = train_gamma

    def _distributions(self, output):
        """Class, transition and gamma log-probabilities."""

        log_x = log_softmax(output.class_logits, axis=-1)
        log_trans = log_softmax(output.transition_logits, axis=-1)
        N, H = log_x.shape[:2]
        if self.train_gamma and output.gamma_logits is not None:
            log_gamma = log_softmax(output.gamma_logits, axis=-1)
        else:
            log_gamma = np.full((N, H), -np.log(H))
        return log_x, log_trans, log_gamma

    def evaluate(self, output, labels):
        labels = [Label(y) for y in labels]
        log_x, log_trans, log_gamma = self._distributions(output)
        N, H, W, _ = log_x.shape
        if self.variant is Variant.FULL:
            log_trans = np.broadcast_to(log_trans[:, None], (N, H) + log_trans.shape[1:])
        log_p, dclass, dtrans, dgamma = ctc2d_log_grads_batch(
            log_x, log_trans, log_gamma, expand_batch(labels), self.variant
        )
        losses = resolve_losses(log_p, labels, W, self.policy, what="columns")
        if self.variant is Variant.FULL:
            # Shared logits across source rows: their gradients add up.
            dtrans = dtrans.sum(axis=1)
        return LossResult(losses, dclass, dtrans, dgamma if self.train_gamma else None)

    def decode(self, output):
        x, trans, gamma = (exp(a) for a in self._distributions(output))
        res = []
        for b in range(x.shape[0]):
            psi = TransitionMap(trans[b], gamma=gamma[b], strict=False)
            res.append(greedy_decode_2d(ProbMap2D(x[b], strict=False), psi).label)
        return res


def make_loss(kind, train_config) -> Loss:
    """Loss named ``kind`` ("vanilla" or "2d"), set up per ``train_config``."""

    policy = LossPolicy(train_config.permissive, train_config.clamp)
    if kind == "vanilla":
        return VanillaLoss(train_config.collapse, policy)
    if kind == "2d":
        return CTC2DLoss(train_config.variant, train_config.train_gamma, policy)
    raise ValueError(f"Unknown loss kind: {kind}")
