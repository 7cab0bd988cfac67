"""
Small trainable readout, mapping synthetic features to CTC predictions.

Original Date:   2 March 2026

The readout mixes each position's features with a fixed local stencil
(raw features, a 3-tap vertical average, a 5-tap horizontal average
and each column's maximum over height), then applies two per-position
linear heads:

    - the class head, producing (H, W, C) class logits;
    - the transition head, producing one score per position; the scores
      of columns 1 .. W-1 are the transition logits into each row, and
      those of column 0, the gamma logits (when gamma is trained).

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
from typing import NamedTuple, Optional

import numpy as np
from numpy import concatenate, einsum, ones, zeros
from numpy.random import default_rng
from scipy.ndimage import correlate1d

gVerticalTaps = 3
gHorizontalTaps = 5
gStencilGroups = 4  # raw, vertical, horizontal, column max


class ReadoutOutput(NamedTuple):
    """Logits produced for a batch, plus what ``backward()`` needs."""

    class_logits: np.ndarray  #: (N, H, W, C)
    transition_logits: np.ndarray  #: (N, W - 1, H)
    gamma_logits: Optional[np.ndarray]  #: (N, H), or None when gamma isn't trained.
    mixed: np.ndarray  #: (N, H, W, M) mixed features.


class ReadoutGrads(NamedTuple):
    """Loss gradients with respect to the readout parameters."""

    w_cls: np.ndarray
    b_cls: np.ndarray
    w_tr: np.ndarray


def mix_features(features):
    """
    Apply the fixed spatial mixing stencil.

    Args:
        features(array): (N, H, W, F) features.

    Returns:
        array: (N, H, W, 4F) raw, vertically averaged, horizontally averaged
            and column maximum features.
    """

    features = np.asarray(features, dtype=float)
    vertical = correlate1d(features, ones(gVerticalTaps) / gVerticalTaps, axis=1, mode="constant")
    horizontal = correlate1d(features, ones(gHorizontalTaps) / gHorizontalTaps, axis=2, mode="constant")
    column = np.broadcast_to(features.max(axis=1, keepdims=True), features.shape)
    return concatenate((features, vertical, horizontal, column), axis=3)


class ReadoutModel:
    """Per-position linear class and transition heads over mixed features."""

    def __init__(self, w_cls, b_cls, w_tr, train_gamma=False):
        """
        Args:
            w_cls(array): (M, C) class head weights.
            b_cls(array): (C,) class head biases.
            w_tr(array): (M,) transition head weights.
            train_gamma(bool): Produce gamma logits from column 0. (Default = False)
        """

        self.w_cls = np.array(w_cls, dtype=float)
        self.b_cls = np.array(b_cls, dtype=float)
        self.w_tr = np.array(w_tr, dtype=float)
        self.train_gamma = train_gamma
        if self.w_cls.shape[0] != self.w_tr.shape[0] or self.w_cls.shape[1] != self.b_cls.shape[0]:
            raise ValueError(
                f"Inconsistent readout parameter shapes: {self.w_cls.shape}, {self.b_cls.shape}, {self.w_tr.shape}."
            )

    @classmethod
    def init(cls, num_features, num_classes, seed, scale=0.01, train_gamma=False):
        """Small random weights and zero biases."""

        rng = default_rng(seed)
        M = gStencilGroups * num_features
        return cls(
            scale * rng.standard_normal((M, num_classes)),
            zeros(num_classes),
            scale * rng.standard_normal(M),
            train_gamma,
        )

    @classmethod
    def identity(cls, num_symbols, noise_channels=0, gain=20.0, train_gamma=False):
        """
        Hand-set readout for synthetic features.

        Each symbol channel drives its class logit, the blank logit sits
        at half the gain, and the text line channel drives the transitions.
        """

        F = num_symbols + 1 + noise_channels
        M = gStencilGroups * F
        w_cls = zeros((M, num_symbols + 1))
        for k in range(num_symbols):
            w_cls[k, k + 1] = gain
        b_cls = zeros(num_symbols + 1)
        b_cls[0] = gain / 2.0
        w_tr = zeros(M)
        w_tr[num_symbols] = gain
        return cls(w_cls, b_cls, w_tr, train_gamma)

    @property
    def num_classes(self) -> int:
        return self.b_cls.shape[0]

    @property
    def num_parameters(self) -> int:
        return self.w_cls.size + self.b_cls.size + self.w_tr.size

    def params(self) -> ReadoutGrads:
        """Current parameters, in gradient layout."""
        return ReadoutGrads(self.w_cls, self.b_cls, self.w_tr)

    def copy(self) -> "ReadoutModel":
        return ReadoutModel(self.w_cls.copy(), self.b_cls.copy(), self.w_tr.copy(), self.train_gamma)

    def forward(self, features) -> ReadoutOutput:
        """Class, transition and (optionally) gamma logits of an (N, H, W, F) batch."""

        mixed = mix_features(features)
        class_logits = mixed @ self.w_cls + self.b_cls
        scores = mixed @ self.w_tr
        transition_logits = scores[:, :, 1:].transpose(0, 2, 1)
        gamma_logits = scores[:, :, 0] if self.train_gamma else None
        return ReadoutOutput(class_logits, transition_logits, gamma_logits, mixed)

    def backward(self, output: ReadoutOutput, dclass, dtrans, dgamma=None) -> ReadoutGrads:
        """Chain logit gradients back to the parameters."""

        mixed = output.mixed
        dscores = zeros(mixed.shape[:3])
        dscores[:, :, 1:] = dtrans.transpose(0, 2, 1)
        if dgamma is not None:
            dscores[:, :, 0] = dgamma
        return ReadoutGrads(
            einsum("nhwm,nhwc->mc", mixed, dclass),
            dclass.sum(axis=(0, 1, 2)),
            einsum("nhwm,nhw->m", mixed, dscores),
        )

    def step(self, delta: ReadoutGrads):
        """Add ``delta`` to the parameters."""

        self.w_cls += delta.w_cls
        self.b_cls += delta.b_cls
        self.w_tr += delta.w_tr
