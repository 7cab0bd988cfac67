"""
Domain types shared by the vanilla and 2D CTC models.

Original Date:   2 March 2026

This module defines:

    - the alphabet (blank always at class index 0),
    - labels and their blank-interleaved expansion,
    - per-frame (1D) and per-position (2D) class distributions,
    - path transition maps, in both the full and the simplified form,

together with the validation that guards them. All of these types are
immutable after construction; their arrays are flagged read-only.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np
from numpy import abs as np_abs
from numpy import argwhere, full, isfinite, ones, zeros

from pyctc2d.ctc2d_util import renormalize, safe_log, softmax_normalize
from pyctc2d.errors import (
    AlphabetMismatchError,
    InvalidTensorError,
    ShapeMismatchError,
    ValidationReport,
)

BLANK = 0  # Class index of the blank token, everywhere.
gNormTol = 1.0e-6  # Absolute tolerance on every normalized row.
gDefaultSymbols = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
gBlankSymbol = "-"

OK = ValidationReport(True)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class Alphabet:
    """Ordered set of character symbols, with the blank prepended at class index 0."""

    def __init__(self, symbols: Sequence[str], blank: str = gBlankSymbol):
        """
        Args:
            symbols([str]): The real (non-blank) symbols, in class order.
            blank(str): Printable stand-in for the blank. (Default = "-")

        Raises:
            ValueError: If there are no real symbols, a symbol repeats, or
                the blank stand-in collides with a real symbol.
        """

        symbols = tuple(symbols)
        if not symbols:
            raise ValueError("An alphabet needs at least one real symbol, besides the blank.")
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"Alphabet symbols must be unique: {symbols}")
        if blank in symbols:
            raise ValueError(f"Blank stand-in '{blank}' collides with a real symbol.")
        self._symbols = (blank,) + symbols

    @classmethod
    def default(cls, size: int) -> "Alphabet":
        """The first ``size - 1`` symbols of ``A-Z0-9``, plus the blank."""

        if not 2 <= size <= len(gDefaultSymbols) + 1:
            raise ValueError(f"Default alphabet size must be in [2, {len(gDefaultSymbols) + 1}]; got {size}.")
        return cls(gDefaultSymbols[: size - 1])

    @property
    def symbols(self):
        """All symbols, blank first."""
        return self._symbols

    @property
    def size(self) -> int:
        """|Omega|, the blank included."""
        return len(self._symbols)

    def __len__(self):
        return self.size

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self._symbols == other._symbols

    def __hash__(self):
        return hash(self._symbols)

    def __repr__(self):
        return f"Alphabet({''.join(self._symbols[1:])!r}, blank={self._symbols[0]!r})"

    def encode(self, text: str) -> "Label":
        """Turn a string of real symbols into a ``Label``."""

        classes = []
        for pos, char in enumerate(text):
            try:
                ix = self._symbols.index(char, 1)
            except ValueError:
                raise AlphabetMismatchError(f"Symbol '{char}' at position {pos} of '{text}' is not in {self!r}.")
            classes.append(ix)
        return Label(classes)

    def decode(self, label) -> str:
        """Turn a ``Label`` (or any blank-free class sequence) back into a string."""

        self.check(label)
        return "".join(self._symbols[c] for c in label)

    def check(self, label):
        """Raise ``AlphabetMismatchError`` unless every class of ``label`` is a real symbol here."""

        for pos, c in enumerate(label):
            if not 1 <= c < self.size:
                raise AlphabetMismatchError(f"Class {c} at position {pos} is outside [1, {self.size - 1}].")


class Label(tuple):
    """Target class sequence; blank never appears, and the empty label is allowed."""

    def __new__(cls, classes=()):
        classes = tuple(int(c) for c in classes)
        for pos, c in enumerate(classes):
            if c <= BLANK:
                raise AlphabetMismatchError(f"Label class {c} at position {pos} is not a real symbol (must be >= 1).")
        return super().__new__(cls, classes)

    def check(self, num_classes: int):
        """Raise ``AlphabetMismatchError`` unless every class is below ``num_classes``."""

        for pos, c in enumerate(self):
            if c >= num_classes:
                raise AlphabetMismatchError(
                    f"Label class {c} at position {pos} doesn't exist in a {num_classes}-class distribution."
                )


class ExpandedLabel(tuple):
    """Blank-interleaved label, ``[blank, y1, blank, y2, ..., yL, blank]``."""

    def __new__(cls, classes=()):
        classes = tuple(int(c) for c in classes)
        if len(classes) % 2 != 1:
            raise ValueError(f"An expanded label has odd length; got {len(classes)}.")
        for pos, c in enumerate(classes):
            if (pos % 2 == 0) != (c == BLANK):
                raise ValueError(f"Expanded label breaks the blank interleave at position {pos}.")
        return super().__new__(cls, classes)


def expand_label(y) -> ExpandedLabel:
    """Interleave blanks before, between and after the symbols of ``y``."""

    res = [BLANK]
    for c in Label(y):
        res.extend((c, BLANK))
    return ExpandedLabel(res)


def strip_blanks(expanded) -> Label:
    """Inverse of ``expand_label()``."""

    return Label(c for c in expanded if c != BLANK)


def min_width(y) -> int:
    """
    Smallest frame count (or column count) able to carry ``y``.

    Each symbol needs a frame, and each adjacent repeat needs an extra
    blank frame between its two members.
    """

    y = tuple(y)
    return len(y) + sum(1 for a, b in zip(y, y[1:]) if a == b)


class ExpandedBatch(NamedTuple):
    """Expanded labels of a batch, right padded with blanks to a common length."""

    classes: np.ndarray  #: (batch, states) int array.
    skip: np.ndarray  #: (batch, states) bool array; True where ``s - 2 -> s`` is allowed.
    lengths: np.ndarray  #: (batch,) int array of true expanded lengths.


def expand_batch(labels) -> ExpandedBatch:
    """Expand and pad a sequence of labels for the batched dynamic programs."""

    expanded = [expand_label(y) for y in labels]
    lengths = np.array([len(e) for e in expanded], dtype=int)
    n_states = int(lengths.max()) if len(expanded) else 1
    classes = zeros((len(expanded), n_states), dtype=int)
    for b, e in enumerate(expanded):
        classes[b, : len(e)] = e
    skip = zeros(classes.shape, dtype=bool)
    skip[:, 2:] = (classes[:, 2:] != BLANK) & (classes[:, 2:] != classes[:, :-2])
    return ExpandedBatch(classes, skip, lengths)


def _check_distribution(values, axis_names, what="row", tol=gNormTol):
    """First violation of the probability-row invariants, along the last axis."""

    def where(ix):
        return "(" + ", ".join(f"{n}={i}" for n, i in zip(axis_names, ix)) + ")"

    bad = ~isfinite(values)
    if bad.any():
        ix = tuple(int(i) for i in argwhere(bad)[0])
        return ValidationReport(False, f"non-finite entry at {where(ix)}", "entry", ix, float(values[ix]))
    bad = (values < 0.0) | (values > 1.0)
    if bad.any():
        ix = tuple(int(i) for i in argwhere(bad)[0])
        val = float(values[ix])
        return ValidationReport(False, f"entry {val:.6g} outside [0, 1] at {where(ix)}", "entry", ix, val)
    if values.shape[-1] == 0:
        return OK
    sums = values.sum(axis=-1)
    bad = np_abs(sums - 1.0) > tol
    if bad.any():
        ix = tuple(int(i) for i in argwhere(bad)[0])
        val = float(sums[ix])
        return ValidationReport(False, f"{what} sum {val:.6g} at {where(ix)}", axis_names[-1], ix, val)
    return OK


def _check_gamma(gamma):
    if gamma.ndim != 1:
        return ValidationReport(False, f"gamma must be a vector; got shape {gamma.shape}", "shape")
    report = _check_distribution(gamma[None, :], ("row", "h"), "gamma")
    if not report.ok:
        if report.axis == "h":
            val = report.observed
            return ValidationReport(False, f"gamma sum {val:.6g}", "gamma", (), val)
        return report._replace(index=report.index[1:])
    return OK


class ProbSeq1D:
    """Per-frame class distributions, shaped (frames, classes), with a log-domain view."""

    def __init__(self, values, strict=True):
        """
        Args:
            values(array): (T, |Omega|) probabilities.
            strict(bool): Reject rows failing normalization. When False,
                the rows are explicitly renormalized instead. (Default = True)

        Raises:
            ShapeMismatchError: If ``values`` isn't two dimensional.
            InvalidTensorError: If ``strict`` and some invariant is violated.
        """

        values = np.array(values, dtype=float)
        if values.ndim != 2 or values.shape[1] < 2:
            raise ShapeMismatchError(f"ProbSeq1D needs a (frames, classes >= 2) grid; got shape {values.shape}.")
        if not strict:
            values = renormalize(values)
        report = _check_distribution(values, ("t", "c"))
        if not report.ok:
            raise InvalidTensorError(report)
        self._values = _frozen(values)
        self._log_values = _frozen(safe_log(values))

    @classmethod
    def from_logits(cls, logits):
        """Softmax the class axis of a (T, |Omega|) grid of raw scores."""

        return cls(softmax_normalize(logits, axis=-1))

    @property
    def values(self):
        return self._values

    @property
    def log_values(self):
        return self._log_values

    @property
    def width(self) -> int:
        """T, the frame count."""
        return self._values.shape[0]

    @property
    def num_classes(self) -> int:
        return self._values.shape[1]

    def validate(self) -> ValidationReport:
        return _check_distribution(self._values, ("t", "c"))


class ProbMap2D:
    """Per-position class distributions, shaped (height, width, classes), with a log-domain view."""

    def __init__(self, values, strict=True):
        """
        Args:
            values(array): (H, W, |Omega|) probabilities.
            strict(bool): Reject positions failing normalization. When
                False, they're explicitly renormalized. (Default = True)

        Raises:
            ShapeMismatchError: If ``values`` isn't three dimensional.
            InvalidTensorError: If ``strict`` and some invariant is violated.
        """

        values = np.array(values, dtype=float)
        if values.ndim != 3 or values.shape[2] < 2:
            raise ShapeMismatchError(
                f"ProbMap2D needs a (height, width, classes >= 2) grid; got shape {values.shape}."
            )
        if not strict:
            values = renormalize(values)
        report = _check_distribution(values, ("h", "w", "c"))
        if not report.ok:
            raise InvalidTensorError(report)
        self._values = _frozen(values)
        self._log_values = _frozen(safe_log(values))

    @classmethod
    def from_logits(cls, logits):
        """Softmax the class axis of a (H, W, |Omega|) grid of raw scores."""

        return cls(softmax_normalize(logits, axis=-1))

    @property
    def values(self):
        return self._values

    @property
    def log_values(self):
        return self._log_values

    @property
    def height(self) -> int:
        return self._values.shape[0]

    @property
    def width(self) -> int:
        return self._values.shape[1]

    @property
    def num_classes(self) -> int:
        return self._values.shape[2]

    def validate(self) -> ValidationReport:
        return _check_distribution(self._values, ("h", "w", "c"))


class Variant(Enum):
    """Path transition map formulation."""

    FULL = "full"  #: Psi[h, w, h'], dependent on the source height.
    SIMPLIFIED = "simplified"  #: Psi_hat[w, h'], the same for every source height.


class TransitionMap:
    """
    Path transition probabilities, plus the initial height distribution.

    Full maps are shaped (H, W - 1, H) and indexed ``[source, column,
    destination]``; simplified maps are shaped (W - 1, H) and indexed
    ``[column, destination]``. Column ``w`` governs the move from map
    column ``w`` to map column ``w + 1``.
    """

    def __init__(self, values, gamma=None, variant=Variant.SIMPLIFIED, strict=True):
        """
        Args:
            values(array): Transition probabilities, shaped as described above.
            gamma(array): Initial height distribution (length H). (Default = uniform)
            variant(Variant): Map formulation. (Default = Variant.SIMPLIFIED)
            strict(bool): Reject rows failing normalization. When False,
                rows (and gamma) are explicitly renormalized. (Default = True)

        Raises:
            ShapeMismatchError: If the shapes don't fit ``variant``.
            InvalidTensorError: If ``strict`` and some invariant is violated.
        """

        variant = Variant(variant)
        values = np.array(values, dtype=float)
        if variant is Variant.FULL:
            if values.ndim != 3 or values.shape[0] != values.shape[2]:
                raise ShapeMismatchError(f"A full transition map is (H, W-1, H); got shape {values.shape}.")
            names = ("h", "w", "j")
        else:
            if values.ndim != 2:
                raise ShapeMismatchError(f"A simplified transition map is (W-1, H); got shape {values.shape}.")
            names = ("w", "h")
        height = values.shape[-1]
        if height < 1:
            raise ShapeMismatchError("A transition map needs at least one height row.")
        gamma = ones(height) / height if gamma is None else np.array(gamma, dtype=float)
        if gamma.shape != (height,):
            raise ShapeMismatchError(f"gamma must have length {height}; got shape {gamma.shape}.")
        if not strict:
            values = renormalize(values)
            gamma = renormalize(gamma)
        report = _check_distribution(values, names)
        if report.ok:
            report = _check_gamma(gamma)
        if not report.ok:
            raise InvalidTensorError(report)
        self._variant = variant
        self._values = _frozen(values)
        self._log_values = _frozen(safe_log(values))
        self._gamma = _frozen(gamma)
        self._log_gamma = _frozen(safe_log(gamma))

    @classmethod
    def uniform(cls, height, width, variant=Variant.SIMPLIFIED):
        """Uniform transitions (and gamma) serving an (H, W) map."""

        variant = Variant(variant)
        if variant is Variant.FULL:
            values = full((height, width - 1, height), 1.0 / height)
        else:
            values = full((width - 1, height), 1.0 / height)
        return cls(values, variant=variant)

    @classmethod
    def from_logits(cls, logits, gamma_logits=None, variant=Variant.SIMPLIFIED):
        """Softmax transition (and, optionally, gamma) logits over their destination height axis."""

        gamma = None if gamma_logits is None else softmax_normalize(gamma_logits)
        return cls(softmax_normalize(logits, axis=-1), gamma=gamma, variant=variant)

    @property
    def variant(self) -> Variant:
        return self._variant

    @property
    def values(self):
        return self._values

    @property
    def log_values(self):
        return self._log_values

    @property
    def gamma(self):
        return self._gamma

    @property
    def log_gamma(self):
        return self._log_gamma

    @property
    def height(self) -> int:
        return self._values.shape[-1]

    @property
    def width(self) -> int:
        """Width (column count) of the probability map served."""
        return self._values.shape[-2] + 1

    def full_values(self):
        """(H, W - 1, H) view of the transitions, broadcasting a simplified map over source heights."""

        if self._variant is Variant.FULL:
            return self._values
        return np.broadcast_to(self._values[None, :, :], (self.height,) + self._values.shape)

    def validate(self) -> ValidationReport:
        names = ("h", "w", "j") if self._variant is Variant.FULL else ("w", "h")
        report = _check_distribution(self._values, names)
        return report if not report.ok else _check_gamma(self._gamma)


def validate(item, axis_names=None, tol=gNormTol) -> ValidationReport:
    """
    Check every invariant of a distribution or transition map.

    Args:
        item(ProbSeq1D, ProbMap2D, TransitionMap or array): The thing to
            check. Raw 1D arrays are checked as a gamma, 2D arrays as
            ``ProbSeq1D`` values and 3D arrays as ``ProbMap2D`` values.
        axis_names([str]): Axis names used in the report, for raw
            arrays. (Default = by rank, as above)
        tol(float): Row sum tolerance, for raw arrays. (Default = gNormTol)

    Returns:
        ValidationReport: ``OK``, or the first violation found.
    """

    if isinstance(item, (ProbSeq1D, ProbMap2D, TransitionMap)):
        return item.validate()
    values = np.asarray(item, dtype=float)
    if axis_names is None:
        axis_names = {1: ("h",), 2: ("t", "c"), 3: ("h", "w", "c")}.get(values.ndim)
    if axis_names is None or len(axis_names) != values.ndim:
        return ValidationReport(False, f"can't validate a rank {values.ndim} array", "shape")
    return _check_distribution(values, tuple(axis_names), tol=tol)


def check_consistent(x: ProbMap2D, psi: TransitionMap):
    """Raise ``ShapeMismatchError`` unless ``psi`` serves a map shaped like ``x``."""

    if psi.height != x.height or psi.width != x.width:
        raise ShapeMismatchError(
            f"Transition map serves a {psi.height}x{psi.width} map, but the probability map is {x.height}x{x.width}."
        )


def collapse_height(x: ProbMap2D, mode="mean") -> ProbSeq1D:
    """
    Reduce a 2D map to per-column distributions, as vanilla CTC recognizers do.

    Args:
        x(ProbMap2D): The map.
        mode(str): "mean" averages the linear probabilities over height;
            "max" keeps the per-class maximum. Either is renormalized.
            (Default = "mean")
    """

    if mode == "mean":
        collapsed = x.values.mean(axis=0)
    elif mode == "max":
        collapsed = x.values.max(axis=0)
    else:
        raise ValueError(f"Unknown height collapse mode: {mode}")
    return ProbSeq1D(renormalize(collapsed))
