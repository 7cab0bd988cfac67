"""
Exception hierarchy for the *pyctc2d* package.

Original Date:   2 March 2026

Every error raised on purpose by the package derives from ``CTC2DError``,
so that importers may catch the whole family at once. The concrete
classes also derive from the closest built-in exception, so that code
written against plain ``ValueError`` keeps working.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
from typing import NamedTuple, Tuple


class ValidationReport(NamedTuple):
    """Outcome of a validation check; ``ok`` is False for the first violation found."""

    ok: bool
    message: str = "ok"
    axis: str = ""  #: Name of the offending axis, or "entry" / "gamma" / "shape".
    index: Tuple[int, ...] = ()  #: Location of the violation.
    observed: float = float("nan")  #: Observed value (usually a sum).


class CTC2DError(Exception):
    """Base class of all *pyctc2d* errors."""


class InvalidTensorError(CTC2DError, ValueError):
    """A probability grid, or its logits, failed validation."""

    def __init__(self, report):
        """
        Args:
            report(ValidationReport): The first violation found.
        """
        super().__init__(report.message)
        self.report = report


class AlphabetMismatchError(CTC2DError, ValueError):
    """A label class, or class count, doesn't fit the alphabet in use."""


class ShapeMismatchError(CTC2DError, ValueError):
    """Probability map, transition map and/or gamma dimensions disagree."""


class InfeasibleLabelError(CTC2DError, ArithmeticError):
    """No alignment of the label has nonzero probability."""

    def __init__(self, min_width, width, reason="", unit="columns"):
        """
        Args:
            min_width(int): Smallest width able to carry the label.
            width(int): Width actually available.
            reason(str): Optional extra explanation. (Default = "")
            unit(str): What the width counts, "frames" or "columns". (Default = "columns")
        """
        if reason:
            msg = reason
        else:
            msg = f"label needs min_width={min_width} but only {width} {unit} are available"
        super().__init__(msg)
        self.min_width = min_width
        self.width = width
        self.unit = unit


class SizeGuardError(CTC2DError, ValueError):
    """An exhaustive oracle was asked to enumerate too large an instance."""


class TrainingDivergedError(CTC2DError, RuntimeError):
    """Training produced a non-finite loss."""


class ConfigError(CTC2DError, ValueError):
    """A configuration file, or field, is invalid."""


class FormatError(CTC2DError, ValueError):
    """A tensor, dataset or report file is malformed."""
