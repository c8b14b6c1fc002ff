# -*- coding: utf-8 -*-
"""Exceptions raised by pygtep."""
from typing import Optional


class GtepError(ValueError):
    """Base class of every error raised on purpose by the package."""


class ParseError(GtepError):
    """A document could not be decoded."""


class SchemaError(GtepError):
    """A document is well formed but a field is missing or out of range."""


class InstanceReferenceError(GtepError):
    """An identifier refers to something that was never declared."""


class DimensionError(GtepError):
    """Vectors or index sets do not line up."""


class MissingPriceError(GtepError):
    """A price needed by a cost coefficient is not defined."""


class SizeLimitError(GtepError):
    """A brute-force enumeration would be too large."""


class InfeasiblePlanError(GtepError):
    """An investment plan violates the first-stage constraints."""


class MismatchedInputsError(GtepError):
    """Two results computed on different data are being compared."""


class SolverFailureError(GtepError):
    """A solve ended without an optimal answer where one was required."""

    def __init__(
        self, message: str, year: Optional[int] = None, scenario: Optional[str] = None
    ):
        """
        Initialize the error.

        :param message: the description.
        :param year: the year of the failing subproblem, if any.
        :param scenario: the scenario of the failing subproblem, if any.
        """
        if year is not None or scenario is not None:
            message = "{} (year={}, scenario={})".format(message, year, scenario)
        super().__init__(message)
        self.year = year
        self.scenario = scenario
