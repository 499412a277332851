"""Exception types shared across the package.

Every error raised on a data or domain problem derives from SwissRankError
so the CLI can map the whole family onto exit code 1.
"""

from __future__ import annotations


class SwissRankError(Exception):
    """Base class for all data and domain errors raised by this package."""


class ParseError(SwissRankError):
    """An input file is malformed for its declared format."""


class DomainError(SwissRankError):
    """A value violates its domain, e.g. a score outside [0, 100]."""


class DuplicateModelError(SwissRankError):
    """The same model name appears more than once in a score table."""


class DuplicateDatasetError(SwissRankError):
    """A dataset is assigned to more than one round of a sequence."""


class UnknownModelError(SwissRankError):
    """A referenced model does not exist in the score table."""


class UnknownDatasetError(SwissRankError):
    """A referenced dataset does not exist in the score table."""


class MissingScoreError(SwissRankError):
    """A required score cell is missing under the `error` policy."""


class DimensionMismatchError(SwissRankError):
    """Tensor, schedule, or state dimensions do not agree."""


class InstanceTooLargeError(SwissRankError):
    """The instance exceeds the exact-enumeration size limits."""


class InactiveModelError(SwissRankError):
    """An operation referenced a model that is no longer active."""


class EmptyQuestionError(SwissRankError):
    """A question has no recorded outcome for any model."""
