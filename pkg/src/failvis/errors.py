"""Exception types shared across the toolkit.

Every error raised by failvis derives from :class:`FailvisError` so callers
can catch toolkit failures in one place.  Validation of symbol sets is the
exception to the raise-early rule: it reports problems as data (see
``failvis.symbols.validation.Violation``), and only the operations that
*require* a valid set wrap those findings in :class:`ValidationError`.
"""

from __future__ import annotations


class FailvisError(Exception):
    """Base class for all toolkit errors."""


# --- symbol code / symbol sets ------------------------------------------------

class SymbolSyntaxError(FailvisError):
    """Malformed symbol-code text.  Carries the 1-based offending line."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class SymbolSemanticError(FailvisError):
    """Structurally parseable symbol code that violates field rules."""


class ValidationError(FailvisError):
    """A symbol set (or other validated value) failed validation.

    ``violations`` holds the individual findings when available.
    """

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class ImageFormatError(FailvisError):
    """Frame is not an 8-bit RGB raster of the expected shape."""


class EmptySetError(FailvisError):
    """Operation requires at least one symbol in the set."""


class NoTargetError(FailvisError):
    """Symbol kind does not define a target point."""


# --- trajectory store ----------------------------------------------------------

class NotFoundError(FailvisError):
    """Unknown trajectory, annotation, or run id."""


class DuplicateIdError(FailvisError):
    """Ingest id collides with an existing record of different content."""


class MediaDecodeError(FailvisError):
    """Media payload could not be decoded into frames."""


class TimestampOutOfRange(FailvisError):
    """Requested timestamp lies outside the trajectory duration."""


# --- annotation pipeline -------------------------------------------------------

class SubtaskIndexOutOfRange(FailvisError):
    """Failure subtask index does not address the subtask plan."""


class KeyframeNotInSampleList(FailvisError):
    """Chosen failure keyframe is not one of the sampled frames."""


class SuccessContradiction(FailvisError):
    """A successful trajectory carries failure payload (or vice versa)."""


class FrameMismatch(FailvisError):
    """Symbol set anchored to a frame the stage rules do not allow."""


class ArmMismatch(FailvisError):
    """Low-level command arm matches no symbol in the paired set."""


class IncompleteAnnotation(FailvisError):
    """Finalize called while required fields are still missing."""


class ImmutableError(FailvisError):
    """Mutation attempted on a finalized annotation record."""


class LeaseConflict(FailvisError):
    """Another annotator holds the edit lease for this trajectory."""


# --- model endpoints / evaluation ----------------------------------------------

class EndpointError(FailvisError):
    """Model endpoint unreachable or returned an unusable response."""


class ResponseParseError(FailvisError):
    """Model response does not follow the expected structure."""


class JudgeParseError(FailvisError):
    """Judge response unusable after the retry."""


class InsufficientPool(FailvisError):
    """Distractor pool too small after applying the sampling constraints."""


class MissingSymbols(FailvisError):
    """Record lacks the symbol set a generator variant requires."""


class NotAFailure(FailvisError):
    """Open-ended question types only apply to failed trajectories."""


class SpecInfeasible(FailvisError):
    """Split spec cannot be satisfied by the available records."""


class EmptyResults(FailvisError):
    """Report aggregation called with no scored items."""


# --- supervisor -----------------------------------------------------------------

class DimensionMismatch(FailvisError):
    """Mask and frame dimensions disagree."""


class AdapterError(FailvisError):
    """Environment/policy adapter failed mid-session."""
