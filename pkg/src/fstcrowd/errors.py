"""Exception hierarchy for the platform.

Every error carries a stable machine-readable ``code`` so the HTTP layer
and the CLI can map failures without string matching.
"""

from __future__ import annotations


class FstCrowdError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.__doc__)
        self.details = details


class LogCorruption(FstCrowdError):
    """Event log has a gap, duplicate, or undecodable entry."""

    code = "log_corruption"


class UnknownImage(FstCrowdError):
    """Referenced image_id is not part of any ingested dataset."""

    code = "unknown_image"


class DuplicateAnnotation(FstCrowdError):
    """Annotator already labeled this image."""

    code = "duplicate_annotation"


class ImageNotOpen(FstCrowdError):
    """Image is settled, halted, escalated, or adjudicated."""

    code = "image_not_open"


class ScoringDisqualified(FstCrowdError):
    """Annotator is disqualified; disqualification is terminal by default."""

    code = "scoring_disqualified"


class NotReviewable(FstCrowdError):
    """Adjudication requires a halted, escalated, or settled image."""

    code = "not_reviewable"


class PermissionDenied(FstCrowdError):
    """Caller's role does not allow this operation."""

    code = "permission_denied"


class NotSettled(FstCrowdError):
    """Image has no consensus label yet."""

    code = "not_settled"


class NoQualifiedAnnotations(FstCrowdError):
    """Agreement metrics need at least one qualified annotation."""

    code = "no_qualified_annotations"


class ManifestParseError(FstCrowdError):
    """Dataset manifest is malformed; details carry the line number."""

    code = "manifest_parse_error"

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message, line=line)
        self.line = line


class MissingImageFiles(FstCrowdError):
    """Manifest references files that do not exist on disk."""

    code = "missing_image_files"

    def __init__(self, paths: list[str]):
        super().__init__(f"{len(paths)} image file(s) missing", paths=paths)
        self.paths = paths


class UnknownMethod(FstCrowdError):
    """Requested label source is not available."""

    code = "unknown_method"


class NoSkinDetected(FstCrowdError):
    """Skin mask is empty; caller should map to FST = NotApplicable."""

    code = "no_skin_detected"


class InvalidInput(FstCrowdError):
    """Input violates a precondition (zero-area image, bad shape, ...)."""

    code = "invalid_input"


class CalibrationUnderdetermined(FstCrowdError):
    """Some FST class has no expert-labeled image with an ITA value."""

    code = "calibration_underdetermined"


class CalibrationDegenerate(FstCrowdError):
    """Threshold adjustment broke the strictly-decreasing ordering."""

    code = "calibration_degenerate"


class DegenerateInput(FstCrowdError):
    """Correlation is undefined (constant vector or too few pairs)."""

    code = "degenerate_input"


class InvalidRho(FstCrowdError):
    """Fisher transform needs |rho| < 1."""

    code = "invalid_rho"


class SampleTooSmall(FstCrowdError):
    """Fisher comparison needs n >= 4."""

    code = "sample_too_small"


class EmptyInput(FstCrowdError):
    """Operation needs at least one label pair."""

    code = "empty_input"


class NoApplicablePairs(FstCrowdError):
    """Every pair has a NotApplicable side."""

    code = "no_applicable_pairs"


class PoolTooSmall(FstCrowdError):
    """An image's annotation pool is smaller than the largest sample size."""

    code = "pool_too_small"
