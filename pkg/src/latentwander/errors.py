"""Exception hierarchy shared by all latentwander modules.

Every error carries a stable machine-readable ``code`` so CLI and HTTP
layers can surface it without string matching.
"""

from __future__ import annotations


class LatentWanderError(Exception):
    """Base class for all engine errors."""

    code = "error"


class EmptyDataset(LatentWanderError):
    code = "empty_dataset"


class InvalidBoundaries(LatentWanderError):
    code = "invalid_boundaries"


class InvalidScores(LatentWanderError):
    code = "invalid_scores"


class MissingSuffixes(LatentWanderError):
    code = "missing_suffixes"


class NoEmotionFound(LatentWanderError):
    """Raised when a query carries no recognizable trailing emotion phrase."""

    code = "no_emotion_found"


class InvalidConfig(LatentWanderError):
    code = "invalid_config"


class EncoderUnavailable(LatentWanderError):
    code = "encoder_unavailable"


class DimensionMismatch(LatentWanderError):
    code = "dimension_mismatch"


class DuplicateId(LatentWanderError):
    code = "duplicate_id"


class MissingEmotion(LatentWanderError):
    code = "missing_emotion"


class MissingGroundTruth(LatentWanderError):
    code = "missing_ground_truth"


class DegenerateInput(LatentWanderError):
    code = "degenerate_input"


class ParseError(LatentWanderError):
    code = "parse_error"

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvalidPoint(LatentWanderError):
    code = "invalid_point"


class OutOfBounds(LatentWanderError):
    code = "out_of_bounds"
