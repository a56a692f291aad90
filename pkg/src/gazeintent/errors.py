"""Exception types shared across the package."""


class GazeIntentError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSampleError(GazeIntentError):
    """A gaze sample violates its invariants (e.g. non-unit quaternion)."""


class InvalidIntervalError(GazeIntentError):
    """A time interval is zero or negative where a positive one is required."""


class EmptyWindowError(GazeIntentError):
    """An operation needing at least one point received an empty window."""


class StreamOrderError(GazeIntentError):
    """Samples arrived with non-increasing timestamps."""


class EmptyStreamError(GazeIntentError):
    """A batch operation received an empty stream."""


class NoWindowError(GazeIntentError):
    """A feature window was requested with no current fixation."""


class ParameterDomainError(GazeIntentError):
    """Distribution parameters outside the family's valid domain."""


class SupportError(GazeIntentError):
    """Samples fall outside the support of the distribution family."""


class FitFailureError(GazeIntentError):
    """Maximum-likelihood fitting failed to converge."""


class DegenerateSampleError(GazeIntentError):
    """Samples are degenerate (zero variance) for the requested operation."""


class DegenerateTestError(GazeIntentError):
    """A statistical test is undefined for the given inputs."""


class IncompleteDataError(GazeIntentError):
    """A labeled table is missing a required condition or class."""


class InvalidObservationError(GazeIntentError):
    """An observation contains non-finite feature values."""


class DimensionMismatchError(GazeIntentError):
    """Vector dimensions do not agree."""


class TrainingError(GazeIntentError):
    """SVM training cannot proceed (e.g. single-class data)."""


class ConvergenceError(TrainingError):
    """SMO hit the pass limit before satisfying the KKT conditions.

    Carries the partial model and the worst remaining violation so callers
    can inspect what went wrong.
    """

    def __init__(self, message, partial_model=None, worst_violation=None):
        super().__init__(message)
        self.partial_model = partial_model
        self.worst_violation = worst_violation


class SpecError(GazeIntentError):
    """A generative spec is incomplete or inconsistent."""


class ScheduleError(GazeIntentError):
    """A synthetic gaze schedule is infeasible."""


class ModelFileError(GazeIntentError):
    """A model or spec file is malformed or has an unknown version."""


class ReplayError(GazeIntentError):
    """Replay inputs are missing required ground truth."""
