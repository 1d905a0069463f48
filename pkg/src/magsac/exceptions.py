"""Exception types shared by the solvers, the scoring machinery and the CLI."""


class MagsacError(Exception):
    """Base class for every error raised by this package."""


class DegenerateSample(MagsacError):
    """The minimal sample cannot determine a model (coincident or collinear points)."""


class NumericalFailure(MagsacError):
    """A linear solve or factorization was too ill-conditioned to trust."""


class InsufficientSupport(MagsacError):
    """Too few positive-weight points for a non-minimal fit."""


class NoRealSolution(MagsacError):
    """A polynomial solver produced no usable real root."""


class RetryExhausted(MagsacError):
    """Scene generation could not satisfy its constraints within the retry budget."""


class NoModelFound(MagsacError):
    """An estimator never accepted a valid model."""


class ParseError(MagsacError):
    """A correspondence file could not be parsed; carries the offending line number."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class LabelMismatch(MagsacError):
    """Label sidecar length does not match the point count."""


class MissingGroundTruth(MagsacError):
    """Evaluation needs ground-truth inlier labels but the dataset has none."""
