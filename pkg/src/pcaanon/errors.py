"""Exception hierarchy shared by all pcaanon modules.

Three broad families, matching the CLI exit-code taxonomy:

* ``ConfigError``  -> exit 2: bad flags, malformed policy, unknown metric.
* ``DataError``    -> exit 3: unparseable or degenerate input data.
* ``NumericError`` -> exit 4: a numerical procedure failed on valid data.
"""


class PcaAnonError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(PcaAnonError):
    """Invalid run configuration (flags, policy file, unknown metric)."""


class DataError(PcaAnonError):
    """Input data is malformed or degenerate."""


class CsvParseError(DataError):
    """A CSV cell failed to parse; carries row/column location."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class ShapeMismatchError(DataError):
    """Two datasets or images that must share a shape do not."""


class ZeroVarianceError(DataError):
    """A column has zero standard deviation and cannot be standardized."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class ZeroRangeError(DataError):
    """Constant data leaves the image affine map with a zero range."""


class StatsMismatchError(DataError):
    """Standardized operands were produced with different column stats."""


class PgmFormatError(DataError):
    """A PGM file is malformed or uses an unsupported variant."""


class NumericError(PcaAnonError):
    """A numerical routine failed (convergence, singularity, ...)."""


class EigenConvergenceError(NumericError):
    """The symmetric eigensolver did not converge."""


class SingularCovarianceError(NumericError):
    """A covariance matrix stayed singular after ridge regularization."""


class UndefinedCorrelationError(NumericError):
    """Correlation is undefined because a flattening has zero variance."""


class SigmoidFitError(NumericError):
    """The sigmoid fit diverged or received unusable points."""
