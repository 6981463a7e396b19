"""
Exception hierarchy for the Laplace-type transform toolkit
Every operation raises a subclass of LaplaceTypeError; only cli.py turns them into exit codes
"""


class LaplaceTypeError(Exception):
    """Base class for every error raised by the toolkit"""


class ConfigurationError(LaplaceTypeError):
    """Invalid setting or environment override"""


class UsageError(LaplaceTypeError):
    """Bad command-line usage (exit code 2)"""


class InvalidSource(LaplaceTypeError):
    """SourceFunction metadata outside the transform's domain"""


class InvalidParams(LaplaceTypeError):
    """Parameters outside a rule's validity range"""


class AbscissaTooSmall(LaplaceTypeError):
    """The abscissa does not exceed the convergence abscissa"""


class AbscissaMismatch(LaplaceTypeError):
    """Two image sequences taken at different abscissae"""


class QuadratureFailure(LaplaceTypeError):
    """Adaptive quadrature could not reach the requested tolerance"""

    def __init__(self, message, achieved=None, value=None):
        super().__init__(message)
        self.achieved = achieved
        self.value = value


class NonPositiveDelay(LaplaceTypeError):
    """Delay shift must be strictly positive"""


class DerivativeUnavailable(LaplaceTypeError):
    """Laplace-transform derivatives could not be produced"""


class NonPositiveScale(LaplaceTypeError):
    """Laguerre scale s must be positive"""


class InsufficientLength(LaplaceTypeError):
    """Sequence too short for the requested order"""


class ImproperRational(LaplaceTypeError):
    """Numerator degree is not below the denominator degree"""


class RootIsolationFailure(LaplaceTypeError):
    """Poles could not be isolated to the required accuracy"""


class NonCancellingPower(LaplaceTypeError):
    """Residue inversion left a t-power below n; the rule is not an image sequence"""


class IndexUnderflow(LaplaceTypeError):
    """A backward index below zero was required"""


class MissingInitialData(LaplaceTypeError):
    """Initial derivative values needed by the small-index branch are missing"""


class OrderOutOfRange(LaplaceTypeError):
    """Fractional order outside [0, 1)"""


class DegenerateRoot(LaplaceTypeError):
    """Characteristic root rho = 1 puts a pole at s = 1"""


class SingularFit(LaplaceTypeError):
    """Initial-condition system is singular"""


class LengthMismatch(LaplaceTypeError):
    """Sequences of different lengths"""


class UnknownCase(LaplaceTypeError):
    """No built-in worked example with this id"""


class NonPositiveArgument(LaplaceTypeError):
    """Gamma function called at a non-positive argument"""


class DivergentSeries(LaplaceTypeError):
    """Series path requested where the series diverges"""


class ZeroAbscissa(LaplaceTypeError):
    """Exact abscissa must be non-zero"""


class IndexOutOfRange(LaplaceTypeError):
    """Table index outside its valid range"""
