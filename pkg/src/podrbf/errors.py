"""Exception and warning types shared across the package.

Errors split into two families so the CLI can map them to exit codes:
configuration problems (bad inputs, malformed definitions) and numerical
failures (integration blow-up, singular linear systems).
"""


class PodRbfError(Exception):
    """Base class for all package errors."""


class ConfigurationError(PodRbfError):
    """Invalid user input: config files, problem definitions, bad arguments."""


class NumericalError(PodRbfError):
    """A computation failed for numerical reasons."""


# -- configuration family -------------------------------------------------

class InvalidProblem(ConfigurationError):
    """A problem definition violates one of its invariants."""


class DimensionMismatch(ConfigurationError):
    """Array arguments have incompatible shapes or lengths."""


class TimeOutOfRange(ConfigurationError):
    """A control evaluation time lies outside the problem time span."""


class NegativeRadius(ConfigurationError):
    """A radial kernel was evaluated at a negative radius."""


class DuplicateCenters(ConfigurationError):
    """Two interpolation centers coincide, making the Gram matrix singular."""


# -- numerical family -----------------------------------------------------

class StepSizeUnderflow(NumericalError):
    """The adaptive integrator drove its step size below the working minimum."""


class NonFiniteState(NumericalError):
    """Integration produced NaN or Inf state values."""


class NumericalFailure(NumericalError):
    """A matrix factorization did not converge."""


class AllZeroSpectrum(NumericalError):
    """Every singular value is zero; no basis can be selected."""


class SingularGram(NumericalError):
    """The RBF Gram matrix is exactly singular."""


class NonFiniteObjective(NumericalError):
    """The objective returned NaN or Inf during optimization."""


# -- warnings --------------------------------------------------------------

class IllConditionedGram(UserWarning):
    """Gram matrix condition estimate exceeds 1e12; coefficients may be noisy."""


class ExtrapolationWarning(UserWarning):
    """A surrogate prediction was requested outside the training box."""


class OutsideBoxWarning(UserWarning):
    """An integration was requested at a parameter point outside the box."""
