"""Exception types shared across the package."""


class HdlogitError(Exception):
    """Base class for all errors raised by hdlogit."""


class NotPositiveDefinite(HdlogitError):
    """Cholesky factorization hit a non-positive pivot."""


class SingularInformation(HdlogitError):
    """The weighted information matrix is singular or indefinite."""


class NonFiniteObjective(HdlogitError):
    """An objective function returned NaN or infinity during optimization."""


class DegenerateDesign(HdlogitError):
    """Regression design has no variation (all predictor values equal)."""


class NonPositiveResponse(HdlogitError):
    """Gamma-family responses must be strictly positive."""


class UnknownConfig(HdlogitError, ValueError):
    """Unrecognized signal configuration name."""


class NonPositiveInput(HdlogitError, ValueError):
    """A strictly positive argument was zero or negative."""


class NonPositiveScale(HdlogitError, ValueError):
    """Rescaling requires a strictly positive scale factor."""


class LengthMismatch(HdlogitError, ValueError):
    """Paired vectors have different lengths."""


class DegenerateObservations(HdlogitError):
    """Observed values have no variance, so R^2 is undefined."""


class DegenerateBootstrap(HdlogitError):
    """All bootstrap resample statistics are identical."""


class QuadratureUnstable(HdlogitError):
    """Restarted minimizations of the quadrature objective disagree."""
