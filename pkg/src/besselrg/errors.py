"""Exception types shared across the package."""


class BesselRGError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BesselRGError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested at (or too close to) a pole."""


class UnsupportedError(BesselRGError):
    """Parameter combination outside the supported regime (e.g. |m| >= 1)."""


class BlowUpError(BesselRGError):
    """A running coupling escapes to infinity at a finite cutoff.

    Blow-ups are expected outcomes: every trajectory with alpha < 0 diverges
    periodically, and repulsive-side initial data diverge at a finite scale.
    The offending cutoff is carried in ``lam``.
    """

    def __init__(self, message, lam=None):
        super().__init__(message)
        self.lam = lam


class ConvergenceError(BesselRGError):
    """An iterative numerical routine failed to converge."""


class NonConvergenceError(ConvergenceError):
    """A regularized limit failed its Cauchy or mollifier-independence check."""


class TailMismatchError(BesselRGError):
    """A declared large-momentum tail is incompatible with the operator."""


class TailExponentError(DomainError):
    """Homogeneous-tail exponent outside the transform's validity range."""


class ExponentError(DomainError):
    """Tail exponent hits an excluded value of the antiderivative formulas."""


class ConfigError(BesselRGError):
    """Invalid run configuration (CLI exit code 1)."""
