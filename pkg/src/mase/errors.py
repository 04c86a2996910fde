"""Exception types shared across the package."""


class MaseError(Exception):
    """Base class for all package errors."""


class NonFiniteFieldError(MaseError, ValueError):
    """Field construction or an operation received NaN/Inf values."""


class GridMismatchError(MaseError, ValueError):
    """Two fields that must share a grid do not."""


class DerivativeOrderError(MaseError, ValueError):
    """Spectral derivative order outside the supported set {1, 2, 3}."""


class BlowUpError(MaseError, ArithmeticError):
    """Time integration produced non-finite stage values."""


class SingularLineError(MaseError, ValueError):
    """Phase-plane evaluation too close to the singular line D(U) = 0."""


class NonexistenceError(MaseError, ValueError):
    """No traveling-wave orbit exists for the requested parameters.

    The message names the obstruction (no turning point, sign change of the
    denominator before contact, origin not a saddle, ...).
    """


class EnergyMismatchError(MaseError, ValueError):
    """Wave segments on different first-integral levels cannot be composed."""

    def __init__(self, delta_e: float):
        self.delta_e = float(delta_e)
        super().__init__(
            f"segments lie on different first-integral levels: |dE| = {self.delta_e:.3e}"
        )


class CompositionError(MaseError, ValueError):
    """Segments do not join continuously, or the composite fails symmetry checks."""


class ConstantFieldError(MaseError, ValueError):
    """The symmetry axis of a (numerically) constant field is undefined."""


class SupportError(MaseError, ValueError):
    """A test function's support does not fit the sampled window."""


class ConfigError(MaseError, ValueError):
    """Invalid scenario or solver configuration."""
