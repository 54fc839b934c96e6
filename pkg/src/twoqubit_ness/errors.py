"""Exception and warning types raised across the package."""


class RotatingWaveError(ValueError):
    """Coupling too strong for the rotating-wave form of the system-bath interaction."""


class BasisMismatchError(ValueError):
    """A density matrix was handed to an operation expecting the other basis."""


class OccupationError(ValueError):
    """Boson occupation requested at or below the chemical potential."""


class UnsupportedClosedFormError(ValueError):
    """The closed-form steady state does not cover this bath configuration."""


class DegenerateGeneratorError(RuntimeError):
    """The generator has no unique steady state, or its coherence block is singular."""


class NotXStateError(ValueError):
    """Input to the X-state concurrence formula has entries outside the X pattern."""


class NotSteadyStateError(ValueError):
    """State handed to a steady-state functional does not annihilate the generator."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class MarkovianValidityWarning(UserWarning):
    """Spectral density is not small against the system frequencies."""
