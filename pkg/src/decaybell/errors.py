"""Exception types raised by decaybell."""


class DecayBellError(Exception):
    """Base class for all library errors."""


class UnphysicalAngles(DecayBellError, ValueError):
    """Decay angles lie outside the kinematically allowed region."""


class DegenerateKinematics(DecayBellError):
    """The momentum solution is undetermined (vanishing denominator)."""


class AllAmplitudesVanish(DecayBellError):
    """Every helicity amplitude is zero, so no spin state can be normalised."""


class EmptyKeepSet(DecayBellError, ValueError):
    """A partial trace was asked to keep no qubit at all."""


class AxisCountMismatch(DecayBellError, ValueError):
    """The number of measurement axes does not fit the observable."""


class DegenerateFrame(DecayBellError):
    """Axis reconstruction met a vanishing normalisation."""


class NumericalConsistencyError(DecayBellError):
    """Quantities that must agree analytically disagree numerically."""
