"""Exception types raised by :mod:`pcgmub`."""


class PcgError(Exception):
    """Base class for every error raised by this package."""


class EnvelopeClipped(PcgError, ValueError):
    """A Gaussian envelope does not decay below threshold inside the grid."""


class NonPositiveWidth(PcgError, ValueError):
    pass


class DegenerateAngle(PcgError, ValueError):
    """The angle (or angle difference) has ``|sin| <= eps``."""


class IndexOutOfRange(PcgError, IndexError):
    pass


class EmptyProjection(PcgError, ValueError):
    """A mask annihilates the state it is applied to."""


class InvalidM(PcgError, ValueError):
    """``m`` violates the unbiasedness constraint for the given ``d``."""


class ExcludedAngle(PcgError, ValueError):
    """A quadruple direction reproduces ``±x`` or ``±p``."""


class OutOfRange(PcgError, ValueError):
    pass


class AbsoluteContinuityViolated(PcgError, ValueError):
    """``Q_i == 0`` where ``P_i > 0`` in a relative entropy."""


class EmptySample(PcgError, ValueError):
    pass
