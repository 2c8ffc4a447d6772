"""Exception and warning types shared across the package."""


class SqueezedAtomError(Exception):
    """Base class for all package errors."""


class ParameterError(SqueezedAtomError, ValueError):
    """Invalid physical or numerical input."""


class NonPositiveGamma(ParameterError):
    pass


class NegativeN(ParameterError):
    pass


class MOutOfRange(ParameterError):
    pass


class NegativeTime(ParameterError):
    pass


class NegativeTau(ParameterError):
    pass


class InvalidDensityMatrix(ParameterError):
    pass


class DegenerateWidth(ParameterError):
    pass


class SingularSystem(SqueezedAtomError):
    pass


class NonDecayedTail(SqueezedAtomError):
    """Correlator has not decayed by the end of the quadrature window."""


class NoHalfCrossing(SqueezedAtomError):
    pass


class FitError(SqueezedAtomError):
    pass


class FitDiverged(FitError):
    pass


class DegenerateSeries(FitError):
    pass


class MalformedCsv(SqueezedAtomError, ValueError):
    pass


class InvalidFlag(SqueezedAtomError, ValueError):
    pass


class UnwritableOutput(SqueezedAtomError, OSError):
    pass


class TruncationWarning(RuntimeWarning):
    """Quadrature window cuts off a correlator tail above 1e-10 of its start."""
