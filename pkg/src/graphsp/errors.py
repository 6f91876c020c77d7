"""Exception types.

Two families drive the CLI exit codes: :class:`InputError` (malformed or
invalid input, exit 2) and :class:`NumericError` (a well-formed input the
numerical model cannot handle, exit 3).
"""


class GSPError(ValueError):
    """Base class for every error raised by graphsp."""


class InputError(GSPError):
    pass


class NumericError(GSPError):
    pass


# graph construction
class IndexOutOfRange(InputError):
    pass


class SelfLoop(InputError):
    pass


class DuplicateEdge(InputError):
    pass


class AsymmetricWeight(InputError):
    pass


class NegativeWeight(InputError):
    pass


class NonFiniteWeight(InputError):
    pass


class TooSmall(InputError):
    pass


class DuplicatePoints(InputError):
    pass


class KTooLarge(InputError):
    pass


class NotAPermutation(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class ShiftKindError(InputError):
    """Operation called with a shift kind it does not support."""


# operators and spectra
class DirectedLaplacian(NumericError):
    pass


class IsolatedNode(NumericError):
    pass


class Defective(NumericError):
    """Eigenvector matrix of a non-symmetric shift is numerically singular."""


class TooLarge(NumericError):
    pass


class ZeroSpectralRadius(NumericError):
    pass


class ZeroVector(NumericError):
    pass


class NotSymmetric(NumericError):
    pass


# filtering
class KernelDomain(NumericError):
    pass


class InvalidKernel(InputError):
    pass


class DegreeTooHigh(NumericError):
    pass


class InvalidInterval(NumericError):
    pass


class SpectrumExceedsBound(NumericError):
    pass


# sampling
class TooFewSamples(NumericError):
    pass


class TooManySamples(NumericError):
    pass


class NotUnique(NumericError):
    pass
