class LatticeError(ValueError):
    """Base class for every error raised by the lattice toolkit"""


class DegreeMismatchError(LatticeError):
    pass


class InvalidInputError(LatticeError):
    pass


class InvalidParameterError(LatticeError):
    pass


class InvalidFamilyError(LatticeError):
    pass


class UnsupportedStructureError(LatticeError):
    pass


class UnsupportedDimensionError(LatticeError):
    pass


class NotApplicableError(LatticeError):
    pass


class InvalidSpecError(LatticeError):
    pass


class InternalConsistencyError(LatticeError):
    """A construction produced data that contradicts its own closed forms"""
