"""Exception hierarchy.

Every error raised on purpose by the package derives from ``PisometryError``.
Input problems also derive from ``ValueError`` and numerical breakdowns from
``ArithmeticError`` so callers can catch them by category.
"""


class PisometryError(Exception):
    """Base class for all package errors."""


class InputError(PisometryError, ValueError):
    """Malformed or out-of-contract input."""


class NumericalError(PisometryError, ArithmeticError):
    """A numerical procedure failed to produce a trustworthy answer."""


class NotSquareError(InputError):
    pass


class DimensionMismatchError(InputError):
    pass


class NotPartialIsometryError(InputError):
    pass


class NotOrthonormalError(InputError):
    pass


class WrongDefectError(InputError):
    pass


class UnequalIndicesError(InputError):
    pass


class NotCNUError(InputError):
    pass


class NotVanishingAtZeroError(InputError):
    pass


class PoleInsideDiskError(InputError):
    pass


class SchemaError(InputError):
    """A JSON document does not match the expected schema."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class NonConvergenceError(NumericalError):
    pass


class SpectrumObstructionError(NumericalError):
    pass


class SingularResolventError(NumericalError):
    pass


class SingularSecondFactorError(NumericalError):
    pass


class SingularGramError(NumericalError):
    pass


class SingularPencilError(NumericalError):
    pass


class DegenerateDenominatorError(NumericalError):
    pass


class RootFindingError(NumericalError):
    pass


class NonUnimodularRootError(NumericalError):
    pass


class QuadratureNonConvergenceError(NumericalError):
    pass
