"""Exception hierarchy shared by every module of the package."""


class SliceGeomError(Exception):
    """Base class for all errors raised by slicegeom."""


class AlgebraError(SliceGeomError, ValueError):
    """Invalid algebraic input, e.g. mismatched dimensions."""


class DivisionByZeroError(AlgebraError, ZeroDivisionError):
    pass


class InvalidUnitError(AlgebraError):
    """A vector that was expected to be an imaginary unit is not one."""


class DegeneratePairError(AlgebraError):
    """Two imaginary units that must differ coincide."""


class DomainError(SliceGeomError, ValueError):
    """A point lies outside the domain of a map."""


class ParameterError(DomainError):
    pass


class PoleError(DomainError):
    pass


class BranchError(DomainError):
    """No continuous branch exists at the requested point."""


class NotOnManifoldError(DomainError):
    pass


class ConfigurationError(SliceGeomError, ValueError):
    pass


class StencilError(SliceGeomError):
    """A finite-difference stencil left the domain or failed to evaluate."""


class UnsupportedError(SliceGeomError):
    pass


class DerivativeError(SliceGeomError):
    pass


class AlignmentError(SliceGeomError, ValueError):
    """A basis does not start with (1, I) for the point's unit I."""


class ParseError(SliceGeomError, ValueError):
    """Malformed stem expression; carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")
