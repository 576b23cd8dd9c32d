"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An input broke a documented precondition (shape, symmetry, norm)."""


class DomainError(ValueError):
    """A parameter lies outside the domain where the quantity is defined."""


class UndefinedPhaseError(ArithmeticError):
    """A phase was requested from a (numerically) zero complex number.

    Raised on nodal passages of a loop and on vanishing weighted sums.
    """

    def __init__(self, message: str, member: int | None = None):
        if member is not None:
            message = f"member {member}: {message}"
        super().__init__(message)
        self.member = member


class InvariantBreach(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""


class ParseError(ValueError):
    """Malformed density-matrix text, with 1-based line/column of the offending token."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
