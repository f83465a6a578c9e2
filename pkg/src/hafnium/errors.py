"""Exception taxonomy.

Exit codes used by the CLI: parse errors 2, dimension/shape errors 3,
numeric failures 4, budget/capacity limits 5.
"""


class HafniumError(Exception):
    exit_code = 1


class ParseError(HafniumError):
    """Malformed matrix file; carries the offending line/column."""

    exit_code = 2

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)


class DimensionError(HafniumError):
    exit_code = 3


class NonSquare(DimensionError):
    pass


class OddDimension(DimensionError):
    pass


class AsymmetricInput(DimensionError):
    pass


class DimensionMismatch(DimensionError):
    pass


class LengthMismatch(DimensionError):
    pass


class TooLarge(DimensionError):
    pass


class OutOfRange(DimensionError):
    pass


class BadFamily(DimensionError):
    pass


class InsufficientData(DimensionError):
    pass


class NumericError(HafniumError):
    exit_code = 4


class EigensolverNoConvergence(NumericError):
    pass


class DegenerateHessenberg(NumericError):
    pass


class DivisionByZeroReference(NumericError):
    pass


class BudgetError(HafniumError):
    exit_code = 5


class BudgetExceeded(BudgetError):
    pass


class CapacityExceeded(BudgetError):
    pass
