"""Exception types shared across the package."""


class NumericError(Exception):
    """A computation failed for numerical reasons (maps to CLI exit code 1)."""


class DependentSubsetError(NumericError):
    """A row subset is numerically rank-deficient where full rank is required."""


class DegenerateAngleError(NumericError):
    """A leave-one-out angle is numerically zero in the recursive expansion."""


class RankDeficiencyError(NumericError):
    """The matrix has numerical rank below what the operation requires."""


class EnumerationCapError(ValueError):
    """The number of row subsets exceeds the enumeration cap."""


class ParseError(Exception):
    """A matrix or vector file could not be parsed (maps to CLI exit code 3)."""
