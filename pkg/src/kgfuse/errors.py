"""Exception types shared across the package.

The CLI maps these onto exit codes: data/parse problems exit with 2,
numeric failures (NaN or Inf reaching a result) exit with 3.
"""


class DataError(ValueError):
    """Input data violates a documented contract."""


class ParseError(DataError):
    """A file could not be parsed; carries path and 1-based line number."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


class NumericError(ArithmeticError):
    """A NaN or Inf reached a user-visible result."""
