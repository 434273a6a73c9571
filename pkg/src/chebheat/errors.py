"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A computation failed to meet its numerical contract."""


class OrderCapError(NumericalError):
    """No polynomial order under the hard cap met the requested tolerance."""


class ConvergenceError(NumericalError):
    """An iterative estimate did not converge within its iteration budget."""


class ParseError(ValueError):
    """A graph or signal file could not be parsed.

    Carries the offending path and 1-based line number so callers can
    point the user at the exact input line.
    """

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no
