"""Exception types shared across the package."""


class LyucalcError(Exception):
    pass


class RingMismatch(LyucalcError):
    pass


class InhomogeneousError(LyucalcError):
    pass


class ParseError(LyucalcError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class NotInSpan(LyucalcError):
    pass


class NotInImage(LyucalcError):
    """Raised when a lift A*X = B has no solution."""


class TwistMismatch(LyucalcError):
    """Raised when Frobenius twist bookkeeping fails to produce a degree-0 map."""


class PipelineAssertion(LyucalcError):
    """An internal consistency check failed (d*d != 0, non-exactness, ...)."""
