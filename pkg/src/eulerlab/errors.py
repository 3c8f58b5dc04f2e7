"""Exception taxonomy shared by all eulerlab modules."""


class EulerLabError(Exception):
    """Base class for all errors raised by this package."""


class InputError(EulerLabError, ValueError):
    """An argument is outside the documented domain of an operation."""


class ParseError(InputError):
    """A dataset file violates the fixture schema; names field and line."""

    def __init__(self, message, *, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class ValidationError(InputError):
    """A parsed value violates a documented invariant."""


class SingularCurveError(InputError):
    """Weierstrass coefficients with vanishing discriminant."""


class DomainError(EulerLabError, ArithmeticError):
    """A mathematically impossible value was encountered (guarded anyway)."""


class NearZeroError(DomainError):
    """L(E,s) is numerically indistinguishable from zero where a division is needed."""


class RangeError(InputError):
    """A resource guard or overflow guard was hit."""


class NumericalError(EulerLabError):
    """An iterative scheme failed to converge; carries the partial estimate."""

    def __init__(self, message, *, partial=None, estimate=None):
        super().__init__(message)
        self.partial = partial
        self.estimate = estimate


class PrecisionError(NumericalError):
    """Working precision is insufficient; names the failing point."""

    def __init__(self, message, *, at=None):
        super().__init__(message)
        self.at = at


class RankUndeterminedError(NumericalError):
    """All derivatives at the centre are below the detection threshold."""
