class QSumError(Exception):
    """Base class for errors raised by qsum."""


class PoleError(QSumError, ZeroDivisionError):
    """A denominator factor vanishes (to within the truncation threshold)."""


class SchemaError(QSumError, ValueError):
    """Parameters do not match an identity's schema or violate a hard domain constraint."""


class DomainError(SchemaError):
    """Well-formed parameters that sit on (or too close to) a pole or a forbidden zero."""
