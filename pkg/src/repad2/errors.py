"""Exception hierarchy shared by every module in the package."""


class Repad2Error(Exception):
    """Base class for all package errors."""


class ConfigurationError(Repad2Error, ValueError):
    pass


class NumericInputError(Repad2Error, ValueError):
    pass


class InvalidArgumentError(Repad2Error, ValueError):
    pass


class InsufficientHistoryError(Repad2Error, ValueError):
    pass


class EmptyStreamError(Repad2Error, ValueError):
    pass


class ColumnNotFoundError(Repad2Error, KeyError):
    pass


class ParseError(Repad2Error, ValueError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class IntegrityError(Repad2Error, ValueError):
    pass
