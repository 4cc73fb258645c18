"""Exception types shared by the library and the command line front end."""

from dataclasses import dataclass, field


class MergeWidthError(Exception):
    """Base class for every error raised by this package."""


class ParseError(MergeWidthError):
    def __init__(self, message, line=None, column=None, path=None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        super().__init__(str(self))

    def __str__(self):
        where = []
        if self.path is not None:
            where.append(str(self.path))
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.column is not None:
            where.append(f"column {self.column}")
        prefix = ":".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message


class InvalidInput(MergeWidthError, ValueError):
    """An operation received an object violating its precondition."""


class UnknownName(MergeWidthError, KeyError):
    """A symbol, element or node name that does not exist."""

    def __str__(self):
        return Exception.__str__(self)


class LimitExceeded(MergeWidthError):
    """A resource guard of an exponential search was hit."""


@dataclass(frozen=True)
class Report:
    """Outcome of a validator.

    Validators never raise on a violated condition; they return a report whose
    ``condition`` names the first violated clause and whose ``witness`` holds
    the offending objects.
    """

    ok: bool
    message: str = "ok"
    condition: str | None = None
    witness: tuple = ()
    notes: tuple = field(default=())

    def __bool__(self):
        return self.ok

    @classmethod
    def fail(cls, condition, message, *witness, notes=()):
        return cls(False, message, condition, tuple(witness), tuple(notes))
