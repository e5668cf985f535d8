"""Shared exception types and size-guard helpers."""

from __future__ import annotations

import os


class PCoverError(Exception):
    """Base class for all errors raised by this package."""


class InputError(PCoverError):
    """Malformed instance data, file content, or parameters."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class InfeasibleError(PCoverError):
    """The coverage target cannot be attained by any cover."""


class AuditError(PCoverError):
    """A machine-checked optimality or bound certificate failed."""


class SizeGuardError(PCoverError):
    """An exhaustive routine was asked to run above its configured size limit."""


class InternalInvariantError(PCoverError):
    """A structural invariant the algorithms guarantee was violated.

    Raised loudly: it signals a bug upstream, not bad user input.
    """


GUARD_ENV = "PCOVER_GUARD_OVERRIDE"


def guards_lifted() -> bool:
    return os.environ.get(GUARD_ENV) == "1"


def check_guard(ok: bool, message: str) -> None:
    """Raise SizeGuardError unless `ok` holds or the override env var is set."""
    if not ok and not guards_lifted():
        raise SizeGuardError(message + f" (set {GUARD_ENV}=1 to override)")
