"""Exception hierarchy shared by the library and the command line.

Every error carries the process exit code the CLI reports for it.
"""
from typing import Optional


class LsaError(Exception):
    exit_code = 4


class InputError(LsaError):
    """Bad input: malformed files, undeclared names, invalid arguments."""

    exit_code = 2


class ValidationError(InputError):
    pass


class CapacityError(InputError):
    pass


class ClosureError(InputError):
    pass


class ParseError(InputError):
    def __init__(
        self, message: str, line: int, column: int, hint: Optional[str] = None
    ):
        self.message = message
        self.line = line
        self.column = column
        self.hint = hint
        text = f"{line}:{column}: {message}"
        if hint:
            text += f" (hint: {hint})"
        super().__init__(text)


class NotSupportedError(LsaError):
    """The computation is outside the class this tool solves in closed form."""

    exit_code = 3


class InvariantViolation(LsaError):
    exit_code = 4
