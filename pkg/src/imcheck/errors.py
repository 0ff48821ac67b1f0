"""Exception types shared across the package."""


class ImcheckError(Exception):
    """Base class for all imcheck errors."""


class ParseError(ImcheckError):
    """Malformed input file. Carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(ImcheckError):
    """A model, automaton, or distribution violates a structural invariant."""


class ContractError(ImcheckError):
    """An operation was invoked outside its contract (wrong route, bad mode)."""


class ComplementRequiredError(ContractError):
    """A multi-pair automaton needs a user-supplied complement automaton."""
