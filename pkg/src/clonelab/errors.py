"""Exception types shared across the package.

The CLI maps these onto exit codes: input and validation problems exit
with 2, resource-cap exhaustion exits with 3.  Negative mathematical
results are ordinary return values, never exceptions.
"""

from __future__ import annotations


class ClonelabError(Exception):
    """Base class for errors raised by this package."""


class ParseError(ClonelabError):
    """Malformed input text; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapExceeded(ClonelabError):
    """A configured resource cap would be exceeded; raised before the work starts."""


class InconsistentData(ClonelabError):
    """Input data violates a stated precondition (monotonicity, arity, ...)."""


class NonCanonicalOperation(ClonelabError):
    """An operation required to be canonical is not; carries the counterexample."""

    def __init__(self, message: str, counterexample=None):
        self.counterexample = counterexample
        super().__init__(message)


class UnsupportedTerm(ClonelabError):
    """Term shape outside the fragment an exact decision procedure covers."""


class UnsatisfiableSystem(ClonelabError):
    """No assignment into the searched clone satisfies the equation system."""


class EqualizerFailure(ClonelabError):
    """Two term evaluations disagree in order type, so no increasing map
    can equalize them; carries the stage and the offending equation."""

    def __init__(self, message: str, j: int, equation: str):
        self.j = j
        self.equation = equation
        super().__init__(message)
