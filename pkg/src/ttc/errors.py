"""Exception hierarchy shared by every ttc module."""


class TtcError(Exception):
    """Base class for all errors raised by this package."""


class InvalidAddress(TtcError):
    """A node address does not denote a node of the tree at hand."""


class PrefixConflict(TtcError):
    """Two substitution addresses overlap (one is a prefix of the other)."""


class AlphabetMismatch(TtcError):
    """A tree or machine uses a symbol outside the expected ranked alphabet."""


class UnknownState(TtcError):
    """A state id is not a state of the machine at hand."""


class NotLinearNondeleting(TtcError):
    """Fusion requires the second machine to be linear and nondeleting."""


class ChainTooShort(TtcError):
    """Chain reduction needs at least three stages."""


class InvalidProvenance(TtcError):
    """A construction expected states with a particular provenance shape."""


class ResourceLimit(TtcError):
    """A configured cap (output set size, state count, ...) was exceeded."""


class ValidationError(TtcError):
    """A machine, workspace, or tree violates a structural invariant."""


class TtcSyntaxError(TtcError):
    """Definition-language syntax error, with source location."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = "line %d, column %d: %s" % (line, column, message)
        super().__init__(message)


class ValidationWarning(UserWarning):
    """Non-fatal validation finding (e.g. an alphabet without rank-0 symbols)."""
