"""Exception hierarchy shared by all qpsf modules.

The CLI maps these onto exit codes: usage and configuration problems
exit 2, coverage/truncation guards exit 3, failed numerical checks
exit 4.
"""


class QpsfError(Exception):
    """Base class for all qpsf errors."""


class ConfigurationError(QpsfError):
    """Invalid grid, parameter, or argument combination."""


class DomainError(ConfigurationError):
    """Input is outside the mathematical domain of an operation."""


class ValidationError(QpsfError):
    """A constraint check on user-supplied data failed (e.g. a Cohen
    kernel that is not 1 on the axes, or an ordering function with
    Omega(0,0) != 1)."""


class TruncationError(QpsfError):
    """A coverage or truncation guard tripped: the grid or Fock cutoff
    cannot represent the requested state to the promised accuracy."""
