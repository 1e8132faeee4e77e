"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto process exit codes: usage problems exit 1,
data/instance problems exit 2, property violations exit 3.
"""


class ElectoError(Exception):
    """Base class for all electoengine errors."""


class UsageError(ElectoError):
    """Bad command-line arguments or configuration keys/values."""


class DataError(ElectoError):
    """Unreadable or malformed input data (edge lists, labels, fixtures)."""


class CapExceededError(DataError):
    """An exact/enumerative routine was asked to exceed its size cap."""


class PropertyViolation(ElectoError):
    """A verified model property failed on a concrete instance."""

    def __init__(self, prop: str, detail: str = ""):
        self.prop = prop
        self.detail = detail
        msg = f"property violated: {prop}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
