"""Exception hierarchy shared by every spirkit module."""


class SpirkitError(ValueError):
    """Base class; `code` is the machine-readable tag printed by the CLI."""

    code = "ERROR"


class FieldError(SpirkitError):
    code = "FIELD"


class DimensionError(SpirkitError):
    code = "DIMENSION"


class AccessStructureError(SpirkitError):
    code = "ACCESS"


class ProtocolError(SpirkitError):
    code = "PROTOCOL"


class CannotReconstruct(SpirkitError):
    """The responding/holding set does not determine the secret."""

    code = "CANNOT_RECONSTRUCT"


class InvalidShares(SpirkitError):
    """Share or answer data is not the image of any secret/randomness pair."""

    code = "INVALID_SHARES"


class BudgetExceeded(SpirkitError):
    code = "BUDGET"


class NotFound(SpirkitError):
    code = "NOT_FOUND"


class InvariantViolation(RuntimeError):
    """Two routes that must agree did not; indicates a bug, never bad input."""

    code = "INVARIANT"
