"""Exception types shared across modules (the CLI maps them to error JSON)."""


class DirectionError(ValueError):
    """A chamber vector or sign pattern violates its invariants."""


class BoxError(ValueError):
    """Invalid coefficient-box parameters."""


class EnumerationCapError(RuntimeError):
    """A box is too large to enumerate; sample it instead."""


class NotSquarefreeError(ValueError):
    """Polynomial has a repeated root."""


class PrecisionError(RuntimeError):
    """A certified decision could not be reached below the precision cap."""


class DeterminantError(ValueError):
    """Companion matrix would not have determinant +1."""


class WallError(ValueError):
    """A tube touches a wall of the Weyl chamber."""


class CensusCapError(ValueError):
    """Census height bound exceeds the configured cap."""
