"""Exception hierarchy for mobiusfold."""


class MobiusFoldError(Exception):
    """Base class for all library errors."""


class NoGenericDirection(MobiusFoldError):
    pass


class DegenerateCrossing(MobiusFoldError):
    pass


class NotDevelopable(MobiusFoldError):
    pass


class LayerConflict(MobiusFoldError):
    pass


class NonPlanarFace(MobiusFoldError):
    pass


class LayerViolations(MobiusFoldError):
    """Raised when an operation requires a physically stackable state."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} layer violation(s): {lines}")


class OpenCurve(MobiusFoldError):
    pass


class OddCrossingSum(MobiusFoldError):
    pass


class InvalidCode(MobiusFoldError):
    pass


class TooManyCrossings(MobiusFoldError):
    pass


class DegenerateProfile(MobiusFoldError):
    pass


class JointCollision(MobiusFoldError):
    pass


class UnknownModel(MobiusFoldError, KeyError):
    pass


class ModelFormatError(MobiusFoldError, ValueError):
    pass


class GluingMismatch(MobiusFoldError):
    """Glued edges do not coincide in the folded state."""
