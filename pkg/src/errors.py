"""
Exception hierarchy for boselab.

Every failure raised by the geometry modules derives from BoseLabError.
Errors caused by bad input also derive from ValueError, so callers that
only care about "invalid argument" can keep catching ValueError.
"""


class BoseLabError(Exception):
    """Base class for all boselab errors."""


# ============================================================================
# fields
# ============================================================================


class NotPrime(BoseLabError, ValueError):
    pass


class ReducibleModulus(BoseLabError, ValueError):
    pass


class NotPrimitive(BoseLabError, ValueError):
    pass


class NoSexticModulus(BoseLabError):
    pass


class LevelMismatch(BoseLabError, ValueError):
    pass


class ZeroElement(BoseLabError, ValueError):
    pass


class NotInSubfield(BoseLabError, ValueError):
    pass


# ============================================================================
# projgeom
# ============================================================================


class MixedAmbient(BoseLabError, ValueError):
    pass


class MixedLevel(BoseLabError, ValueError):
    pass


class TooLarge(BoseLabError):
    """Enumeration would exceed the configured point cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"enumeration of {count} points exceeds cap {cap}")
        self.count = count
        self.cap = cap


class SingularMatrix(BoseLabError, ValueError):
    pass


# ============================================================================
# bose
# ============================================================================


class NotALine(BoseLabError, ValueError):
    pass


class PointAtInfinity(BoseLabError, ValueError):
    pass


class BoseConsistencyError(BoseLabError):
    """The formula route and the rational-points route disagree."""


# ============================================================================
# forms
# ============================================================================


class WrongArity(BoseLabError, ValueError):
    pass


class NotHomogeneous(BoseLabError, ValueError):
    pass


class DegenerateConic(BoseLabError, ValueError):
    pass


class FormSyntaxError(BoseLabError, ValueError):
    pass


class SamplingExhausted(BoseLabError):
    def __init__(self, found: int, wanted: int, draws: int):
        super().__init__(
            f"rejection sampling found {found} of {wanted} zeros in {draws} draws"
        )
        self.found = found
        self.wanted = wanted
        self.draws = draws


# ============================================================================
# substructures
# ============================================================================


class NotSpanning(BoseLabError, ValueError):
    pass


class PointOnTransversalLine(BoseLabError, ValueError):
    pass


class DegeneratePlanes(BoseLabError, ValueError):
    pass


class NotCollinear(BoseLabError, ValueError):
    pass


class NotDistinct(BoseLabError, ValueError):
    pass


class DegenerateQuadrangle(BoseLabError, ValueError):
    pass


class NotOnGamma(BoseLabError, ValueError):
    pass


class DependentSubspaces(BoseLabError, ValueError):
    pass


class ArityMismatch(BoseLabError, ValueError):
    pass


class KernelPoint(BoseLabError, ValueError):
    pass


# ============================================================================
# harness
# ============================================================================


class TooFewPlanes(BoseLabError, ValueError):
    pass


class UnknownSuite(BoseLabError, ValueError):
    def __init__(self, name: str, suggestions: list[str] | None = None):
        message = f"unknown suite '{name}'"
        if suggestions:
            message += f" (did you mean: {', '.join(suggestions)}?)"
        super().__init__(message)
        self.name = name
        self.suggestions = suggestions or []
