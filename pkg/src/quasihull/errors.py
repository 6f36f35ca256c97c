"""Exception hierarchy.

Every failure that depends on the *values* of well-formed input derives from
:class:`DomainError`; malformed configuration documents raise
:class:`SchemaError`.  The CLI maps these to exit codes 2 and 3.
"""


class DomainError(ValueError):
    """Input is well-formed but outside the operation's domain."""


class SchemaError(ValueError):
    """A configuration or payload does not match its JSON schema."""


# projective line
class DegenerateQuadruple(DomainError):
    pass


class DegenerateTriple(DomainError):
    pass


class NonMonotone(DomainError):
    pass


# hyperbolic space
class CollinearInput(DomainError):
    pass


class NonJordanOrder(DomainError):
    pass


class NonDiskSide(DomainError):
    pass


class DegenerateHull(DomainError):
    pass


class PointOnCurve(DomainError):
    pass


# anti-de Sitter space
class NonUnitPoint(DomainError):
    pass


class NotAcausal(DomainError):
    pass


class ChartFailure(DomainError):
    pass


class NotTimelike(DomainError):
    pass


class PlanarHull(DomainError):
    pass


class NotSpacelike(DomainError):
    pass


class NotOnFace(DomainError):
    pass


class PlanarSide(DomainError):
    pass


class RouteMismatch(DomainError):
    pass


# laminations and earthquakes
class OnWeightedLeaf(DomainError):
    pass


class LeafEndpoint(DomainError):
    """Boundary evaluation hit a leaf endpoint; both one-sided limits are attached."""

    def __init__(self, message, limits=None):
        super().__init__(message)
        self.limits = limits


class CrossingInput(DomainError):
    pass


class ConstructionFailure(DomainError):
    def __init__(self, message, claim=None):
        super().__init__(message)
        self.claim = claim


class OrbitBudgetExceeded(DomainError):
    pass


# fundamental forms
class InvalidJet(DomainError):
    pass


class DegenerateShape(DomainError):
    pass


class SingularProjection(DomainError):
    pass


class CuspidalJet(DomainError):
    pass


# inverse search
class InfeasibleParams(DomainError):
    pass


class BudgetExhausted(DomainError):
    pass
