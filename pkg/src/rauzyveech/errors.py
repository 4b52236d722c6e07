"""Exception hierarchy shared by the whole package."""


class RauzyVeechError(Exception):
    """Base class for all package errors."""


class TieError(RauzyVeechError):
    """The two rightmost interval lengths are equal: the induction step is undefined."""


class BoundaryError(RauzyVeechError):
    """A point sits on a subinterval endpoint where the exchange map is undefined."""


class IrreducibleError(RauzyVeechError):
    """An operation required an irreducible permutation but got a reducible one."""


class DiagramTooLarge(RauzyVeechError):
    """Diagram closure exceeded the configured vertex budget."""


class CommutationError(RauzyVeechError):
    """The covering map failed to commute with a Rauzy move (implementation bug)."""


class OpenPathError(RauzyVeechError):
    """A reduced-loop matrix was requested for a path that is not closed."""


class BaseMismatchError(RauzyVeechError):
    """A lift was requested from a labeled base that does not sit over the path start."""


class LoopBudgetExceeded(RauzyVeechError):
    """Loop enumeration produced more loops than the configured budget."""


class NegativeEntryError(RauzyVeechError):
    """A nonnegative matrix was required."""


class NoRootAboveOne(RauzyVeechError):
    """The polynomial has no real root strictly greater than 1."""


class IllConditionedError(RauzyVeechError):
    """Eigenvector extraction failed; the eigenvalue is not simple at working precision."""


class SelfIntersectionError(RauzyVeechError):
    """The suspension broken lines intersect; the polygon model does not apply
    and the surface would require the zippered-rectangle construction."""


class RotationMismatchError(RauzyVeechError):
    """The two suspension polygons are not images of each other under the
    requested rotation."""


class CertificationFailed(RauzyVeechError):
    """A pseudo-Anosov certificate failed one of its verification residuals."""


class GaussBonnetError(RauzyVeechError):
    """Singularity orders violate the Gauss-Bonnet constraint."""


class EndpointMismatchError(RauzyVeechError):
    """A family path did not end at the expected renumbering of its target."""
