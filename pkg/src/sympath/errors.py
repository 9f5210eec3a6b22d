"""Exception hierarchy. Every failure mode raises a named subclass so callers
(and the CLI) can map errors to exit codes without string matching."""


class SympathError(Exception):
    """Base class for all errors raised by this package."""


class OddDimension(SympathError):
    pass


class NotSymplectic(SympathError):
    pass


class IllConditioned(SympathError):
    """A rank / signature / classification decision fell in the ambiguous
    tolerance band. The message names the offending eigenvalue."""


class OutOfDomain(SympathError):
    pass


class EndpointMismatch(SympathError):
    pass


class SchemaError(SympathError):
    pass


class OddRotation(SympathError):
    """Measured rotation number of a normalization tail was not even."""


class RefinementExhausted(SympathError):
    pass


class NotALoop(SympathError):
    pass


class NonIntegerResidual(SympathError):
    pass


class OnCycle(SympathError):
    """A matrix that must avoid eigenvalues +1/-1 has one."""


class HalfCircleMismatch(SympathError):
    pass


class NotFromIdentity(SympathError):
    pass


class Degenerate(SympathError):
    """Endpoint has eigenvalue 1; Conley-Zehnder route unavailable."""


class L0Degenerate(SympathError):
    pass


class ComponentPathFailure(SympathError):
    """A constructed extension left its fixed-sign component."""


class RouteMismatch(SympathError):
    pass


class NoAdmissiblePerturbation(SympathError):
    pass


class ConcavityUnavailable(SympathError):
    pass


class IrregularCrossing(SympathError):
    pass


class BranchTrackingFailure(SympathError):
    pass


class NonTransversalAfterPerturbation(SympathError):
    pass
