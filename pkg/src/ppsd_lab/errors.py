"""Exception hierarchy shared by all ppsd_lab modules."""


class PpsdLabError(Exception):
    """Base class for all errors raised by ppsd_lab."""


class InvariantViolation(PpsdLabError, ValueError):
    """A value failed one of its structural invariants.

    Examples: a non-Hermitian density matrix, a state vector that is not
    normalized, a negative damping rate.
    """


class DimensionMismatch(PpsdLabError, ValueError):
    """Operands live on Hilbert spaces of different dimension."""


class TruncationInsufficient(PpsdLabError, ValueError):
    """A truncated construction would leak too much weight past the cutoff."""


class QuadratureInsufficient(PpsdLabError, ValueError):
    """A quadrature-discretized operator family fails its completeness check."""


class IntegrationFailure(PpsdLabError, RuntimeError):
    """A propagated state violated its invariants beyond tolerance."""


class NormBlowUp(IntegrationFailure):
    """The nonlinear pure-state integrator lost normalization control."""
