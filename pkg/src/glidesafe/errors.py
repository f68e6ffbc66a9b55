"""Exception hierarchy shared across the package."""


class GlidesafeError(Exception):
    """Base class for all package errors."""


class NoEquilibrium(GlidesafeError):
    """No gliding equilibrium exists in the searched flight path angle range."""


class DegenerateVelocity(GlidesafeError):
    """Ground velocity magnitude too small to define a flight path angle."""


class NoSolution(GlidesafeError):
    """Wind triangle has no consistent solution (wind too strong)."""


class AmbiguousSolution(GlidesafeError):
    """Wind triangle admits two ground speeds (only possible when v_a <= v_w)."""


class OutsideEnvelope(GlidesafeError):
    """Airspeed outside the admissible envelope."""


class AsinDomain(GlidesafeError):
    """Drag-to-weight ratio exceeds 1; arcsin undefined."""


class InsufficientSamples(GlidesafeError):
    """Too few samples for resampling or differencing."""


class Infeasible(GlidesafeError):
    """No guidance command in the search box satisfies the tangency constraints."""


class NoMatch(GlidesafeError):
    """Requested course change is not in the primitive table grid."""


class CellInfeasible(GlidesafeError):
    """The matched table cell holds an infeasible marker."""


class SchemaMismatch(GlidesafeError):
    """Primitive table file does not match the expected schema/fingerprint."""


class InvariantViolation(GlidesafeError):
    """Loaded data violates a structural invariant."""


class WindTriangleFailure(GlidesafeError):
    """Simulator could not solve the wind triangle at the current state."""


class NonFiniteState(GlidesafeError):
    """Simulation produced a non-finite state."""


class SequenceInfeasible(GlidesafeError):
    """A primitive sequence references an infeasible or missing table cell."""


class NoPath(GlidesafeError):
    """Planner exhausted the search space without reaching the goal."""


class EmptyInput(GlidesafeError):
    """Analysis called with no trajectories."""


class ConfigError(GlidesafeError):
    """Invalid or unreadable run configuration."""
