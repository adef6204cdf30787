"""Exception hierarchy shared by all rotorlab modules."""


class RotorlabError(Exception):
    """Base class for all rotorlab errors."""


class DomainError(RotorlabError):
    """Coordinate outside the manifold's latitude domain (or at a singular endpoint)."""


class SingularMetric(RotorlabError):
    """Operation requested where the azimuthal coefficient h vanishes (coordinate pole)."""


class HemisphereError(RotorlabError):
    """Point lies on the lower sheet of the hyperboloid (z <= 0), not on the model surface."""


class GridTooCoarse(RotorlabError):
    """Finite-difference refinement failed to converge quadratically."""


class IncompatibleLayout(RotorlabError):
    """Grid layout does not match the boundary classification of the radial problem."""


class NonFiniteCoefficient(RotorlabError):
    """A discretized coefficient overflowed (node too close to a pole)."""


class ConvergenceFailure(RotorlabError):
    """Eigen-solver residual exceeded its contract bound."""


class PoleApproach(RotorlabError):
    """Trajectory came within h_min of a coordinate pole; integration halted.

    steps_done counts completed steps; record carries the partial trajectory.
    """

    def __init__(self, message, steps_done=None, record=None):
        super().__init__(message)
        self.steps_done = steps_done
        self.record = record


class StepRejected(RotorlabError):
    """Implicit solve failed to converge within the iteration budget.

    steps_done counts completed steps; record carries the partial trajectory.
    """

    def __init__(self, message, steps_done=None, record=None):
        super().__init__(message)
        self.steps_done = steps_done
        self.record = record


class NoAllowedRegion(RotorlabError):
    """Radial momentum squared is negative everywhere: no classically allowed motion."""


class ConfigError(RotorlabError):
    """Invalid or unknown run-configuration content."""
