"""Exception hierarchy for graphpass.

``GraphpassError`` covers invalid inputs and construction failures; the CLI
maps it to exit code 2.  ``SolverFailure`` covers runs that were set up
correctly but could not produce a certified solution; the CLI maps it to
exit code 1.
"""


class GraphpassError(Exception):
    """Base class for all graphpass errors."""


# ---------------------------------------------------------------- inputs

class NonpositiveWeight(GraphpassError):
    """An edge weight is zero or negative."""


class NonpositiveMeasure(GraphpassError):
    """A vertex measure is zero or negative."""


class UnknownVertex(GraphpassError):
    """An edge endpoint or lookup refers to a vertex that does not exist."""


class DuplicateEdge(GraphpassError):
    """The same unordered vertex pair appears more than once."""


class SelfLoop(GraphpassError):
    """An edge joins a vertex to itself."""


class InvalidFamilyParams(GraphpassError):
    """Parameters of a generated graph family are out of range."""


class DimensionMismatch(GraphpassError):
    """A vertex function does not align with the graph's vertex set."""


class NonFiniteValue(GraphpassError):
    """A vertex function contains NaN or infinite entries."""


class NonpositivePotential(GraphpassError):
    """The potential violates the positive lower bound requirement."""


class InvalidExponent(GraphpassError):
    """Power nonlinearity exponent must exceed 2."""


class InvalidSource(GraphpassError):
    """Perturbation source g must be nonnegative and not identically zero."""


class MissingDistanceBase(GraphpassError):
    """A distance-based check was requested without a base vertex."""


class GraphTooLarge(GraphpassError):
    """Graph exceeds the dense-oracle feasibility cap."""


class ZeroDirection(GraphpassError):
    """Ray direction must be nonnegative and not identically zero."""


class InvalidGrid(GraphpassError):
    """A scan grid needs at least two points and a positive extent."""


class NonpositiveRadius(GraphpassError):
    """Sphere or ball radius must be positive."""


class PerturbationRequired(GraphpassError):
    """The requested operation only makes sense with eps > 0 and a source g."""


# --------------------------------------------------------------- solvers

class SolverFailure(GraphpassError):
    """A solver ran but could not deliver a certified result."""


class NoConvergence(SolverFailure):
    """Iteration cap reached or the search stalled before the tolerance."""


class SingularJacobian(SolverFailure):
    """Newton linearization could not be solved."""


class NoDivergenceDirection(SolverFailure):
    """Ray scan found no point with negative energy to anchor the path."""


class NonpositiveSolution(SolverFailure):
    """A computed solution failed the strict positivity check."""


class NonnegativeMinimum(SolverFailure):
    """Ball minimization found no negative-energy point."""


class BoundaryContact(SolverFailure):
    """Constrained minimizer sits on the ball boundary instead of inside."""


class NotDistinct(SolverFailure):
    """The two solutions of the perturbed pair coincide."""
