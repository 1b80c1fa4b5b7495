"""Semantic error hierarchy shared by all kahlerlab modules.

Every error is a ValueError so that careless callers still fail loudly; the
subclass names are part of the public contract and are matched by the CLI
when it renders machine-readable error JSON.
"""


class KahlerLabError(ValueError):
    """Base class for all domain errors raised by kahlerlab."""


# --- intersection data -------------------------------------------------------

class UnknownLabel(KahlerLabError):
    """A class vector references a label absent from the basis."""


class WrongArity(KahlerLabError):
    """A pairing was called with the wrong number of class arguments."""


class NotAmple(KahlerLabError):
    """An operation needed an ample-flagged class and did not get one."""


class DegeneratePolarization(KahlerLabError):
    """L^n = 0 where a positive-volume polarization is required."""


class DegenerateClass(KahlerLabError):
    """A symbolic class pairing vanished identically where it must not."""


class DimensionTooLow(KahlerLabError):
    """Operation undefined below the stated complex dimension."""


class NotAnticanonical(KahlerLabError):
    """The supplied class is not the anti-canonical class of the datum."""


class BadRank(KahlerLabError):
    """A sheaf rank outside [1, rank E]."""


class MissingPairing(KahlerLabError):
    """A required monomial pairing (c2 or subvariety) is absent."""


class InconsistentPairing(KahlerLabError):
    """Duplicate monomials with conflicting values in an input document."""


# --- toric -------------------------------------------------------------------

class NotSmooth(KahlerLabError):
    """Consecutive rays fail det = 1 or a ray is imprimitive."""


class NotComplete(KahlerLabError):
    """The fan's rays do not close up counterclockwise around the origin."""


class EmptyPolytope(KahlerLabError):
    """The polytope is empty or not full-dimensional."""


class NotNef(KahlerLabError):
    """Some facet offset of the polytope is not realized (class not nef)."""


class NoSections(KahlerLabError):
    """kP contains no lattice points."""


# --- radial profiles / functionals / solver ----------------------------------

class NotKahler(KahlerLabError):
    """Discrete positivity of the metric fails at some grid node."""


class ClassMismatch(KahlerLabError):
    """Cohomology classes (total volumes/slopes) disagree beyond tolerance."""


class PoissonFailure(KahlerLabError):
    """The discrete potential problem is singular beyond the constant kernel."""


class NoConvergence(KahlerLabError):
    """Newton continuation failed to reach the residual target.

    Carries the best iterate as `.result` so callers can inspect the
    diagnostics of a failed run.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


# --- curvlab -----------------------------------------------------------------

class OutOfChart(KahlerLabError):
    """Requested point lies outside the coordinate chart of the model."""
