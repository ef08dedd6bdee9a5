"""Exception types shared across the package."""


class PinchlabError(Exception):
    """Base class for all pinchlab errors."""


class DomainViolation(PinchlabError, ValueError):
    """A point (or a finite-difference stencil point) lies outside its chart."""


class SingularFrame(PinchlabError, ValueError):
    """The coframe matrix is not invertible."""


class AsymmetryExceeded(PinchlabError):
    """The assembled curvature operator is not symmetric within tolerance."""

    def __init__(self, asymmetry: float, tol: float):
        super().__init__(f"curvature operator asymmetry {asymmetry:.3e} exceeds {tol:.1e}")
        self.asymmetry = asymmetry
        self.tol = tol


class NegativeParameter(PinchlabError, ValueError):
    """A parameter that must be non-negative was negative."""


class NonOrthonormalPlane(PinchlabError, ValueError):
    """A plane sample (u, v) is not orthonormal."""


class PoleAtPInfinity(DomainViolation):
    """Evaluation requested at the singular boundary point p_inf (south pole)."""


class NoConvergence(PinchlabError, RuntimeWarning):
    """An iterative refinement hit its iteration cap; the best iterate is still returned."""
