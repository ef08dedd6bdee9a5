"""Conformal structures at infinity of g^c (complex ball) and h^b (real ball).

Both boundary spheres use the stereographic chart based at the north pole,

    u = (X_1, X_2, X_3) / (1 + X_0),   X = ((1 - |u|^2), 2u) / (1 + |u|^2),

which covers everything except the south pole p_inf.  For the real sphere u
is exactly (x, y, z) / (1 + w).  For the complex sphere the ambient point is
(Re z1, Im z1, Re z2, Im z2).  Boundary metrics are 3x3 matrices in u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from pinchlab.coordinates import (
    complex_ball_forms, complex_pair, hb_metric_real_ball, oneloop_metric_complex_ball,
    real_quad, rho_of_ball,
)
from pinchlab.errors import DomainViolation, NegativeParameter, PoleAtPInfinity
from pinchlab.frames import Chart, ChartPoint

SPHERE_TOL = 1e-12


# ---------------------------------------------------------------------------
# points and the stereographic chart


def _on_sphere(X: np.ndarray) -> None:
    if abs(float(X @ X) - 1.0) > SPHERE_TOL:
        raise DomainViolation(f"point is off the unit sphere by {abs(float(X @ X) - 1.0):.2e}")
    if X[0] == -1.0:
        raise PoleAtPInfinity("the south pole has no stereographic coordinates")


@dataclass(frozen=True)
class BoundaryPointC:
    """A point of S^3 in C^2, stored as (Re z1, Im z1, Re z2, Im z2)."""

    coords: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.coords, dtype=float).reshape(4)
        _on_sphere(X)
        object.__setattr__(self, "coords", X)

    @classmethod
    def from_complex(cls, z1: complex, z2: complex) -> "BoundaryPointC":
        return cls(real_quad(complex(z1), complex(z2)))

    @property
    def z(self) -> tuple[complex, complex]:
        return complex_pair(self.coords)


@dataclass(frozen=True)
class BoundaryPointR:
    """A point (w, x, y, z) of S^3 in R^4."""

    coords: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.coords, dtype=float).reshape(4)
        _on_sphere(X)
        object.__setattr__(self, "coords", X)


def _coords(p) -> np.ndarray:
    return p.coords if isinstance(p, (BoundaryPointC, BoundaryPointR)) else np.asarray(p, dtype=float)


def stereo(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X[0] <= -1.0:
        raise PoleAtPInfinity("the south pole has no stereographic coordinates")
    return X[1:] / (1.0 + X[0])


def stereo_inverse(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    s = float(u @ u)
    return np.concatenate([[1.0 - s], 2.0 * u]) / (1.0 + s)


def stereo_jacobian(u) -> np.ndarray:
    """dX/du, a 4x3 matrix whose columns are tangent vectors of S^3."""
    u = np.asarray(u, dtype=float)
    s = float(u @ u)
    d = 1.0 + s
    J = np.empty((4, 3))
    J[0] = -4.0 * u / d ** 2
    J[1:] = 2.0 * np.eye(3) / d - 4.0 * np.outer(u, u) / d ** 2
    return J


def round_metric(u) -> np.ndarray:
    """Restriction of the Euclidean metric of R^4 to S^3, in the chart."""
    u = np.asarray(u, dtype=float)
    return 4.0 * np.eye(3) / (1.0 + float(u @ u)) ** 2


# ---------------------------------------------------------------------------
# g^c on the complex sphere


def _pullback_complex(form: np.ndarray, J: np.ndarray) -> np.ndarray:
    return form @ J


def _gc_forms(X: np.ndarray):
    z1, z2 = complex_pair(X)
    f = complex_ball_forms(z1, z2)
    J = stereo_jacobian(stereo(X))
    return _pullback_complex(f["Phi"], J), _pullback_complex(f["dchi"], J)


def boundary_metric_gc(c: float, p) -> np.ndarray:
    """(4 rho^2 g^c) restricted to the sphere: 2 (Re Phi)^2 + (1/2) (Im Phi)^2 + 8c |dchi|^2.

    Re Phi = d rho vanishes on the sphere, so only the last two terms survive.
    """
    if c < 0:
        raise NegativeParameter(f"c must be >= 0, got {c}")
    if c == 0:
        raise DomainViolation("the c = 0 class lives on the CR distribution; use boundary_metric_g0_cr")
    X = _coords(p)
    _on_sphere(X)
    phi, dchi = _gc_forms(X)
    G = 2.0 * np.outer(phi.real, phi.real) + 0.5 * np.outer(phi.imag, phi.imag)
    G += 8.0 * c * (np.outer(dchi.real, dchi.real) + np.outer(dchi.imag, dchi.imag))
    return G


@dataclass(frozen=True)
class CRFrame:
    """The two kernel fields of |Phi|^2.

    holomorphic: (a1, a2) with V1 = a1 d/dz1 + a2 d/dz2; V2 is its conjugate.
    real_basis: rows V1, V2 as complex 4-vectors over (d/dx1, d/dy1, d/dx2, d/dy2).
    """

    holomorphic: tuple[complex, complex]
    real_basis: np.ndarray
    residual: float


def _real_components(a1: complex, a2: complex, conjugate: bool) -> np.ndarray:
    # d/dz = (d/dx - i d/dy)/2, d/dzbar = (d/dx + i d/dy)/2
    s = 1j if conjugate else -1j
    return 0.5 * np.array([a1, s * a1, a2, s * a2])


def cr_kernel_fields(z1: complex, z2: complex) -> CRFrame:
    z1, z2 = complex(z1), complex(z2)
    if abs(1 + z1) == 0.0:
        raise PoleAtPInfinity("kernel fields are singular at z1 = -1")
    a1 = z2.conjugate()
    a2 = -(1 - abs(z2) ** 2 + z1.conjugate()) / (1 + z1)
    V = np.array([_real_components(a1, a2, False), _real_components(a1.conjugate(), a2.conjugate(), True)])
    phi = complex_ball_forms(z1, z2)["Phi"]
    # |Phi|^2 (V, .) = 0 needs both Phi(V) and conj(Phi)(V) to vanish
    res = max(max(abs(phi @ v), abs(np.conj(phi) @ v)) for v in V)
    return CRFrame((a1, a2), V, float(res))


def cr_plane(p) -> np.ndarray:
    """Real 4x2 basis of the CR distribution at a boundary point: v and i v for v = z2bar d/dz1 - z1bar d/dz2."""
    X = _coords(p)
    _on_sphere(X)
    z1, z2 = complex_pair(X)
    a = np.array([z2.conjugate(), -z1.conjugate()])
    v = real_quad(a[0], a[1])
    iv = real_quad(1j * a[0], 1j * a[1])
    return np.column_stack([v, iv])


def boundary_metric_g0_cr(p) -> np.ndarray:
    """|dchi|^2 on the CR distribution, as a 2x2 matrix in the basis of cr_plane."""
    X = _coords(p)
    z1, z2 = complex_pair(X)
    dchi = complex_ball_forms(z1, z2)["dchi"] @ cr_plane(p)
    return np.outer(dchi.real, dchi.real) + np.outer(dchi.imag, dchi.imag)


# ---------------------------------------------------------------------------
# h^b on the real sphere


def boundary_metric_hb(b: float, p) -> np.ndarray:
    """(1/2) (d(2u1) + (b/2)(u2 du3 - u3 du2))^2 + 2 (du2^2 + du3^2), u = (x, y, z)/(1 + w)."""
    if b < 0:
        raise NegativeParameter(f"b must be >= 0, got {b}")
    X = _coords(p)
    _on_sphere(X)
    u = stereo(X)
    a = np.array([2.0, -0.5 * b * u[2], 0.5 * b * u[1]])
    return 0.5 * np.outer(a, a) + 2.0 * np.diag([0.0, 1.0, 1.0])


@dataclass(frozen=True)
class Roundness:
    factor: float  # phi with G = phi * round
    off_scalar: float  # |G round^-1 - phi I|_max / phi


def roundness(G: np.ndarray, u) -> Roundness:
    ratio = G @ np.linalg.inv(round_metric(u))
    phi = float(np.trace(ratio)) / 3.0
    return Roundness(phi, float(np.abs(ratio - phi * np.eye(3)).max() / abs(phi)))


# ---------------------------------------------------------------------------
# rescaled interior metrics near the boundary


def _ray_point(X: np.ndarray, rho: float, rho_fn) -> np.ndarray:
    """r X with rho_fn(r X) = rho, by bisection on r in (0, 1)."""
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if rho_fn(mid * X) > rho:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17:
            break
    return lo * X


def _rho_complex(Y: np.ndarray) -> float:
    return rho_of_ball(*complex_pair(Y))


def _rho_real(Y: np.ndarray) -> float:
    w = Y[0]
    E = (1 + w) ** 2 + float(Y[1:] @ Y[1:])
    return (1 - float(Y @ Y)) / E


def rescaled_pullback_gc(c: float, p, rho: float, scale: float = 1.0) -> np.ndarray:
    """4 (scale rho)^2 g^c at the interior point on the ray through p with the given rho,
    evaluated on the chart tangent vectors of p."""
    X = _coords(p)
    _on_sphere(X)
    Y = _ray_point(X, rho, _rho_complex)
    r = _rho_complex(Y)
    g = oneloop_metric_complex_ball(c, ChartPoint(Chart.COMPLEX_BALL, Y))
    J = stereo_jacobian(stereo(X))
    return 4.0 * (scale * r) ** 2 * (J.T @ g @ J)


def rescaled_pullback_hb(b: float, p, rho: float, scale: float = 1.0) -> np.ndarray:
    X = _coords(p)
    _on_sphere(X)
    Y = _ray_point(X, rho, _rho_real)
    r = _rho_real(Y)
    g = hb_metric_real_ball(b, ChartPoint(Chart.REAL_BALL, Y))
    J = stereo_jacobian(stereo(X))
    return 4.0 * (scale * r) ** 2 * (J.T @ g @ J)


def extrapolated_pullback(pullback, param: float, p, rho: float) -> np.ndarray:
    """First-order extrapolation to rho = 0: 2 P(rho) - P(2 rho)."""
    return 2.0 * pullback(param, p, rho) - pullback(param, p, 2.0 * rho)


# ---------------------------------------------------------------------------
# blow-up at p_inf


def chordal_distance_to_pole(X) -> float:
    """|X - (-1, 0, 0, 0)| = sqrt(2 (1 + X_0)) on the unit sphere."""
    X = np.asarray(X, dtype=float)
    return math.sqrt(max(2.0 * (1.0 + X[0]), 0.0))


def conformal_anisotropy(G: np.ndarray, u) -> float:
    """lambda_max / lambda_min of G relative to the round metric.

    Invariant under G -> phi G, so it is a property of the conformal class.
    """
    ev = scipy.linalg.eigh(G, round_metric(u), eigvals_only=True)
    if ev[0] <= 0:
        raise DomainViolation("representative is not positive definite here")
    return float(ev[-1] / ev[0])


# generic approach directions; along the circle y = z = 0 the h^b twist vanishes
DEFAULT_REAL_DIRECTION = (0.0, 0.6, 0.8)
DEFAULT_COMPLEX_ANGLES = (0.7, 0.4)


def real_path(d: float, direction=DEFAULT_REAL_DIRECTION) -> np.ndarray:
    """Point of S^3 in R^4 at chordal distance d from the south pole."""
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    w = -1.0 + 0.5 * d * d
    return np.concatenate([[w], math.sqrt(1.0 - w * w) * n])


def complex_path(d: float, angles=DEFAULT_COMPLEX_ANGLES) -> np.ndarray:
    """Point of S^3 in C^2 at chordal distance d from (-1, 0), with arg(1 + z1) = angles[0]."""
    a, t = angles
    s = d * d / (2.0 * math.cos(a))
    z1 = -1.0 + s * complex(math.cos(a), math.sin(a))
    r = math.sqrt(max(1.0 - abs(z1) ** 2, 0.0))
    return real_quad(z1, r * complex(math.cos(t), math.sin(t)))


@dataclass(frozen=True)
class PoleFit:
    order: float  # -slope / 2
    slope: float  # of log(anisotropy) against log(distance)
    residual: float  # rms of the linear fit
    distances: np.ndarray
    anisotropy: np.ndarray


def pole_order_fit(metric, path, d_max: float = 1e-1, d_min: float = 1e-4, n: int = 31) -> PoleFit:
    """Least-squares blow-up rate of the conformal anisotropy approaching p_inf.

    metric(X) -> 3x3 representative, path(d) -> X at chordal distance d.  The
    anisotropy grows like d^(-2k) when the class has a pole of order k.
    """
    ds = np.logspace(math.log10(d_max), math.log10(d_min), n)
    kap = np.array([conformal_anisotropy(metric(path(d)), stereo(path(d))) for d in ds])
    A = np.column_stack([np.log(ds), np.ones(n)])
    coef, *_ = np.linalg.lstsq(A, np.log(kap), rcond=None)
    res = float(np.sqrt(np.mean((A @ coef - np.log(kap)) ** 2)))
    return PoleFit(-0.5 * float(coef[0]), float(coef[0]), res, ds, kap)


def pole_order_hb(b: float, direction=DEFAULT_REAL_DIRECTION, **kw) -> PoleFit:
    return pole_order_fit(lambda X: boundary_metric_hb(b, X), lambda d: real_path(d, direction), **kw)


def pole_order_gc(c: float, angles=DEFAULT_COMPLEX_ANGLES, **kw) -> PoleFit:
    return pole_order_fit(lambda X: boundary_metric_gc(c, X), lambda d: complex_path(d, angles), **kw)


def raw_norm_slope_gc(c: float, angles=DEFAULT_COMPLEX_ANGLES, e_max: float = 1e-1,
                      e_min: float = 1e-4, n: int = 31) -> float:
    """Slope of log |G|_F^2 against log |1 + z1| in the stereographic chart."""
    es, vals = np.logspace(math.log10(e_max), math.log10(e_min), n), []
    a = angles[0]
    for e in es:
        X = complex_path(math.sqrt(2.0 * e * math.cos(a)), angles)
        vals.append(float(np.sum(boundary_metric_gc(c, X) ** 2)))
    return float(np.polyfit(np.log(es), np.log(vals), 1)[0])
