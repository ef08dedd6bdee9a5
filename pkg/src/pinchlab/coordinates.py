"""Changes of coordinates from the half-space chart to the two ball models.

Complex ball: (rho, phi, zeta0, zetat0) <-> (z1, z2) in the unit ball of C^2,

    W   = rho + |zeta|^2 / 2 - i phi,     zeta = zeta0 + i zetat0
    z1  = (1 - W) / (1 + W),              z2 = sqrt(2) zeta / (1 + W)

Real ball: (rho', phi', zeta'0, zeta't0) <-> (w, x, y, z) in the unit ball of
R^4.  In both cases p_inf is sent to the south pole (-1, 0, 0, 0).

Complex points are stored as four reals (Re z1, Im z1, Re z2, Im z2).
"""

from __future__ import annotations

import math

import numpy as np

from pinchlab.errors import DomainViolation, PoleAtPInfinity
from pinchlab.families import hb_metric, oneloop_metric
from pinchlab.frames import Chart, ChartPoint

SQRT2 = math.sqrt(2.0)
_BALL_MARGIN = 1e-10


def complex_pair(x) -> tuple[complex, complex]:
    a, b, c, d = np.asarray(x, dtype=float)
    return complex(a, b), complex(c, d)


def real_quad(z1: complex, z2: complex) -> np.ndarray:
    return np.array([z1.real, z1.imag, z2.real, z2.imag])


def _halfspace_coords(p) -> np.ndarray:
    if isinstance(p, ChartPoint):
        if p.chart is not Chart.HALF_SPACE:
            raise DomainViolation(f"expected a half-space point, got {p.chart.value}")
        return p.coords
    return np.asarray(p, dtype=float)


def _ball_coords(p, chart: Chart) -> np.ndarray:
    if isinstance(p, ChartPoint):
        if p.chart is not chart:
            raise DomainViolation(f"expected a {chart.value} point, got {p.chart.value}")
        return p.coords
    return np.asarray(p, dtype=float)


def to_complex_ball(p) -> ChartPoint:
    rho, phi, z0, zt = _halfspace_coords(p)
    if not rho > 0:
        raise DomainViolation(f"rho must be > 0, got {rho}")
    zeta = complex(z0, zt)
    W = rho + abs(zeta) ** 2 / 2 - 1j * phi
    z1 = (1 - W) / (1 + W)
    z2 = SQRT2 * zeta / (1 + W)
    return ChartPoint(Chart.COMPLEX_BALL, real_quad(z1, z2))


def from_complex_ball(p) -> ChartPoint:
    z1, z2 = complex_pair(_ball_coords(p, Chart.COMPLEX_BALL))
    if abs(z1) ** 2 + abs(z2) ** 2 >= 1 - _BALL_MARGIN:
        raise DomainViolation("point is not inside the unit ball of C^2")
    w = (1 - z1) / (1 + z1)
    chi = z2 / (1 + z1)
    rho = w.real - abs(chi) ** 2
    zeta = SQRT2 * chi
    return ChartPoint(Chart.HALF_SPACE, [rho, -w.imag, zeta.real, zeta.imag])


def rho_of_ball(z1: complex, z2: complex) -> float:
    """rho = (1 - |z1|^2 - |z2|^2) / |z1 + 1|^2."""
    if abs(z1 + 1) == 0.0:
        raise PoleAtPInfinity("rho is undefined at z1 = -1")
    return (1 - abs(z1) ** 2 - abs(z2) ** 2) / abs(z1 + 1) ** 2


# complex differentials over the real basis (d Re z1, d Im z1, d Re z2, d Im z2)
DZ1 = np.array([1, 1j, 0, 0])
DZ2 = np.array([0, 0, 1, 1j])


def complex_ball_forms(z1: complex, z2: complex) -> dict[str, np.ndarray]:
    """Differentials used by the complex-ball model, as complex 4-vectors.

    dw    = d((1 - z1)/(1 + z1))
    dchi  = d(z2/(1 + z1))
    Phi   = dw - 2 conj(z2)/(1 + conj(z1)) dchi
    """
    if abs(z1 + 1) == 0.0:
        raise PoleAtPInfinity("forms are singular at z1 = -1")
    dw = -2 / (1 + z1) ** 2 * DZ1
    dchi = DZ2 / (1 + z1) - z2 / (1 + z1) ** 2 * DZ1
    phi = dw - 2 * np.conj(z2) / (1 + np.conj(z1)) * dchi
    return {"dw": dw, "dchi": dchi, "Phi": phi}


def complex_ball_jacobian(p) -> np.ndarray:
    """d(rho, phi, zeta0, zetat0) / d(Re z1, Im z1, Re z2, Im z2), analytic."""
    z1, z2 = complex_pair(_ball_coords(p, Chart.COMPLEX_BALL))
    f = complex_ball_forms(z1, z2)
    chi = z2 / (1 + z1)
    drho = f["dw"].real - 2 * (np.conj(chi) * f["dchi"]).real
    return np.array([drho, -f["dw"].imag, SQRT2 * f["dchi"].real, SQRT2 * f["dchi"].imag])


def oneloop_metric_complex_ball(c: float, p) -> np.ndarray:
    """g^c pulled back to the complex ball (real 4x4 in (Re z1, Im z1, Re z2, Im z2))."""
    q = from_complex_ball(p)
    J = complex_ball_jacobian(p)
    return J.T @ oneloop_metric(c, q.coords) @ J


def to_real_ball(p) -> ChartPoint:
    rho, phi, z0, zt = _halfspace_coords(p)
    if not rho > 0:
        raise DomainViolation(f"rho' must be > 0, got {rho}")
    s = phi ** 2 / 4 + 2 * z0 ** 2 + 2 * zt ** 2
    D = (1 + rho) ** 2 + s
    return ChartPoint(Chart.REAL_BALL, [(1 - rho ** 2 - s) / D, phi / D,
                                        2 * SQRT2 * z0 / D, 2 * SQRT2 * zt / D])


def from_real_ball(p) -> ChartPoint:
    X = _ball_coords(p, Chart.REAL_BALL)
    w, x, y, z = X
    r2 = float(X @ X)
    if r2 >= 1 - _BALL_MARGIN:
        raise DomainViolation("point is not inside the unit ball of R^4")
    E = (1 + w) ** 2 + x * x + y * y + z * z
    return ChartPoint(Chart.HALF_SPACE, [(1 - r2) / E, 4 * x / E, SQRT2 * y / E, SQRT2 * z / E])


def real_ball_jacobian(p) -> np.ndarray:
    """d(rho', phi', zeta'0, zeta't0) / d(w, x, y, z), analytic."""
    X = _ball_coords(p, Chart.REAL_BALL)
    w, x, y, z = X
    E = (1 + w) ** 2 + x * x + y * y + z * z
    N = 1 - float(X @ X)
    dE = 2 * np.array([1 + w, x, y, z])
    dN = -2 * X

    def quot(num, dnum):
        return (dnum * E - num * dE) / E ** 2

    e = np.eye(4)
    return np.array([quot(N, dN), quot(4 * x, 4 * e[1]),
                     quot(SQRT2 * y, SQRT2 * e[2]), quot(SQRT2 * z, SQRT2 * e[3])])


def hb_metric_real_ball(b: float, p) -> np.ndarray:
    q = from_real_ball(p)
    J = real_ball_jacobian(p)
    return J.T @ hb_metric(b, q.coords) @ J
