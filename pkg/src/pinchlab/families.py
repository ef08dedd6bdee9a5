"""Closed-form metric families, their orthonormal coframes, and the
closed-form connection and curvature of the one-loop family.

Families
--------
oneloop   g^c, c >= 0, on the half-space chart (rho, phi, zeta0, zetat0)
hb        h^b, b >= 0, on the primed half-space chart; h^b ~ g^(1/b) for b > 0
pedersen  kappa^m (parametrized by m2 = m^2 >= 0) on the unit ball in polar
          coordinates (varrho, theta, phi, psi) with Euler angles on S^3

All connection and curvature components of g^c and h^b in the orthonormal
frame are homogeneous of degree zero in (rho, c).  They are evaluated at an
effective pair (rho, c): (rho, c) for g^c and (b * rho', 1) for h^b, so that
c = 0 and b = 0 are ordinary branches with no division by the parameter.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from pinchlab.errors import DomainViolation, NegativeParameter
from pinchlab.frames import (
    PAIR_INDEX,
    Chart,
    ChartPoint,
    CoframeField,
    ConnectionAtPoint,
    check_domain,
)


class Family(enum.Enum):
    ONELOOP = "oneloop"
    HB = "hb"
    PEDERSEN = "pedersen"


def _nonneg(name: str, value: float) -> float:
    value = float(value)
    if not value >= 0.0:
        raise NegativeParameter(f"{name} must be >= 0, got {value}")
    return value


@dataclass(frozen=True)
class OneLoopParams:
    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", _nonneg("c", self.c))


@dataclass(frozen=True)
class HbParams:
    b: float

    def __post_init__(self):
        object.__setattr__(self, "b", _nonneg("b", self.b))

    def as_oneloop(self) -> OneLoopParams:
        if self.b == 0.0:
            raise DomainViolation("h^0 has no one-loop counterpart (c = infinity)")
        return OneLoopParams(1.0 / self.b)


@dataclass(frozen=True)
class PedersenParams:
    m2: float

    def __post_init__(self):
        object.__setattr__(self, "m2", _nonneg("m2", self.m2))


CHART_OF = {
    Family.ONELOOP: Chart.HALF_SPACE,
    Family.HB: Chart.HALF_SPACE,
    Family.PEDERSEN: Chart.PEDERSEN_POLAR,
}


def make_params(family: Family, value: float):
    return {Family.ONELOOP: OneLoopParams, Family.HB: HbParams,
            Family.PEDERSEN: PedersenParams}[family](value)


# ---------------------------------------------------------------------------
# one-loop family and h^b


@dataclass(frozen=True)
class AuxiliaryFGH:
    F: float
    G: float
    H: float


def aux_fgh(rho: float, c: float) -> AuxiliaryFGH:
    """Coefficient functions of the g^c coframe."""
    if rho <= 0:
        raise DomainViolation(f"rho must be > 0, got {rho}")
    q = (rho + c) / (rho + 2 * c) if c > 0 else 1.0
    return AuxiliaryFGH(
        F=1.0 / (2 * rho) / math.sqrt(q),
        G=math.sqrt(q) / (2 * rho),
        H=math.sqrt(2 * (rho + 2 * c)) / (2 * rho),
    )


def _hb_coefficients(b: float, rho: float) -> AuxiliaryFGH:
    # h^b coefficients; the b -> 0 limit is smooth
    q = (b * rho + 1) / (b * rho + 2)
    return AuxiliaryFGH(
        F=1.0 / (2 * rho) / math.sqrt(q),
        G=math.sqrt(q) / (2 * rho),
        H=math.sqrt(2 * (b * rho + 2)) / (2 * rho),
    )


def _halfspace_coframe(aux: AuxiliaryFGH, x: np.ndarray, twist: float) -> np.ndarray:
    """Rows theta^1..theta^4 in the basis (d rho, d phi, d zeta0, d zetat0).

    theta^2 = G (d phi + twist*(zeta0 d zetat0 - zetat0 d zeta0)).
    """
    _, _, z0, zt = x
    return np.array([
        [aux.F, 0.0, 0.0, 0.0],
        [0.0, aux.G, -twist * aux.G * zt, twist * aux.G * z0],
        [0.0, 0.0, 0.0, aux.H],
        [0.0, 0.0, aux.H, 0.0],
    ])


def oneloop_coframe(c: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return _halfspace_coframe(aux_fgh(x[0], c), x, 1.0)


def hb_coframe(b: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x[0] <= 0:
        raise DomainViolation(f"rho' must be > 0, got {x[0]}")
    return _halfspace_coframe(_hb_coefficients(b, x[0]), x, b)


def _halfspace_metric(a_rho: float, a_phi: float, a_zeta: float, x: np.ndarray, twist: float) -> np.ndarray:
    # a_rho d rho^2 + a_phi (d phi + twist(...))^2 + a_zeta (d zeta0^2 + d zetat0^2)
    _, _, z0, zt = x
    v = np.array([0.0, 1.0, -twist * zt, twist * z0])
    g = a_phi * np.outer(v, v)
    g[0, 0] += a_rho
    g[2, 2] += a_zeta
    g[3, 3] += a_zeta
    return g


def oneloop_metric(c: float, x) -> np.ndarray:
    """g^c coefficient matrix, written directly from its defining formula."""
    x = np.asarray(x, dtype=float)
    rho = x[0]
    if rho <= 0:
        raise DomainViolation(f"rho must be > 0, got {rho}")
    pre = 1.0 / (4 * rho ** 2)
    return pre * _halfspace_metric((rho + 2 * c) / (rho + c), (rho + c) / (rho + 2 * c),
                                   2 * (rho + 2 * c), x, 1.0)


def hb_metric(b: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    rho = x[0]
    if rho <= 0:
        raise DomainViolation(f"rho' must be > 0, got {rho}")
    pre = 1.0 / (4 * rho ** 2)
    return pre * _halfspace_metric((b * rho + 2) / (b * rho + 1), (b * rho + 1) / (b * rho + 2),
                                   2 * (b * rho + 2), x, b)


def h0_metric(x) -> np.ndarray:
    """h^0 as displayed: (2 d rho^2 + d phi^2 / 2 + 4 |d zeta|^2) / (4 rho^2)."""
    rho = float(np.asarray(x, dtype=float)[0])
    if rho <= 0:
        raise DomainViolation(f"rho' must be > 0, got {rho}")
    return np.diag([2.0, 0.5, 4.0, 4.0]) / (4 * rho ** 2)


# ---------------------------------------------------------------------------
# Pedersen metric


def sigma_forms(x) -> np.ndarray:
    """Left-invariant coframe on S^3 in Euler angles, rows sigma_1..sigma_3
    over (d varrho, d theta, d phi, d psi).

    Normalized so that d sigma_i = sum_{j,k} eps_ijk sigma_j ^ sigma_k, i.e.
    d sigma_1 = 2 sigma_2 ^ sigma_3 and cyclic; sigma_1^2 + sigma_2^2 + sigma_3^2
    is then the unit round metric.
    """
    _, th, _, ps = np.asarray(x, dtype=float)
    s = -0.5
    return s * np.array([
        [0.0, math.sin(ps), -math.sin(th) * math.cos(ps), 0.0],
        [0.0, math.cos(ps), math.sin(th) * math.sin(ps), 0.0],
        [0.0, 0.0, math.cos(th), 1.0],
    ])


def _pedersen_check(x: np.ndarray) -> None:
    r, th = x[0], x[1]
    if not (0.0 < r < 1.0) or not (0.0 < th < math.pi):
        raise DomainViolation(f"Pedersen polar point out of domain: {x}")


def pedersen_coframe(m2: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    _pedersen_check(x)
    r = x[0]
    s = sigma_forms(x)
    a = 1.0 + m2 * r ** 2
    b = 1.0 + m2 * r ** 4
    pre = 1.0 / (1.0 - r ** 2)
    th = np.empty((4, 4))
    th[0] = pre * r * math.sqrt(a) * s[0]
    th[1] = pre * r * math.sqrt(a) * s[1]
    th[2] = pre * r * math.sqrt(b / a) * s[2]
    th[3] = np.array([pre * math.sqrt(a / b), 0.0, 0.0, 0.0])
    return th


def pedersen_metric(m2: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    _pedersen_check(x)
    r = x[0]
    s = sigma_forms(x)
    a = 1.0 + m2 * r ** 2
    b = 1.0 + m2 * r ** 4
    g = r ** 2 * a * (np.outer(s[0], s[0]) + np.outer(s[1], s[1]))
    g += r ** 2 * b / a * np.outer(s[2], s[2])
    g[0, 0] += a / b
    return g / (1.0 - r ** 2) ** 2


# ---------------------------------------------------------------------------
# dispatch


def _value(params) -> float:
    for attr in ("c", "b", "m2"):
        if hasattr(params, attr):
            return getattr(params, attr)
    raise TypeError(f"unknown params {params!r}")


def metric_at(family: Family, params, p: ChartPoint) -> np.ndarray:
    _expect_chart(family, p)
    fn = {Family.ONELOOP: oneloop_metric, Family.HB: hb_metric, Family.PEDERSEN: pedersen_metric}[family]
    return fn(_value(params), p.coords)


def coframe_at(family: Family, params, p: ChartPoint) -> np.ndarray:
    _expect_chart(family, p)
    fn = {Family.ONELOOP: oneloop_coframe, Family.HB: hb_coframe, Family.PEDERSEN: pedersen_coframe}[family]
    return fn(_value(params), p.coords)


def coframe_field(family: Family, params) -> CoframeField:
    fn = {Family.ONELOOP: oneloop_coframe, Family.HB: hb_coframe, Family.PEDERSEN: pedersen_coframe}[family]
    v = _value(params)
    return CoframeField(CHART_OF[family], lambda x: fn(v, x), name=f"{family.value}({v:g})")


def _expect_chart(family: Family, p: ChartPoint) -> None:
    if p.chart is not CHART_OF[family]:
        raise DomainViolation(f"{family.value} lives on {CHART_OF[family].value}, got {p.chart.value}")
    check_domain(p)


def effective_rho_c(family: Family, params, p: ChartPoint) -> tuple[float, float]:
    """(rho, c) at which the degree-zero closed forms are evaluated."""
    if family is Family.ONELOOP:
        return float(p.coords[0]), params.c
    if family is Family.HB:
        return params.b * float(p.coords[0]), 1.0
    raise ValueError("closed forms exist only for the oneloop and hb families")


def shape_ratio(rho: float, c: float) -> float:
    """t = rho / (rho + 2c); 1 at c = 0, 0 at rho = 0."""
    return rho / (rho + 2 * c)


# ---------------------------------------------------------------------------
# closed-form connection and curvature


def connection_coefficients(rho: float, c: float) -> tuple[float, float, float]:
    """(a12, a13, k) with omega^1_2 = a12 theta^2, omega^1_3 = a13 theta^3,
    omega^1_4 = a13 theta^4, omega^2_3 = -k theta^4, omega^2_4 = k theta^3,
    omega^3_4 = k theta^2.  The factor 1/F(rho) is already multiplied in."""
    if rho < 0 or c < 0 or rho + c == 0:
        raise DomainViolation(f"need rho, c >= 0 not both zero; got ({rho}, {c})")
    sq = math.sqrt((rho + c) / (rho + 2 * c))
    a12 = sq * (2 * rho ** 2 + 5 * c * rho + 4 * c ** 2) / ((rho + c) * (rho + 2 * c))
    a13 = sq * (rho + 4 * c) / (rho + 2 * c)
    k = sq * rho / (rho + 2 * c)
    return a12, a13, k


def connection_frame(rho: float, c: float) -> np.ndarray:
    """Gamma[I, J, K] = omega^I_J(e_K) from the closed forms."""
    a12, a13, k = connection_coefficients(rho, c)
    g = np.zeros((4, 4, 4))
    entries = {(0, 1, 1): a12, (0, 2, 2): a13, (0, 3, 3): a13,
               (1, 2, 3): -k, (1, 3, 2): k, (2, 3, 1): k}
    for (i, j, kk), v in entries.items():
        g[i, j, kk] = v
        g[j, i, kk] = -v
    return g


def closed_connection(family: Family, params, p: ChartPoint) -> ConnectionAtPoint:
    rho, c = effective_rho_c(family, params, p)
    gamma = connection_frame(rho, c)
    theta = coframe_at(family, params, p)
    return ConnectionAtPoint(frame=gamma, coords=np.einsum("ijk,km->ijm", gamma, theta), residual=0.0)


def closed_connection_oneloop(c: float, p: ChartPoint) -> ConnectionAtPoint:
    return closed_connection(Family.ONELOOP, OneLoopParams(c), p)


def curvature_coefficients(rho: float, c: float) -> tuple[float, float, float]:
    """(A_I, A_II, A_III) of the one-loop curvature forms."""
    if rho < 0 or c < 0 or rho + c == 0:
        raise DomainViolation(f"need rho, c >= 0 not both zero; got ({rho}, {c})")
    den = (rho + 2 * c) ** 3
    tail = 12 * c * rho ** 2 + 24 * c ** 2 * rho + 16 * c ** 3
    return (4 * rho ** 3 + tail) / den, (rho ** 3 + tail) / den, -rho ** 3 / den


def curvature_vectors(A_I: float, A_II: float, A_III: float) -> np.ndarray:
    """vectors[I, J] = 6-vector of Omega^I_J in the ordered pair basis."""
    e = np.eye(6)
    P = PAIR_INDEX
    rows = {
        (0, 1): -A_I * e[P[0, 1]] + 2 * A_III * e[P[2, 3]],
        (0, 2): -A_II * e[P[0, 2]] + A_III * e[P[1, 3]],
        (0, 3): -A_II * e[P[0, 3]] - A_III * e[P[1, 2]],
        (1, 2): -A_III * e[P[0, 3]] - A_II * e[P[1, 2]],
        (1, 3): A_III * e[P[0, 2]] - A_II * e[P[1, 3]],
        (2, 3): 2 * A_III * e[P[0, 1]] - A_I * e[P[2, 3]],
    }
    v = np.zeros((4, 4, 6))
    for (i, j), row in rows.items():
        v[i, j] = row
        v[j, i] = -row
    return v


@dataclass(frozen=True)
class OneLoopCurvature:
    A_I: float
    A_II: float
    A_III: float
    vectors: np.ndarray  # vectors[I, J] = Omega^I_J as a 6-vector


def closed_curvature(family: Family, params, p: ChartPoint) -> OneLoopCurvature:
    rho, c = effective_rho_c(family, params, p)
    A = curvature_coefficients(rho, c)
    return OneLoopCurvature(*A, vectors=curvature_vectors(*A))


def closed_curvature_oneloop(c: float, p: ChartPoint) -> OneLoopCurvature:
    return closed_curvature(Family.ONELOOP, OneLoopParams(c), p)


# ---------------------------------------------------------------------------
# h^b <-> g^(1/b)


def hb_pullback_check(b: float, x) -> tuple[np.ndarray, np.ndarray]:
    """(h^b at x', pullback of g^(1/b) along (rho, phi, zeta) = (rho', phi', sqrt(b) zeta'))."""
    b = _nonneg("b", b)
    if b == 0.0:
        raise DomainViolation("the identification needs b > 0")
    x = np.asarray(x, dtype=float)
    J = np.diag([1.0, 1.0, math.sqrt(b), math.sqrt(b)])
    g = oneloop_metric(1.0 / b, J @ x)
    return hb_metric(b, x), J.T @ g @ J
