"""Numeric Cartan engine for coframe fields on 4-dimensional charts.

Given a coframe field theta (a function from chart coordinates to a 4x4
matrix whose row I holds the coordinate components of theta^I), this module
computes exterior derivatives by central differences, solves the first
structure equation

    d theta^I = sum_J theta^J ^ omega^I_J

for the Levi-Civita connection, forms the curvature 2-forms

    Omega^I_J = d omega^I_J - sum_K omega^K_J ^ omega^I_K

and assembles the curvature operator on 2-forms in the orthonormal basis

    (12, 13, 14, 23, 24, 34)  (theta^1 ^ theta^2, ..., theta^3 ^ theta^4).

Frame indices are 0-based in code (theta^1 is row 0).  The orientation is
fixed by declaring theta^1 ^ theta^2 ^ theta^3 ^ theta^4 positive.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from pinchlab.errors import AsymmetryExceeded, DomainViolation, SingularFrame

# ordered 2-form basis
PAIRS: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PAIR_INDEX = {pq: a for a, pq in enumerate(PAIRS)}

# Hodge star on the basis above for the volume form theta^1234
HODGE = np.zeros((6, 6))
for _a, (_i, _j) in enumerate(PAIRS):
    _k, _l = [m for m in range(4) if m not in (_i, _j)]
    # theta^ij ^ theta^kl = sign * vol
    _sign = float(np.linalg.det(np.eye(4)[[_i, _j, _k, _l]]))
    HODGE[PAIR_INDEX[(_k, _l)], _a] = _sign
del _a, _i, _j, _k, _l, _sign

DEFAULT_STEP = 1e-5
# extrapolated differences tolerate (and need) a larger base step
RICHARDSON_STEP = 1e-3
DOMAIN_MARGIN = 1e-10


class Chart(enum.Enum):
    HALF_SPACE = "half_space"
    COMPLEX_BALL = "complex_ball"
    REAL_BALL = "real_ball"
    PEDERSEN_POLAR = "pedersen_polar"


@dataclass(frozen=True)
class ChartPoint:
    """Coordinates of a point in one of the named charts.

    HALF_SPACE: (rho, phi, zeta0, zetat0) with rho > 0.
    COMPLEX_BALL: (Re z1, Im z1, Re z2, Im z2) inside the unit ball.
    REAL_BALL: (w, x, y, z) inside the unit ball.
    PEDERSEN_POLAR: (varrho, theta, phi, psi), varrho in (0, 1) and Euler
    angles with theta in (0, pi).
    """

    chart: Chart
    coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float).reshape(4)
        object.__setattr__(self, "coords", c)

    def shifted(self, delta) -> "ChartPoint":
        return ChartPoint(self.chart, self.coords + np.asarray(delta, dtype=float))

    def __repr__(self):
        return f"ChartPoint({self.chart.name}, {np.array2string(self.coords, precision=6)})"


def boundary_distance(chart: Chart, x: np.ndarray) -> np.ndarray:
    """Per-coordinate distance to the nearest place where the chart degenerates.

    np.inf marks directions with no boundary.
    """
    x = np.asarray(x, dtype=float)
    if chart is Chart.HALF_SPACE:
        return np.array([x[0], np.inf, np.inf, np.inf])
    if chart in (Chart.COMPLEX_BALL, Chart.REAL_BALL):
        return np.full(4, 1.0 - math.sqrt(float(x @ x)))
    if chart is Chart.PEDERSEN_POLAR:
        return np.array([min(x[0], 1.0 - x[0]), min(x[1], math.pi - x[1]), np.inf, np.inf])
    raise ValueError(f"unknown chart {chart!r}")


def length_scale(chart: Chart, x: np.ndarray) -> np.ndarray:
    """Per-coordinate length over which the coframe varies appreciably:
    max(1, |x_mu|), capped by the distance to the nearest degenerate locus."""
    x = np.asarray(x, dtype=float)
    return np.minimum(np.maximum(1.0, np.abs(x)), boundary_distance(chart, x))


def check_domain(p: ChartPoint, margin: float = DOMAIN_MARGIN) -> None:
    """Raise DomainViolation unless p is strictly inside its chart (with margin)."""
    d = boundary_distance(p.chart, p.coords)
    if not np.all(np.isfinite(p.coords)) or np.any(d <= margin):
        raise DomainViolation(f"{p!r} is outside the {p.chart.value} chart domain")


@dataclass(frozen=True)
class CoframeField:
    """A coframe field on a chart: coords -> 4x4 matrix, row I = theta^I."""

    chart: Chart
    func: Callable[[np.ndarray], np.ndarray]
    name: str = "coframe"

    def __call__(self, p: ChartPoint) -> np.ndarray:
        if p.chart is not self.chart:
            raise DomainViolation(f"{self.name} lives on {self.chart.value}, got {p.chart.value}")
        check_domain(p)
        return np.asarray(self.func(p.coords), dtype=float)


def stencil_steps(p: ChartPoint, step: float) -> np.ndarray:
    """Per-coordinate finite-difference steps.

    step * max(1, |x_mu|), shrunk to step * length_scale where that is
    smaller, so that the stencil follows the geometry near the conformal
    boundary.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    return step * length_scale(p.chart, p.coords)


def default_step(richardson: bool) -> float:
    return RICHARDSON_STEP if richardson else DEFAULT_STEP


def partials(form_field: Callable[[ChartPoint], np.ndarray], p: ChartPoint,
             step: float | None = None, richardson: bool = False) -> np.ndarray:
    """Central-difference coordinate partials; result[mu] = d/dx^mu form_field(p).

    With richardson=True the O(h^2) term is eliminated from the estimates at
    h and h/2.
    """
    h = stencil_steps(p, default_step(richardson) if step is None else step)

    def central(hs):
        out = []
        for mu in range(4):
            e = np.zeros(4)
            e[mu] = hs[mu]
            fp = form_field(_stencil_point(p, e))
            fm = form_field(_stencil_point(p, -e))
            out.append((fp - fm) / (2.0 * hs[mu]))
        return np.stack(out)

    if not richardson:
        return central(h)
    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def _stencil_point(p: ChartPoint, delta: np.ndarray) -> ChartPoint:
    q = p.shifted(delta)
    try:
        check_domain(q)
    except DomainViolation as exc:
        raise DomainViolation(f"stencil point {q!r} left the chart domain") from exc
    return q


def exterior_derivative(form_field: Callable[[ChartPoint], np.ndarray], p: ChartPoint,
                        step: float | None = None, richardson: bool = False) -> np.ndarray:
    """Exterior derivative of a 1-form or 2-form field at p.

    A 1-form is given by its 4 coordinate components and yields an
    antisymmetric 4x4 array D with d(alpha) = sum_{mu<nu} D[mu, nu] dx^mu ^ dx^nu.
    A 2-form is given as such an antisymmetric 4x4 array and yields the
    totally antisymmetric 4x4x4 array of its exterior derivative.
    """
    check_domain(p)
    P = partials(form_field, p, step, richardson)
    if P.ndim == 2:
        return P - P.T
    if P.ndim == 3:
        # d_l b_mn + d_m b_nl + d_n b_lm
        return P + np.einsum("mnl->lmn", P) + np.einsum("nlm->lmn", P)
    raise ValueError("form_field must return 4 or 4x4 components")


def two_form_vector(A: np.ndarray) -> np.ndarray:
    """Antisymmetric 4x4 array(s) -> 6-vector(s) in the ordered pair basis."""
    A = np.asarray(A)
    return np.stack([A[..., i, j] for i, j in PAIRS], axis=-1)


def two_form_matrix(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    A = np.zeros(v.shape[:-1] + (4, 4))
    for a, (i, j) in enumerate(PAIRS):
        A[..., i, j] = v[..., a]
        A[..., j, i] = -v[..., a]
    return A


def plucker(v: np.ndarray) -> np.ndarray:
    """alpha ^ alpha / vol for 6-vector(s); zero iff decomposable."""
    v = np.asarray(v)
    return 2.0 * (v[..., 0] * v[..., 5] - v[..., 1] * v[..., 4] + v[..., 2] * v[..., 3])


@dataclass(frozen=True)
class ConnectionAtPoint:
    """Levi-Civita connection forms at a point.

    frame[I, J, K] = omega^I_J(e_K);  coords[I, J, mu] = omega^I_J(d/dx^mu).
    Both are antisymmetric in (I, J).  residual is the max abs value of the
    first structure equation evaluated in frame components.
    """

    frame: np.ndarray
    coords: np.ndarray
    residual: float


def _frame_inverse(theta: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(theta)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularFrame(f"coframe is singular (condition number {cond:.3e})")
    return np.linalg.inv(theta)


def structure_coefficients(dtheta: np.ndarray, E: np.ndarray) -> np.ndarray:
    """C[I, J, K] with d theta^I = 1/2 sum C[I, J, K] theta^J ^ theta^K.

    dtheta[I, mu, nu] are coordinate components, E[mu, J] the dual frame.
    """
    return np.einsum("imn,mj,nk->ijk", dtheta, E, E)


def connection_from_structure(C: np.ndarray) -> np.ndarray:
    """Unique antisymmetric Gamma[I, J, K] = omega^I_J(e_K) solving the first
    structure equation, C[I,J,K] = Gamma[I,J,K] - Gamma[I,K,J]."""
    return 0.5 * (C - np.einsum("jik->ijk", C) - np.einsum("kij->ijk", C))


def solve_connection(coframe_field: CoframeField, p: ChartPoint, step: float | None = None,
                     richardson: bool = False) -> ConnectionAtPoint:
    theta = coframe_field(p)
    E = _frame_inverse(theta)

    def theta_rows(q):
        return coframe_field(q)

    P = partials(theta_rows, p, step, richardson)  # P[mu, I, nu] = d_mu theta^I_nu
    dtheta = np.einsum("mIn->Imn", P) - np.einsum("nIm->Imn", P)
    C = structure_coefficients(dtheta, E)
    gamma = connection_from_structure(C)
    gamma = 0.5 * (gamma - np.einsum("jik->ijk", gamma))
    resid = C - (gamma - np.einsum("ikj->ijk", gamma))
    coords = np.einsum("ijk,km->ijm", gamma, theta)
    return ConnectionAtPoint(frame=gamma, coords=coords, residual=float(np.max(np.abs(resid))))


@dataclass(frozen=True)
class CurvatureForms:
    """frame[I, J, K, L] = Omega^I_J(e_K, e_L), antisymmetric in both pairs."""

    frame: np.ndarray
    connection: ConnectionAtPoint

    def vectors(self) -> np.ndarray:
        """vectors[I, J] = 6-vector of Omega^I_J in the ordered pair basis."""
        return two_form_vector(self.frame)


def curvature_forms(coframe_field: CoframeField, p: ChartPoint, step: float | None = None,
                    richardson: bool = False, outer_step: float | None = None) -> CurvatureForms:
    """Curvature 2-forms from the second structure equation.

    d omega is taken by central differences of the numerically solved
    connection; the outer stencil uses outer_step (defaults to 10 * step,
    which keeps the nested roundoff well below the truncation error).
    """
    if step is None:
        step = default_step(richardson)
    if outer_step is None:
        outer_step = 10.0 * step
    conn = solve_connection(coframe_field, p, step, richardson)
    theta = coframe_field(p)
    E = np.linalg.inv(theta)

    def omega_coords(q):
        return solve_connection(coframe_field, q, step, richardson).coords

    P = partials(omega_coords, p, outer_step, richardson)  # P[mu, I, J, nu]
    domega = np.einsum("mIJn->IJmn", P) - np.einsum("nIJm->IJmn", P)
    domega_frame = np.einsum("ijmn,mk,nl->ijkl", domega, E, E)
    g = conn.frame
    # (omega^K_J ^ omega^I_K)(e_A, e_B)
    quad = np.einsum("kja,ikb->ijab", g, g) - np.einsum("kjb,ika->ijab", g, g)
    omega2 = domega_frame - quad
    omega2 = 0.5 * (omega2 - np.einsum("jikl->ijkl", omega2))
    return CurvatureForms(frame=omega2, connection=conn)


@dataclass(frozen=True)
class CurvatureOperatorMatrix:
    """Curvature operator on 2-forms; column (IJ) is the 6-vector of Omega^I_J."""

    R: np.ndarray
    asymmetry: float = 0.0

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.R)


def operator_from_vectors(vectors: np.ndarray, tol: float | None = 1e-6) -> CurvatureOperatorMatrix:
    """Assemble the operator from vectors[I, J] (6-vector of Omega^I_J)."""
    vectors = np.asarray(vectors, dtype=float)
    R = np.empty((6, 6))
    for b, (i, j) in enumerate(PAIRS):
        R[:, b] = vectors[i, j]
    asym = float(np.max(np.abs(R - R.T)))
    if tol is not None and asym > tol:
        raise AsymmetryExceeded(asym, tol)
    return CurvatureOperatorMatrix(R=0.5 * (R + R.T), asymmetry=asym)


def curvature_operator(curv_forms: CurvatureForms | np.ndarray, tol: float | None = 1e-6) -> CurvatureOperatorMatrix:
    """Curvature operator from curvature forms (or their 4x4x6 vector array)."""
    if isinstance(curv_forms, CurvatureForms):
        vectors = curv_forms.vectors()
    else:
        vectors = np.asarray(curv_forms, dtype=float)
        if vectors.shape == (4, 4, 4, 4):
            vectors = two_form_vector(vectors)
    return operator_from_vectors(vectors, tol)


def numeric_operator(coframe_field: CoframeField, p: ChartPoint, step: float | None = None,
                     richardson: bool = False, tol: float | None = 1e-6) -> CurvatureOperatorMatrix:
    return curvature_operator(curvature_forms(coframe_field, p, step, richardson), tol)
