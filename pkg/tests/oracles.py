"""Symbolic Cartan calculus with sympy, used as an independent oracle.

Coframes are written here directly from their defining formulas and
differentiated exactly; nothing is shared with the finite-difference engine
except the pair ordering of the 2-form basis.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import sympy as sp

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

rho, phi, z0, zt = sp.symbols("rho phi zeta0 zetat0", positive=True)
vr, th, ph, ps = sp.symbols("varrho theta phi_e psi", positive=True)
c_, b_, m2_ = sp.symbols("c b m2", nonnegative=True)
HALF = (rho, phi, z0, zt)
POLAR = (vr, th, ph, ps)


def oneloop_coframe_sym(c=c_):
    F = 1 / (2 * rho) * sp.sqrt((rho + 2 * c) / (rho + c))
    G = 1 / (2 * rho) * sp.sqrt((rho + c) / (rho + 2 * c))
    H = sp.sqrt(2 * (rho + 2 * c)) / (2 * rho)
    # theta^2 = G (d phi + zeta0 d zetat0 - zetat0 d zeta0)
    return sp.Matrix([[F, 0, 0, 0], [0, G, -G * zt, G * z0], [0, 0, 0, H], [0, 0, H, 0]])


def sigma_sym():
    """Left-invariant forms with d s_i = 2 s_j ^ s_k, rows over (d varrho, d theta, d phi, d psi)."""
    std = sp.Matrix([
        [0, sp.sin(ps), -sp.sin(th) * sp.cos(ps), 0],
        [0, sp.cos(ps), sp.sin(th) * sp.sin(ps), 0],
        [0, 0, sp.cos(th), 1],
    ])
    return -std / 2


def pedersen_coframe_sym(m2=m2_):
    s = sigma_sym()
    a = 1 + m2 * vr ** 2
    bb = 1 + m2 * vr ** 4
    pre = 1 / (1 - vr ** 2)
    rows = [pre * vr * sp.sqrt(a) * s.row(0), pre * vr * sp.sqrt(a) * s.row(1),
            pre * vr * sp.sqrt(bb / a) * s.row(2), sp.Matrix([[pre * sp.sqrt(a / bb), 0, 0, 0]])]
    return sp.Matrix.vstack(*rows)


def d1(form, X):
    """Exterior derivative of a 1-form given by components; returns 4x4 antisymmetric."""
    return sp.Matrix(4, 4, lambda m, n: sp.diff(form[n], X[m]) - sp.diff(form[m], X[n]))


@lru_cache(maxsize=None)
def _cached(kind: str, param: float):
    if kind == "oneloop":
        T, X = oneloop_coframe_sym(sp.nsimplify(param)), HALF
    else:
        T, X = pedersen_coframe_sym(sp.nsimplify(param)), POLAR
    E = T.inv()
    dT = [d1(T.row(i), X) for i in range(4)]
    C = [[[(E.col(j).T * dT[i] * E.col(k))[0, 0] for k in range(4)] for j in range(4)] for i in range(4)]
    Gam = [[[sp.Rational(1, 2) * (C[i][j][k] - C[j][i][k] - C[k][i][j]) for k in range(4)]
            for j in range(4)] for i in range(4)]
    # omega^I_J as coordinate 1-forms
    om = [[[sum(Gam[i][j][k] * T[k, m] for k in range(4)) for m in range(4)] for j in range(4)] for i in range(4)]
    return T, E, X, Gam, om


def oracle_at(kind: str, param: float, point) -> tuple[np.ndarray, np.ndarray]:
    """(Gamma[I, J, K], curvature operator 6x6) at the point, from exact derivatives."""
    T, E, X, Gam, om = _cached(kind, float(param))
    sub = dict(zip(X, [sp.Float(v, 30) for v in point]))
    ev = lambda e: float(sp.N(e.subs(sub), 20))
    G = np.array([[[ev(Gam[i][j][k]) for k in range(4)] for j in range(4)] for i in range(4)])
    En = np.array(E.subs(sub).evalf(20), dtype=float)
    omn = np.array([[[ev(om[i][j][m]) for m in range(4)] for j in range(4)] for i in range(4)])
    R = np.zeros((6, 6))
    for (i, j) in PAIRS:
        dom = np.array(d1(om[i][j], X).subs(sub).evalf(20), dtype=float)
        quad = np.zeros((4, 4))
        for k in range(4):
            a, b = omn[k][j], omn[i][k]
            quad += np.outer(a, b) - np.outer(b, a)
        Om = dom - quad
        Omf = En.T @ Om @ En  # Omega(e_a, e_b)
        col = PAIRS.index((i, j))
        for row, (a, b) in enumerate(PAIRS):
            R[row, col] = Omf[a, b]
    return G, R


def sigma_structure_residual(point) -> float:
    """max |d s_i - 2 s_j ^ s_k| over cyclic (i, j, k) at a point."""
    s = sigma_sym()
    sub = dict(zip(POLAR, point))
    worst = 0.0
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        ds = np.array(d1(s.row(i), POLAR).subs(sub).evalf(), dtype=float)
        sj = np.array(s.row(j).subs(sub).evalf(), dtype=float).ravel()
        sk = np.array(s.row(k).subs(sub).evalf(), dtype=float).ravel()
        wedge = np.outer(sj, sk) - np.outer(sk, sj)
        worst = max(worst, float(np.abs(ds - 2 * wedge).max()))
    return worst
