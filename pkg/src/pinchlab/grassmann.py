"""Brute-force sectional curvature over the Grassmannian of 2-planes.

An independent check on the extrema obtained from labeled eigenvalue triples:
Haar-random orthonormal pairs (u, v) are pushed through K = (u^v)^T R (u^v),
then the best samples are polished by small rotations of the plane.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from pinchlab.errors import NoConvergence, NonOrthonormalPlane
from pinchlab.frames import PAIRS, plucker
from pinchlab.spectra import ASD_BASIS, SD_BASIS

ORTHO_TOL = 1e-12
DEFAULT_SEED = 20240611
CHUNK = 1 << 16

_I = np.array([i for i, _ in PAIRS])
_J = np.array([j for _, j in PAIRS])


def wedge(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """u ^ v in the ordered pair basis; works on stacks of shape (..., 4)."""
    return u[..., _I] * v[..., _J] - u[..., _J] * v[..., _I]


@dataclass(frozen=True)
class PlaneSample:
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).reshape(4)
        v = np.asarray(self.v, dtype=float).reshape(4)
        err = max(abs(u @ u - 1.0), abs(v @ v - 1.0), abs(u @ v))
        if err > ORTHO_TOL:
            raise NonOrthonormalPlane(f"(u, v) fails orthonormality by {err:.2e}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def bivector(self) -> np.ndarray:
        return wedge(self.u, self.v)


def _matrix(R) -> np.ndarray:
    return np.asarray(getattr(R, "R", R), dtype=float)


def sectional_curvature(R, plane: PlaneSample) -> float:
    w = plane.bivector()
    return float(w @ _matrix(R) @ w)


def haar_planes(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """n orthonormal pairs from Gaussian 4x2 matrices, orthonormalized (Gram-Schmidt)."""
    g = rng.standard_normal((n, 4, 2))
    u = g[:, :, 0] / np.linalg.norm(g[:, :, 0], axis=1, keepdims=True)
    v = g[:, :, 1] - np.sum(u * g[:, :, 1], axis=1, keepdims=True) * u
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return u, v


@dataclass(frozen=True)
class SampleResult:
    max_K: float
    min_K: float
    argmax: PlaneSample
    argmin: PlaneSample
    n_samples: int
    violations: int  # samples outside the bracket, when one was given


def _chunk(R, seed_seq, n, bracket, tol):
    rng = np.random.default_rng(seed_seq)
    u, v = haar_planes(rng, n)
    w = wedge(u, v)
    K = np.einsum("na,ab,nb->n", w, R, w)
    imax, imin = int(np.argmax(K)), int(np.argmin(K))
    bad = 0
    if bracket is not None:
        bad = int(np.count_nonzero((K < bracket[1] - tol) | (K > bracket[0] + tol)))
    return K[imax], (u[imax], v[imax]), K[imin], (u[imin], v[imin]), bad


def sample_extrema(R, n_samples: int, seed: int = DEFAULT_SEED, bracket=None,
                   tol: float = 1e-9, threads: int = 1) -> SampleResult:
    """Approximate (max K, min K) over n_samples Haar-random planes.

    Chunks draw from independent children of SeedSequence(seed), so the result
    does not depend on the thread count.  bracket = (max_K, min_K) turns on the
    violation count with slack tol.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    R = _matrix(R)
    sizes = [CHUNK] * (n_samples // CHUNK)
    if n_samples % CHUNK:
        sizes.append(n_samples % CHUNK)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(seeds, sizes))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda j: _chunk(R, j[0], j[1], bracket, tol), jobs))
    else:
        parts = [_chunk(R, s, n, bracket, tol) for s, n in jobs]
    best = max(parts, key=lambda p: p[0])
    worst = min(parts, key=lambda p: p[2])
    return SampleResult(float(best[0]), float(worst[2]), _plane(*best[1]), _plane(*worst[3]),
                        n_samples, sum(p[4] for p in parts))


def _plane(u, v) -> PlaneSample:
    # re-orthonormalize against roundoff before validating
    u = u / np.linalg.norm(u)
    v = v - (u @ v) * u
    return PlaneSample(u, v / np.linalg.norm(v))


def sample_constrained_forms(R, n_samples: int, seed: int = DEFAULT_SEED) -> tuple[float, float]:
    """(max, min) of <R w, w> over w = (a^+ + a^-)/sqrt(2), a^+- unit self-dual / anti-self-dual.

    These are exactly the unit decomposable 2-forms, reached without going
    through vectors.
    """
    R = _matrix(R)
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n_samples, 3))
    b = rng.standard_normal((n_samples, 3))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    w = (a @ SD_BASIS + b @ ASD_BASIS) / math.sqrt(2.0)
    K = np.einsum("na,ab,nb->n", w, R, w)
    return float(K.max()), float(K.min())


# ---------------------------------------------------------------------------
# local polish


@dataclass(frozen=True)
class RefineResult:
    K: float
    plane: PlaneSample
    iterations: int
    converged: bool
    plucker_max: float  # largest |Pluecker form| seen along the trajectory


def _complete(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Orthogonal Q with Q[:, 0] = u, Q[:, 1] = v."""
    Q, _ = np.linalg.qr(np.column_stack([u, v, np.eye(4)]), mode="complete")
    Q = Q[:, :4]
    Q[:, 0], Q[:, 1] = u, v
    return Q


# rotations mixing the plane with its normal space
_GENERATORS = []
for _a in (0, 1):
    for _b in (2, 3):
        _G = np.zeros((4, 4))
        _G[_b, _a], _G[_a, _b] = 1.0, -1.0
        _GENERATORS.append(_G)
del _a, _b, _G


def refine_extrema(R, start: PlaneSample, maximize: bool = True, step: float = 0.1,
                   min_step: float = 1e-10, max_iter: int = 10_000) -> RefineResult:
    """Rotation-parametrized ascent (or descent) of K from start.

    Each step rotates the adapted frame Q = (u, v, n1, n2) by exp(s B) with B
    along the gradient in the four plane/normal generators.  Non-improving
    steps are rejected and halve s, so the objective is monotone.
    """
    R = _matrix(R)
    sgn = 1.0 if maximize else -1.0
    Q = _complete(start.u, start.v)
    w = wedge(Q[:, 0], Q[:, 1])
    K = float(w @ R @ w)
    pl = abs(float(plucker(w)))
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        Rw = R @ w
        grad = np.array([2.0 * Rw @ _dwedge(Q, G) for G in _GENERATORS])
        gn = float(np.linalg.norm(grad))
        if gn == 0.0:
            converged = True
            break
        B = sgn * sum(g * G for g, G in zip(grad / gn, _GENERATORS))
        Qn = Q @ scipy.linalg.expm(step * B)
        wn = wedge(Qn[:, 0], Qn[:, 1])
        Kn = float(wn @ R @ wn)
        if sgn * (Kn - K) > 0:
            Q, w, K = Qn, wn, Kn
            pl = max(pl, abs(float(plucker(w))))
            step = min(2.0 * step, 0.5)
        else:
            step *= 0.5
            if step < min_step:
                converged = True
                break
    if not converged:
        warnings.warn(NoConvergence(f"refine_extrema stopped after {max_iter} iterations"))
    return RefineResult(K, _plane(Q[:, 0], Q[:, 1]), it, converged, pl)


def _dwedge(Q: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Derivative of u ^ v along the rotation Q -> Q exp(t G) at t = 0."""
    dQ = Q @ G
    return wedge(dQ[:, 0], Q[:, 1]) + wedge(Q[:, 0], dQ[:, 1])


@dataclass(frozen=True)
class OracleReport:
    sampled: SampleResult
    refined_max: RefineResult
    refined_min: RefineResult


def oracle_extrema(R, n_samples: int, seed: int = DEFAULT_SEED, bracket=None,
                   tol: float = 1e-9, threads: int = 1) -> OracleReport:
    s = sample_extrema(R, n_samples, seed, bracket, tol, threads)
    return OracleReport(s, refine_extrema(R, s.argmax, True), refine_extrema(R, s.argmin, False))
