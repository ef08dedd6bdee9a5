"""Spectral analysis of curvature operators on 2-forms.

Closed-form spectra of the one-loop family and of the Pedersen metric, the
sectional-curvature extrema of an Einstein 4-manifold from its self-dual and
anti-self-dual eigenvalue triples, the pinching function, Ricci and Weyl
extraction, and the Pedersen sign classification.

Duality labels follow the orientation theta^1234 > 0 used by frames.HODGE.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from pinchlab.errors import DomainViolation, NegativeParameter
from pinchlab.frames import HODGE, PAIRS, PAIR_INDEX, two_form_matrix, two_form_vector

_S = 1.0 / math.sqrt(2.0)
_E = np.eye(6)


def _vec(*terms) -> np.ndarray:
    v = np.zeros(6)
    for coef, pair in terms:
        v += coef * _E[PAIR_INDEX[pair]]
    return v


# alpha^+-_{JKL} = theta^1 ^ theta^J +- theta^K ^ theta^L, (JKL) cyclic in (234)
ALPHA_PLUS = np.array([_vec((1, (0, 1)), (1, (2, 3))),
                       _vec((1, (0, 2)), (-1, (1, 3))),
                       _vec((1, (0, 3)), (1, (1, 2)))])
ALPHA_MINUS = np.array([_vec((1, (0, 1)), (-1, (2, 3))),
                        _vec((1, (0, 2)), (1, (1, 3))),
                        _vec((1, (0, 3)), (-1, (1, 2)))])
# beta^+-_{IJK} = theta^I ^ theta^J +- theta^K ^ theta^4, (IJK) cyclic in (123)
BETA_PLUS = np.array([_vec((1, (0, 1)), (1, (2, 3))),
                      _vec((1, (1, 2)), (1, (0, 3))),
                      _vec((-1, (0, 2)), (1, (1, 3)))])
BETA_MINUS = np.array([_vec((1, (0, 1)), (-1, (2, 3))),
                       _vec((1, (1, 2)), (-1, (0, 3))),
                       _vec((-1, (0, 2)), (-1, (1, 3)))])

# orthonormal bases of the self-dual and anti-self-dual 2-forms
SD_BASIS = ALPHA_PLUS * _S
ASD_BASIS = ALPHA_MINUS * _S


# ---------------------------------------------------------------------------
# closed-form spectra


@dataclass(frozen=True)
class SpectrumOneLoop:
    """lambda^+_234 (simple), lambda^- (triple, = -2), lambda^+_342 = lambda^+_423 (double)."""

    lambda_plus_234: float
    lambda_minus_common: float
    lambda_plus_342: float

    def self_dual(self) -> np.ndarray:
        return np.array([self.lambda_plus_234, self.lambda_plus_342, self.lambda_plus_342])

    def anti_self_dual(self) -> np.ndarray:
        return np.full(3, self.lambda_minus_common)

    def values(self) -> np.ndarray:
        return np.sort(np.concatenate([self.self_dual(), self.anti_self_dual()]))

    def operator(self) -> np.ndarray:
        """The operator with this spectrum on the alpha eigenbasis."""
        return _from_eigenbasis(ALPHA_PLUS, self.self_dual(), ALPHA_MINUS, self.anti_self_dual())


def _from_eigenbasis(plus, lam_plus, minus, lam_minus) -> np.ndarray:
    # basis vectors have norm sqrt(2)
    R = np.zeros((6, 6))
    for v, lam in zip(np.vstack([plus, minus]), np.concatenate([lam_plus, lam_minus])):
        R += 0.5 * lam * np.outer(v, v)
    return R


def _spectrum_from_t(t: float) -> SpectrumOneLoop:
    t3 = t ** 3
    return SpectrumOneLoop(-2.0 * (1.0 + 2.0 * t3), -2.0, -2.0 * (1.0 - t3))


def spectrum_oneloop(rho_tilde: float) -> SpectrumOneLoop:
    """Spectrum of g^c (c > 0) as a function of rho_tilde = rho / c."""
    rho_tilde = float(rho_tilde)
    if not rho_tilde >= 0:
        raise NegativeParameter(f"rho_tilde must be >= 0, got {rho_tilde}")
    if math.isinf(rho_tilde):
        return _spectrum_from_t(1.0)
    return _spectrum_from_t(rho_tilde / (rho_tilde + 2.0))


def spectrum_oneloop_c0() -> SpectrumOneLoop:
    """The rho-independent spectrum of the complex hyperbolic metric g^0."""
    return _spectrum_from_t(1.0)


def spectrum_oneloop_at(rho: float, c: float) -> SpectrumOneLoop:
    if c < 0:
        raise NegativeParameter(f"c must be >= 0, got {c}")
    if rho < 0 or rho + c == 0:
        raise DomainViolation(f"need rho >= 0 and rho + c > 0, got ({rho}, {c})")
    return _spectrum_from_t(rho / (rho + 2.0 * c))


def pedersen_mu(varrho: float, m2: float) -> float:
    """m^2 (1 - varrho^2)^3 / (m^2 varrho^2 + 1)^3."""
    return m2 * (1.0 - varrho ** 2) ** 3 / (m2 * varrho ** 2 + 1.0) ** 3


@dataclass(frozen=True)
class SpectrumPedersen:
    """nu^+ (triple, = -4), nu^-_123 (simple), nu^-_231 = nu^-_312 (double)."""

    nu_plus: float
    nu_minus_123: float
    nu_minus_231: float

    def self_dual(self) -> np.ndarray:
        return np.full(3, self.nu_plus)

    def anti_self_dual(self) -> np.ndarray:
        return np.array([self.nu_minus_123, self.nu_minus_231, self.nu_minus_231])

    def values(self) -> np.ndarray:
        return np.sort(np.concatenate([self.self_dual(), self.anti_self_dual()]))

    def operator(self) -> np.ndarray:
        return _from_eigenbasis(BETA_PLUS, self.self_dual(), BETA_MINUS, self.anti_self_dual())


def _check_pedersen(varrho: float, m2: float) -> None:
    if m2 < 0:
        raise NegativeParameter(f"m2 must be >= 0, got {m2}")
    if not 0.0 <= varrho < 1.0:
        raise DomainViolation(f"varrho must lie in [0, 1), got {varrho}")


def spectrum_pedersen(varrho: float, m2: float) -> SpectrumPedersen:
    _check_pedersen(varrho, m2)
    mu = pedersen_mu(varrho, m2)
    return SpectrumPedersen(-4.0, -4.0 * (1.0 - 2.0 * mu), -4.0 * (1.0 + mu))


def pedersen_extrema(varrho: float, m2: float) -> tuple[float, float]:
    """Closed-form (max K, min K) of the Pedersen metric."""
    _check_pedersen(varrho, m2)
    mu = pedersen_mu(varrho, m2)
    return -4.0 * (1.0 - mu), -4.0 * (1.0 + mu / 2.0)


# ---------------------------------------------------------------------------
# extrema and pinching


def sectional_extrema(self_dual, anti_self_dual) -> tuple[float, float]:
    """(max K, min K) for an Einstein curvature operator with the given
    self-dual and anti-self-dual eigenvalue triples."""
    sd = np.asarray(self_dual, dtype=float)
    asd = np.asarray(anti_self_dual, dtype=float)
    return 0.5 * (sd.max() + asd.max()), 0.5 * (sd.min() + asd.min())


def _pinching_denominator(rt: float) -> float:
    return 4 * rt ** 3 + 12 * rt ** 2 + 24 * rt + 16


def _check_rho_tilde(rt: float) -> float:
    rt = float(rt)
    if not rt > 0:
        raise NegativeParameter(f"rho_tilde must be > 0, got {rt}")
    return rt


def pinching_oneloop(rho_tilde: float) -> float:
    """Pointwise pinching max K / min K of g^c at rho / c = rho_tilde."""
    rt = _check_rho_tilde(rho_tilde)
    if math.isinf(rt):
        return 0.25
    return (rt ** 3 + 12 * rt ** 2 + 24 * rt + 16) / _pinching_denominator(rt)


def pinching_gaps(rho_tilde: float) -> tuple[float, float]:
    """(delta - 1/4, 1 - delta) without cancellation.

    delta - 1/4 = (9 t^2 + 18 t + 12) / D and 1 - delta = 3 t^3 / D.  Both stay
    resolvable where delta itself rounds to 1/4 or 1.
    """
    rt = _check_rho_tilde(rho_tilde)
    D = _pinching_denominator(rt)
    return (9 * rt ** 2 + 18 * rt + 12) / D, 3 * rt ** 3 / D


class Sign(enum.Enum):
    ALL_NEGATIVE = "AllNegative"
    ZERO_AT_ORIGIN = "ZeroAtOrigin"
    MIXED_SIGNS = "MixedSigns"


@dataclass(frozen=True)
class PedersenNegativity:
    classification: Sign
    rho2_crit: float | None  # max K >= 0 exactly for varrho^2 <= rho2_crit


def pedersen_threshold(m2: float) -> float:
    """(m^(2/3) - 1) / (m^2 + m^(2/3)), with m^(2/3) taken as cbrt(m^2)."""
    if m2 < 0:
        raise NegativeParameter(f"m2 must be >= 0, got {m2}")
    m23 = float(np.cbrt(m2))
    return (m23 - 1.0) / (m2 + m23) if m2 > 0 else -math.inf


def pedersen_negativity(m2: float) -> PedersenNegativity:
    thr = pedersen_threshold(m2)
    if m2 < 1:
        return PedersenNegativity(Sign.ALL_NEGATIVE, None)
    if m2 == 1:
        return PedersenNegativity(Sign.ZERO_AT_ORIGIN, thr)
    return PedersenNegativity(Sign.MIXED_SIGNS, thr)


@dataclass(frozen=True)
class PinchingReport:
    max_K: float
    min_K: float
    delta: float | None
    spectrum: tuple[float, ...]
    location: tuple[float, ...] = ()
    params: dict = field(default_factory=dict)
    classification: str | None = None


def pinching_report(self_dual, anti_self_dual, location=(), params=None,
                    classification: str | None = None) -> PinchingReport:
    """Extrema and pinching from labeled triples; delta only where max K < 0."""
    mx, mn = sectional_extrema(self_dual, anti_self_dual)
    delta = mx / mn if mx < 0 else None
    values = tuple(float(v) for v in np.concatenate([self_dual, anti_self_dual]))
    return PinchingReport(mx, mn, delta, values, tuple(float(v) for v in location),
                          dict(params or {}), classification)


# ---------------------------------------------------------------------------
# operator-level extraction


def curvature_tensor(R: np.ndarray) -> np.ndarray:
    """Rm[I, J, K, L] = <R(theta^I ^ theta^J), theta^K ^ theta^L>."""
    R = np.asarray(R, dtype=float)
    # columns as 4x4 antisymmetric arrays
    cols = two_form_matrix(R.T)  # cols[b] = image of basis pair b
    Rm = np.zeros((4, 4, 4, 4))
    for b, (i, j) in enumerate(PAIRS):
        Rm[i, j] = cols[b]
        Rm[j, i] = -cols[b]
    return Rm


def ricci_from_operator(R) -> np.ndarray:
    """Rc[I, J] = sum_K <R(theta^I ^ theta^K), theta^J ^ theta^K>."""
    Rm = curvature_tensor(getattr(R, "R", R))
    return np.einsum("ikjk->ij", Rm)


def ricci_wedge_id(Rc: np.ndarray) -> np.ndarray:
    """Matrix of theta^I ^ theta^J -> Rc(theta^I) ^ theta^J - Rc(theta^J) ^ theta^I."""
    M = np.zeros((6, 6))
    for b, (i, j) in enumerate(PAIRS):
        img = np.outer(Rc[:, i], np.eye(4)[j]) - np.outer(Rc[:, j], np.eye(4)[i])
        M[:, b] = two_form_vector(img - img.T)
    return M


@dataclass(frozen=True)
class WeylParts:
    W: np.ndarray
    self_dual: np.ndarray  # 3x3 in SD_BASIS
    anti_self_dual: np.ndarray  # 3x3 in ASD_BASIS
    mixed: np.ndarray  # 3x3 SD-ASD cross block

    @property
    def sd_norm(self) -> float:
        return float(np.linalg.norm(self.self_dual, 2))

    @property
    def asd_norm(self) -> float:
        return float(np.linalg.norm(self.anti_self_dual, 2))


def weyl_from_operator(R) -> WeylParts:
    """W = R - (1/2) Rc ^ id + (1/3) tr(R) id, split by duality."""
    R = np.asarray(getattr(R, "R", R), dtype=float)
    Rc = ricci_from_operator(R)
    W = R - 0.5 * ricci_wedge_id(Rc) + np.trace(R) / 3.0 * np.eye(6)
    return WeylParts(W, SD_BASIS @ W @ SD_BASIS.T, ASD_BASIS @ W @ ASD_BASIS.T,
                     SD_BASIS @ W @ ASD_BASIS.T)


@dataclass(frozen=True)
class LabeledSpectrum:
    self_dual: np.ndarray
    anti_self_dual: np.ndarray
    mixed_norm: float  # norm of the SD-ASD block; zero for Einstein metrics


def labeled_spectrum(R) -> LabeledSpectrum:
    R = np.asarray(getattr(R, "R", R), dtype=float)
    return LabeledSpectrum(np.linalg.eigvalsh(SD_BASIS @ R @ SD_BASIS.T),
                           np.linalg.eigvalsh(ASD_BASIS @ R @ ASD_BASIS.T),
                           float(np.linalg.norm(SD_BASIS @ R @ ASD_BASIS.T, 2)))


def is_self_dual(v: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.allclose(HODGE @ v, v, atol=tol))
