"""Verification suites shared by the command line and the test-suite.

Each grid point runs the numeric Cartan pipeline and compares it against the
closed forms: connection, curvature forms, operator symmetry, spectrum,
Einstein constant, vanishing Weyl half, and the Grassmannian oracle.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from pinchlab.families import (
    Family, HbParams, OneLoopParams, PedersenParams, closed_connection, closed_curvature,
    coframe_field, effective_rho_c,
)
from pinchlab.frames import Chart, ChartPoint, curvature_forms, curvature_operator, solve_connection
from pinchlab.grassmann import DEFAULT_SEED, oracle_extrema
from pinchlab.spectra import (
    ricci_from_operator, sectional_extrema, spectrum_oneloop_at, spectrum_pedersen,
    weyl_from_operator,
)

DEFAULT_C = (0.0, 0.1, 1.0, 10.0)
DEFAULT_B = (0.0, 0.25, 0.5, 1.0)
DEFAULT_RHO_TILDE = (0.01, 0.1, 1.0, 2.0, 10.0, 100.0)
# (phi, zeta0, zetat0) of the half-space grid points
FIBRE = (0.3, 0.7, 0.3)
DEFAULT_VARRHO = (0.1, 0.3, 0.5, 0.7, 0.9)
DEFAULT_M2 = (0.0, 0.5, 1.0, 8.0)
# Euler angles (theta, phi, psi) of the Pedersen grid points
EULER = (1.1, 0.7, 0.3)

TOLERANCES = {
    "connection": 1e-6,
    "curvature_forms": 1e-6,
    "symmetry": 1e-6,
    "spectrum": 1e-6,
    "einstein": 1e-6,
    "weyl_half": 1e-6,
    "oracle_violations": 0.0,
    "oracle_refined": 1e-8,
}


@dataclass(frozen=True)
class GridPoint:
    family: Family
    params: object
    point: ChartPoint

    def label(self) -> dict:
        name = {Family.ONELOOP: "c", Family.HB: "b", Family.PEDERSEN: "m2"}[self.family]
        return {"family": self.family.value, name: getattr(self.params, name),
                "coords": [float(v) for v in self.point.coords]}


def halfspace_point(rho: float) -> ChartPoint:
    return ChartPoint(Chart.HALF_SPACE, [rho, *FIBRE])


def pedersen_point(varrho: float) -> ChartPoint:
    return ChartPoint(Chart.PEDERSEN_POLAR, [varrho, *EULER])


def default_grid(family: Family, values=None, radii=None) -> list[GridPoint]:
    """Grid in deterministic order: parameter outer, radius inner.

    One-loop points sit at rho = rho_tilde * c, or rho = rho_tilde when c = 0.
    h^b points sit at rho' = rho_tilde.
    """
    if family is Family.PEDERSEN:
        return [GridPoint(family, PedersenParams(m2), pedersen_point(r))
                for m2 in (values or DEFAULT_M2) for r in (radii or DEFAULT_VARRHO)]
    rts = radii or DEFAULT_RHO_TILDE
    if family is Family.ONELOOP:
        return [GridPoint(family, OneLoopParams(c), halfspace_point(rt * c if c > 0 else rt))
                for c in (values or DEFAULT_C) for rt in rts]
    return [GridPoint(family, HbParams(b), halfspace_point(rt)) for b in (values or DEFAULT_B) for rt in rts]


def closed_operator(gp: GridPoint) -> np.ndarray:
    if gp.family is Family.PEDERSEN:
        return spectrum_pedersen(gp.point.coords[0], gp.params.m2).operator()
    rho, c = effective_rho_c(gp.family, gp.params, gp.point)
    return spectrum_oneloop_at(rho, c).operator()


def closed_triples(gp: GridPoint) -> tuple[np.ndarray, np.ndarray]:
    if gp.family is Family.PEDERSEN:
        s = spectrum_pedersen(gp.point.coords[0], gp.params.m2)
    else:
        s = spectrum_oneloop_at(*effective_rho_c(gp.family, gp.params, gp.point))
    return s.self_dual(), s.anti_self_dual()


def check_point(gp: GridPoint, step: float | None = None, richardson: bool = True,
                samples: int = 0, seed: int = DEFAULT_SEED) -> dict[str, float]:
    """Residual per check at one grid point (absolute, max over components)."""
    fld = coframe_field(gp.family, gp.params)
    p = gp.point
    out: dict[str, float] = {}
    curv = curvature_forms(fld, p, step=step, richardson=richardson)
    if gp.family is not Family.PEDERSEN:
        conn = solve_connection(fld, p, step=step, richardson=richardson)
        out["connection"] = float(np.abs(conn.frame - closed_connection(gp.family, gp.params, p).frame).max())
        ref = closed_curvature(gp.family, gp.params, p).vectors
        out["curvature_forms"] = float(np.abs(curv.vectors() - ref).max())
    op = curvature_operator(curv, tol=None)
    out["symmetry"] = float(op.asymmetry)
    sd, asd = closed_triples(gp)
    exact = np.sort(np.concatenate([sd, asd]))
    out["spectrum"] = float(np.abs(np.sort(op.eigenvalues()) - exact).max())
    einstein = -6.0 if gp.family is not Family.PEDERSEN else -12.0
    out["einstein"] = float(np.abs(ricci_from_operator(op.R) - einstein * np.eye(4)).max())
    w = weyl_from_operator(op.R)
    out["weyl_half"] = w.sd_norm if gp.family is Family.PEDERSEN else w.asd_norm
    if samples > 0:
        mx, mn = sectional_extrema(sd, asd)
        rep = oracle_extrema(closed_operator(gp), samples, seed=seed, bracket=(mx, mn))
        out["oracle_violations"] = float(rep.sampled.violations)
        out["oracle_refined"] = max(abs(rep.refined_max.K - mx), abs(rep.refined_min.K - mn))
    return out


@dataclass
class CheckSummary:
    name: str
    tolerance: float
    worst: float = 0.0
    where: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.worst <= self.tolerance and not math.isnan(self.worst)


@dataclass
class VerifyReport:
    checks: list[CheckSummary]
    rows: list[tuple[GridPoint, dict[str, float]]]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def run_verify(points: list[GridPoint], step: float | None = None, richardson: bool = True,
               samples: int = 0, seed: int = DEFAULT_SEED, threads: int = 1,
               tolerances: dict | None = None) -> VerifyReport:
    tol = dict(TOLERANCES, **(tolerances or {}))

    def job(gp):
        return check_point(gp, step, richardson, samples, seed)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(job, points))
    else:
        results = [job(gp) for gp in points]
    summaries: dict[str, CheckSummary] = {}
    for gp, res in zip(points, results):
        for name, val in res.items():
            s = summaries.setdefault(name, CheckSummary(name, tol[name], -math.inf))
            if val > s.worst or math.isnan(val):
                s.worst, s.where = val, gp.label()
    order = [n for n in TOLERANCES if n in summaries]
    return VerifyReport([summaries[n] for n in order], list(zip(points, results)))
