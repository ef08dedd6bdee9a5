"""Exact symbolic derivatives against the closed forms and the numeric engine."""

import numpy as np
import pytest

from oracles import oracle_at, sigma_structure_residual
from pinchlab.families import Family, OneLoopParams, PedersenParams, closed_connection_oneloop, coframe_field
from pinchlab.frames import Chart, ChartPoint, numeric_operator, solve_connection
from pinchlab.spectra import spectrum_oneloop_at, spectrum_pedersen

ONELOOP = [(0.0, [0.7, 0.3, 0.7, 0.3]), (1.0, [2.0, 0.3, 0.7, 0.3]), (0.5, [0.05, -1.0, 0.2, 2.0])]
PEDERSEN = [(8.0, [0.3, 1.1, 0.7, 0.3]), (0.5, [0.7, 2.0, -0.4, 1.0])]


@pytest.mark.parametrize("c,x", ONELOOP)
def test_oneloop_closed_forms_match_exact_derivatives(c, x):
    G, R = oracle_at("oneloop", c, x)
    p = ChartPoint(Chart.HALF_SPACE, x)
    assert np.abs(closed_connection_oneloop(c, p).frame - G).max() <= 1e-12
    assert np.abs(spectrum_oneloop_at(x[0], c).operator() - R).max() <= 1e-12


@pytest.mark.parametrize("m2,x", PEDERSEN)
def test_pedersen_closed_operator_matches_exact_derivatives(m2, x):
    _, R = oracle_at("pedersen", m2, x)
    assert np.abs(spectrum_pedersen(x[0], m2).operator() - R).max() <= 1e-12


@pytest.mark.parametrize("kind,param,x", [("oneloop", c, x) for c, x in ONELOOP] + [("pedersen", m, x) for m, x in PEDERSEN])
def test_numeric_engine_matches_exact_derivatives(kind, param, x):
    G, R = oracle_at(kind, param, x)
    if kind == "oneloop":
        fld, p = coframe_field(Family.ONELOOP, OneLoopParams(param)), ChartPoint(Chart.HALF_SPACE, x)
    else:
        fld, p = coframe_field(Family.PEDERSEN, PedersenParams(param)), ChartPoint(Chart.PEDERSEN_POLAR, x)
    assert np.abs(solve_connection(fld, p, richardson=True).frame - G).max() <= 1e-6
    assert np.abs(numeric_operator(fld, p, richardson=True).R - R).max() <= 1e-6


def test_sigma_forms_satisfy_their_structure_equations():
    for pt in ([0.5, 1.1, 0.7, 0.3], [0.2, 0.4, 2.0, -1.0]):
        assert sigma_structure_residual(pt) <= 1e-14
