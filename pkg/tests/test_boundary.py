import math

import numpy as np
import pytest

from pinchlab.boundary import (
    BoundaryPointC, BoundaryPointR, boundary_metric_g0_cr, boundary_metric_gc, boundary_metric_hb,
    chordal_distance_to_pole, complex_path, conformal_anisotropy, cr_kernel_fields, cr_plane,
    pole_order_gc, pole_order_hb, raw_norm_slope_gc, real_path, rescaled_pullback_gc,
    rescaled_pullback_hb, round_metric, roundness, stereo, stereo_inverse, stereo_jacobian,
)
from pinchlab.errors import DomainViolation, NegativeParameter, PoleAtPInfinity


def sphere_points(n, seed=0):
    X = np.random.default_rng(seed).normal(size=(n, 4))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    return X[X[:, 0] > -0.9]  # keep away from the chart pole


def test_boundary_point_validation():
    BoundaryPointC.from_complex(0.6, 0.8j)
    with pytest.raises(DomainViolation):
        BoundaryPointC([1.0, 0.0, 0.1, 0.0])
    with pytest.raises(DomainViolation):
        BoundaryPointR([0.5, 0.5, 0.5, 0.0])


def test_stereographic_chart():
    for X in sphere_points(50):
        assert np.allclose(stereo_inverse(stereo(X)), X, atol=1e-12)
    u = np.array([0.3, -0.2, 0.5])
    J = stereo_jacobian(u)
    h = 1e-6
    fd = np.column_stack([(stereo_inverse(u + h * e) - stereo_inverse(u - h * e)) / (2 * h) for e in np.eye(3)])
    assert np.abs(J - fd).max() < 1e-8
    assert np.allclose(J.T @ J, round_metric(u), atol=1e-12)


def test_cr_kernel_residual():
    assert cr_kernel_fields(0.0, 0.6).residual <= 1e-10
    for X in sphere_points(200, seed=1):
        z1, z2 = complex(X[0], X[1]), complex(X[2], X[3])
        assert cr_kernel_fields(z1, z2).residual <= 1e-10


def test_cr_field_at_the_centre_point():
    a1, a2 = cr_kernel_fields(0.0, 1.0).holomorphic
    assert a1 == 1.0 and a2 == 0.0
    with pytest.raises(PoleAtPInfinity):
        cr_kernel_fields(-1.0, 0.0)


def test_g0_is_positive_on_the_cr_plane():
    for X in sphere_points(50, seed=2):
        B = cr_plane(X)
        assert np.linalg.matrix_rank(B) == 2
        assert np.all(np.linalg.eigvalsh(boundary_metric_g0_cr(X)) > 0)


def test_h0_is_conformally_round():
    pts = sphere_points(1200, seed=3)[:1000]
    assert len(pts) == 1000
    for X in pts:
        r = roundness(boundary_metric_hb(0.0, X), stereo(X))
        assert r.off_scalar <= 1e-10
    north = roundness(boundary_metric_hb(0.0, [1.0, 0, 0, 0]), np.zeros(3))
    assert north.factor == pytest.approx(0.5, abs=1e-14)


def test_hb_is_not_round_for_positive_b():
    X = real_path(0.5)
    assert roundness(boundary_metric_hb(1.0, X), stereo(X)).off_scalar > 1e-3


@pytest.mark.parametrize("kind,param", [("gc", 0.5), ("gc", 2.0), ("hb", 0.5), ("hb", 1.0)])
def test_rescaled_interior_metric_limits_to_representative(kind, param):
    X = complex_path(1.2) if kind == "gc" else real_path(1.2)
    pull, rep = (rescaled_pullback_gc, boundary_metric_gc) if kind == "gc" else (rescaled_pullback_hb, boundary_metric_hb)
    G = rep(param, X)
    P = pull(param, X, 1e-5)
    assert np.abs(P - G).max() <= 1e-4 * np.abs(G).max()


def test_rescaling_by_two_multiplies_by_four():
    X = real_path(0.9)
    a = rescaled_pullback_hb(0.5, X, 1e-3)
    b = rescaled_pullback_hb(0.5, X, 1e-3, scale=2.0)
    assert np.allclose(b, 4 * a, rtol=1e-14)


def test_representatives_positive_definite_at_the_north_pole():
    N = np.array([1.0, 0, 0, 0])
    for G in (boundary_metric_gc(1.0, N), boundary_metric_hb(1.0, N)):
        assert np.all(np.linalg.eigvalsh(G) > 0)


def test_negative_and_degenerate_parameters():
    N = np.array([1.0, 0, 0, 0])
    with pytest.raises(NegativeParameter):
        boundary_metric_hb(-1.0, N)
    with pytest.raises(NegativeParameter):
        boundary_metric_gc(-1.0, N)
    with pytest.raises(DomainViolation):
        boundary_metric_gc(0.0, N)


def test_paths_hit_requested_distance():
    for d in (1e-3, 0.1, 1.0):
        assert chordal_distance_to_pole(real_path(d)) == pytest.approx(d, rel=1e-9)
        assert chordal_distance_to_pole(complex_path(d)) == pytest.approx(d, rel=1e-9)


def test_anisotropy_is_conformally_invariant():
    X = real_path(0.3)
    G, u = boundary_metric_hb(1.0, X), stereo(X)
    assert conformal_anisotropy(3.7 * G, u) == pytest.approx(conformal_anisotropy(G, u), rel=1e-12)


@pytest.mark.parametrize("fit", [lambda: pole_order_hb(1.0), lambda: pole_order_gc(1.0), lambda: pole_order_gc(0.1)])
def test_pole_orders_are_two(fit):
    f = fit()
    assert abs(f.order - 2.0) <= 0.05
    assert f.residual < 0.05


def test_no_pole_without_twist():
    assert abs(pole_order_hb(0.0).order) < 1e-8
    # along the circle y = z = 0 the twist vanishes
    assert abs(pole_order_hb(1.0, direction=(1.0, 0.0, 0.0)).order) < 1e-8


def test_raw_norm_blows_up():
    assert raw_norm_slope_gc(1.0) < -3.0


def test_chart_pole_rejected():
    assert math.isfinite(chordal_distance_to_pole([-1.0, 0, 0, 0]))
    with pytest.raises(PoleAtPInfinity):
        stereo([-1.0, 0, 0, 0])
