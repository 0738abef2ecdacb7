import numpy as np
import pytest

from weldgff.errors import GeometryError
from weldgff.geometry import CurvePolyline, hausdorff_distance
from weldgff.riemann import curve_from_series, riemann_maps_of_curve
from weldgff.series import PowerSeriesMap


def circle_curve(R=1.0, n=512):
    return CurvePolyline(R * np.exp(2j * np.pi * np.arange(n) / n))


def test_circle_maps():
    R = 1.7
    tri = riemann_maps_of_curve(circle_curve(R))
    assert abs(tri.f_prime_0 - R) < 1e-10
    assert abs(tri.g_prime_inf - R) < 1e-10
    # h = identity up to rotation: the lift is theta + const
    grid = 2 * np.pi * np.arange(64) / 64
    d = tri.h(grid) - grid
    assert np.max(np.abs(d - d.mean())) < 1e-8


def test_perturbed_circle_recovers_series():
    f = PowerSeriesMap.from_perturbation([0.1, 0.0, 0.0])
    tri = riemann_maps_of_curve(curve_from_series(f, 1024))
    # recovered interior map should match the generating coefficients
    assert abs(tri.f.coef[1] - 1.0) < 1e-6
    assert abs(tri.f.coef[2] - 0.1) < 1e-6
    assert np.max(np.abs(tri.f.coef[3:8])) < 1e-6
    assert tri.residual < 1e-8


def test_boundary_correspondence_monotone():
    f = PowerSeriesMap.from_perturbation([0.15, -0.05 + 0.1j])
    tri = riemann_maps_of_curve(curve_from_series(f, 1024))
    grid = 2 * np.pi * np.arange(512) / 512
    lift = tri.h(grid)
    assert np.all(np.diff(lift) > 0)


def test_welding_identity_on_curve():
    # g(e^{i h(theta)}) = f(e^{i theta}) along the boundary
    f = PowerSeriesMap.from_perturbation([0.12, 0.08j])
    tri = riemann_maps_of_curve(curve_from_series(f, 1024))
    th = 2 * np.pi * np.arange(256) / 256
    lhs = tri.f(np.exp(1j * th))
    rhs = tri.g(np.exp(1j * tri.h(th)))
    assert np.max(np.abs(lhs - rhs)) < 1e-7


def test_refuses_non_separating_curve():
    pts = 0.3 * np.exp(2j * np.pi * np.arange(128) / 128) + 2.0
    with pytest.raises(GeometryError):
        riemann_maps_of_curve(CurvePolyline(pts))


def test_hausdorff_distance():
    a = circle_curve(1.0)
    b = circle_curve(1.05)
    assert abs(hausdorff_distance(a, b) - 0.05) < 1e-3


def test_clockwise_input_handled():
    pts = np.exp(-2j * np.pi * np.arange(512) / 512) * 1.3
    tri = riemann_maps_of_curve(CurvePolyline(pts))
    assert abs(tri.f_prime_0 - 1.3) < 1e-9
