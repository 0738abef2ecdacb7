import numpy as np
import pytest

from weldgff.errors import DomainError
from weldgff.series import PowerSeriesMap, series_compose_invert, series_from_boundary


def test_identity_eval_derivs():
    f = PowerSeriesMap.identity()
    v = f.eval_derivs(0.5, 2)
    assert np.allclose([v[0], v[1], v[2]], [0.5, 1.0, 0.0])


def test_coefficients_read_off():
    f = PowerSeriesMap.from_perturbation([0.1])  # z (1 + 0.1 z)
    v = f.eval_derivs(0.0, 2)
    assert np.isclose(v[1], 1.0)
    assert np.isclose(v[2], 0.2)


def test_derivative_against_finite_difference():
    rng = np.random.default_rng(7)
    a = 0.1 * (rng.standard_normal(6) + 1j * rng.standard_normal(6))
    f = PowerSeriesMap.from_perturbation(a)
    z = 0.37 + 0.21j
    h = 1e-6
    fd = (f(z + h) - f(z - h)) / (2 * h)
    assert abs(f.derivative_values(z, 1) - fd) / abs(fd) < 1e-6


def test_lagrange_inversion_low_order():
    # f(z) = z + a z^2  =>  f^{-1}(w) = w - a w^2 + 2 a^2 w^3 + O(w^4)
    a = 0.17 - 0.05j
    f = PowerSeriesMap(("interior"), np.array([0, 1, a], dtype=complex))
    inv = f.inverse_series(3)
    assert np.allclose(inv.coef[:4], [0, 1, -a, 2 * a**2], atol=1e-14)


def test_compose_with_identity():
    f = PowerSeriesMap.from_perturbation([0.2, -0.1j])
    g = PowerSeriesMap.identity(f.truncation)
    h = f.compose(g)
    assert np.allclose(h.coef[: len(f.coef)], f.coef, atol=1e-14)


def test_inverse_roundtrip_on_circle():
    rng = np.random.default_rng(3)
    a = 0.05 * (rng.standard_normal(8) + 1j * rng.standard_normal(8))
    f = PowerSeriesMap.from_perturbation(a, domain_radius=None)
    f = PowerSeriesMap(f.kind, f.coef[:65] if len(f.coef) > 65 else
                       np.concatenate([f.coef, np.zeros(65 - len(f.coef))]))
    inv = series_compose_invert(f)
    z = 0.5 * np.exp(2j * np.pi * np.arange(64) / 64)
    assert np.max(np.abs(inv(f(z)) - z)) < 1e-10


def test_schwarzian_identity_zero():
    f = PowerSeriesMap.identity()
    pre, sch = f.schwarzian(np.array([0.1, 0.4 - 0.2j]))
    assert np.allclose(pre, 0) and np.allclose(sch, 0)


def test_schwarzian_mobius_annihilated():
    f = PowerSeriesMap.mobius_disc(0.3 + 0.2j, M=96)
    z = 0.55 * np.exp(2j * np.pi * np.arange(64) / 64)
    _, sch = f.schwarzian(z)
    assert np.max(np.abs(sch)) < 1e-12


def test_schwarzian_quadratic_oracle():
    # f = z + z^2/2: A f(0) = 1, S f(0) = (A f)'(0) - 1/2 A f(0)^2 = -3/2
    f = PowerSeriesMap("interior", np.array([0, 1, 0.5], dtype=complex))
    pre, sch = f.schwarzian(0.0)
    assert np.isclose(pre, 1.0)
    assert np.isclose(sch, -1.5)


def test_schwarzian_chain_rule():
    rng = np.random.default_rng(11)
    M = 128
    fa = 0.04 * (rng.standard_normal(5) + 1j * rng.standard_normal(5))
    ga = 0.04 * (rng.standard_normal(5) + 1j * rng.standard_normal(5))
    f = PowerSeriesMap.from_perturbation(np.concatenate([fa, np.zeros(M)]))
    g = PowerSeriesMap.from_perturbation(np.concatenate([ga, np.zeros(M)]))
    fg = f.compose(g)
    z = 0.4 * np.exp(2j * np.pi * np.arange(16) / 16)
    _, s_fg = fg.schwarzian(z)
    _, s_f = f.schwarzian(g(z))
    _, s_g = g.schwarzian(z)
    gp = g.derivative_values(z, 1)
    assert np.max(np.abs(s_fg - (s_f * gp**2 + s_g))) < 1e-9


def test_domain_check():
    f = PowerSeriesMap.from_perturbation([0.1], domain_radius=1.0)
    with pytest.raises(DomainError):
        f(1.5)


def test_series_from_boundary_roundtrip():
    f = PowerSeriesMap.from_perturbation([0.2, 0.0, -0.05])
    th = 2 * np.pi * np.arange(256) / 256
    vals = f(np.exp(1j * th))
    rec = series_from_boundary(vals, "interior")
    assert np.allclose(rec.coef[:5], f.coef[:5], atol=1e-12)


def test_series_from_boundary_exterior():
    g = PowerSeriesMap.exterior_from_coeffs(1.3, 0.2 - 0.1j, [0.05, 0.02j])
    th = 2 * np.pi * np.arange(256) / 256
    vals = g(np.exp(1j * th))
    rec = series_from_boundary(vals, "exterior")
    assert np.isclose(rec.deriv_at_infinity(), 1.3, atol=1e-12)
    assert np.allclose(rec.coef[:4], g.coef[:4], atol=1e-12)
