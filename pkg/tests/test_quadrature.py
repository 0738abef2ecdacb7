import numpy as np

from weldgff.quadrature import (
    QuadDiffFn,
    VectorFieldSeries,
    annulus_integral,
    contour_integral_circle,
    pair_q_beltrami,
    pair_q_vector,
)


class _Annulus:
    def __init__(self, fn, r_in, r_out):
        self.evaluator = fn
        self.r_in = r_in
        self.r_out = r_out


def test_annulus_area():
    val, err = annulus_integral(lambda z: np.ones_like(z), 1.0, 2.0)
    assert abs(val - 3 * np.pi) < 1e-10
    assert err < 1e-9


def test_annulus_infinite_tail():
    # integral over |z| > 2 of |z|^-5 = 2 pi int_2^inf rho^-4 drho = 2 pi / 24
    val, _ = annulus_integral(lambda z: np.abs(z) ** -5.0, 2.0, np.inf)
    assert abs(val - np.pi / 12) < 1e-10


def test_pair_zero_beltrami():
    mu = _Annulus(lambda z: np.zeros_like(z), 1.0, 2.0)
    val, err = pair_q_beltrami(lambda z: z**2, mu)
    assert abs(val) < 1e-14


def test_pair_polar_closed_form():
    # q = z^2 against the indicator of 1 < |z| < 2 has zero angular average
    mu = _Annulus(lambda z: np.ones_like(z), 1.0, 2.0)
    val, _ = pair_q_beltrami(lambda z: z**2, mu)
    assert abs(val) < 1e-10
    # q = z^2 against conj(z)^2/|z|^2: (1/pi) 2 pi int_1^2 rho^3 drho = 7.5
    mu2 = _Annulus(lambda z: np.conj(z) ** 2 / np.abs(z) ** 2, 1.0, 2.0)
    val2, _ = pair_q_beltrami(lambda z: z**2, mu2)
    assert abs(val2 - 7.5) < 1e-9


def laurent_beltrami_direction(n):
    """mu_n = n 4^n conj(z)^(-n-1) z on |z| > 2; Cauchy transform -z^(n+1)."""
    c = n * 4.0**n

    def ev(z):
        return c * np.conj(z) ** (-n - 1.0) * z

    return _Annulus(ev, 2.0, np.inf)


def test_pair_laurent_mode_picks_coefficient():
    # q = 1/z^4 against mu_2: (q, mu_2) = coefficient of z^-4 in q = 1
    mu2 = laurent_beltrami_direction(2)
    val, _ = pair_q_beltrami(lambda z: z ** -4.0, mu2)
    assert abs(val - 1.0) < 1e-9
    # cross-check with the contour pairing against v_2 = -z^3 oriented as the
    # positive boundary of the support neighbourhood of infinity
    v2 = VectorFieldSeries.basis(2)
    cval, _ = pair_q_vector(lambda z: z ** -4.0, v2, radius=3.0,
                            counterclockwise=False)
    assert abs(val - cval) < 1e-9


def test_pair_q_vector_residues():
    val, _ = pair_q_vector(lambda z: np.zeros_like(z), VectorFieldSeries.basis(0), 1.0)
    assert abs(val) < 1e-14
    # constant q = -phi1^2 against v_{-2} = -1/z d/dz gives +phi1^2
    phi1sq = 0.3 - 0.4j
    val2, _ = pair_q_vector(lambda z: -phi1sq * np.ones_like(z),
                            VectorFieldSeries.basis(-2), 1.0)
    assert abs(val2 - phi1sq) < 1e-12
    # q = 1/z^2 against v_0 = -z d/dz: residue of -1/z = -1
    val3, _ = pair_q_vector(lambda z: z ** -2.0, VectorFieldSeries.basis(0), 1.0)
    assert abs(val3 - (-1.0)) < 1e-12


def test_quad_diff_holomorphy_defect():
    q = QuadDiffFn(lambda z: 1.0 / z**4, 1.0, 4.0)
    assert q.holomorphy_defect() < 1e-6
    bad = QuadDiffFn(lambda z: np.conj(z), 1.0, 4.0)
    assert bad.holomorphy_defect() > 0.5


def test_contour_error_estimate_reported():
    val, err = contour_integral_circle(lambda z: 1.0 / z, 2.0)
    assert abs(val - 1.0) < 1e-12
    assert err < 1e-12
