"""Quadrature kernels: polar annulus integrals and circle contour integrals.

The annulus rule is a tensor product of Gauss-Legendre panels in radius and
the trapezoid rule in angle (spectrally accurate for integrands analytic in
the angle).  Radial panels refine adaptively; every top-level integral is
also recomputed at doubled resolution, and the difference is reported as the
error estimate.  ``r_out = inf`` is handled by the inversion ``rho = r_in/u``.

The two tensor pairings used throughout are

    (q, mu) = (1/pi)    integral of  q(z) mu(z)  over a planar region,
    (q, v)  = (1/2 pi i) contour integral of q(z) v(z) dz,

for a quadratic differential q, a Beltrami coefficient mu and a vector
field v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _panel_value(fn, a: float, b: float, n_r: int, phi: np.ndarray, wphi: float,
                 transform=None) -> complex:
    """Integral over the panel [a, b] x [0, 2pi) in the (possibly transformed)
    radial variable."""
    x, w = _gl(n_r)
    t = 0.5 * (b - a) * x + 0.5 * (a + b)
    wt = 0.5 * (b - a) * w
    if transform is None:
        rho = t
        jac = np.ones_like(t)
    else:
        rho, jac = transform(t)
    z = rho[:, None] * np.exp(1j * phi)[None, :]
    vals = np.asarray(fn(z), dtype=complex)
    radial = vals.sum(axis=1) * wphi
    return complex(np.sum(radial * rho * jac * wt))


def annulus_integral(fn, r_in: float, r_out: float, *, n_phi: int = 128,
                     n_r: int = 16, tol: float = 1e-10, max_panels: int = 200):
    """``integral of fn(z) |dz|^2`` over the annulus ``r_in <= |z| <= r_out``.

    ``fn`` must accept a complex ndarray.  Returns ``(value, error_estimate)``.
    """
    if not (0 <= r_in < r_out):
        raise ValueError("need 0 <= r_in < r_out")

    if math.isinf(r_out):
        if r_in <= 0:
            raise ValueError("r_out = inf requires r_in > 0")

        def transform(u):
            rho = r_in / u
            jac = r_in / u**2
            return rho, jac

        lo, hi = 1e-12, 1.0
    else:
        transform = None
        lo, hi = r_in, r_out

    def run(n_phi: int, n_r: int) -> complex:
        phi = 2 * np.pi * np.arange(n_phi) / n_phi
        wphi = 2 * np.pi / n_phi
        total = 0.0 + 0.0j
        stack = [(lo, hi)]
        done = 0
        while stack:
            a, b = stack.pop()
            whole = _panel_value(fn, a, b, n_r, phi, wphi, transform)
            m = 0.5 * (a + b)
            left = _panel_value(fn, a, m, n_r, phi, wphi, transform)
            right = _panel_value(fn, m, b, n_r, phi, wphi, transform)
            if abs(whole - left - right) < max(tol, 1e-15) or done >= max_panels:
                total += left + right
                done += 1
            else:
                stack.extend([(a, m), (m, b)])
        return total

    coarse = run(n_phi, n_r)
    fine = run(2 * n_phi, int(1.5 * n_r))
    return fine, abs(fine - coarse)


def contour_integral_circle(fn, radius: float, n: int = 256,
                            counterclockwise: bool = True):
    """``(1/2 pi i) contour integral of fn(z) dz`` on ``|z| = radius``.

    Trapezoid rule; returns ``(value, error_estimate)`` with the estimate
    taken from doubling ``n``.
    """

    def run(n):
        z = radius * np.exp(2j * np.pi * np.arange(n) / n)
        vals = np.asarray(fn(z), dtype=complex)
        if np.any(~np.isfinite(vals)):
            raise AccuracyError("contour integrand not finite on the circle")
        return complex(np.mean(vals * z))

    coarse, fine = run(n), run(2 * n)
    val = fine if counterclockwise else -fine
    return val, abs(fine - coarse)


@dataclass
class QuadDiffFn:
    """Holomorphic quadratic differential given by an evaluator on an annulus."""

    evaluator: object
    r_in: float = 0.0
    r_out: float = np.inf

    def __call__(self, z):
        return self.evaluator(np.asarray(z, dtype=complex))

    def holomorphy_defect(self, n_samples: int = 64, h: float = 1e-5,
                          radius: float | None = None) -> float:
        """Max |d/dzbar| over sample points, by centred finite differences."""
        if radius is None:
            lo = self.r_in if self.r_in > 0 else 0.1
            hi = self.r_out if np.isfinite(self.r_out) else lo * 4
            radius = math.sqrt(lo * hi) if hi > lo else lo * 1.5
        z = radius * np.exp(2j * np.pi * np.arange(n_samples) / n_samples)
        dx = (self(z + h) - self(z - h)) / (2 * h)
        dy = (self(z + 1j * h) - self(z - 1j * h)) / (2 * h)
        return float(np.max(np.abs(0.5 * (dx + 1j * dy))))


@dataclass
class VectorFieldSeries:
    """Vector field ``v(z) d/dz`` with finite Laurent coefficient support."""

    coeffs: dict

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for k, c in self.coeffs.items():
            out = out + c * z ** k
        return out

    @staticmethod
    def basis(n: int) -> "VectorFieldSeries":
        """The Laurent basis field ``-z^(n+1) d/dz``."""
        return VectorFieldSeries({n + 1: -1.0})


def pair_q_beltrami(q, mu, *, tol: float = 1e-10, n_phi: int = 128, n_r: int = 16):
    """Pairing ``(q, mu) = (1/pi) integral q mu |dz|^2`` over the support of mu.

    ``mu`` needs attributes ``evaluator``, ``r_in``, ``r_out``.
    Returns ``(value, error_estimate)``.
    """
    if mu.r_out <= mu.r_in:
        return 0.0 + 0.0j, 0.0

    def integrand(z):
        return np.asarray(q(z), dtype=complex) * np.asarray(mu.evaluator(z), dtype=complex)

    val, err = annulus_integral(integrand, mu.r_in, mu.r_out,
                                tol=tol, n_phi=n_phi, n_r=n_r)
    return val / np.pi, err / np.pi


def pair_q_vector(q, v, radius: float, n: int = 256, counterclockwise: bool = True):
    """Pairing ``(q, v) = (1/2 pi i) contour integral q v dz`` on ``|z| = radius``.

    The contour is oriented counterclockwise by default; pass
    ``counterclockwise=False`` when the pairing contour is the positively
    oriented boundary of a neighbourhood of infinity.
    """

    def integrand(z):
        return np.asarray(q(z), dtype=complex) * np.asarray(v(z), dtype=complex)

    return contour_integral_circle(integrand, radius, n, counterclockwise)
