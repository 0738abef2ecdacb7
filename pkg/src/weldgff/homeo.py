"""Circle homeomorphisms as monotone lifts on a uniform grid.

A homeomorphism ``h`` of the circle is stored through its lift values
``psi_i = psi(2 pi i / N)`` with ``psi`` strictly increasing and
``psi(theta + 2 pi) = psi(theta) + 2 pi``.  Between grid points the lift is
interpolated by a monotone cubic (PCHIP), which tolerates the Hoelder-rough
homeomorphisms produced by random measures; analytic homeomorphisms should
be sampled on fine grids.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import GeometryError
from .fields import GmcMeasure


class CircleHomeo:
    """Strictly increasing degree-one circle map ``theta -> psi(theta)``."""

    def __init__(self, lift_values: np.ndarray):
        psi = np.asarray(lift_values, dtype=float)
        if np.any(np.diff(psi) <= 0):
            raise GeometryError("lift values must be strictly increasing")
        self.N = len(psi)
        self.psi = psi
        theta = 2 * np.pi * np.arange(self.N + 1) / self.N
        ext = np.append(psi, psi[0] + 2 * np.pi)
        self._interp = PchipInterpolator(theta, ext)

    # -- constructors ----------------------------------------------------

    @staticmethod
    def identity(N: int = 4096) -> "CircleHomeo":
        return CircleHomeo(2 * np.pi * np.arange(N) / N)

    @staticmethod
    def rotation(alpha: float, N: int = 4096) -> "CircleHomeo":
        return CircleHomeo(2 * np.pi * np.arange(N) / N + alpha)

    @staticmethod
    def from_function(fn, N: int = 4096) -> "CircleHomeo":
        th = 2 * np.pi * np.arange(N) / N
        return CircleHomeo(np.asarray(fn(th), dtype=float))

    @staticmethod
    def from_scattered(theta: np.ndarray, psi: np.ndarray, N: int = 4096) -> "CircleHomeo":
        """Build from monotone samples ``(theta_j, psi_j)`` (lifts, one period)."""
        order = np.argsort(theta)
        th, ps = np.asarray(theta)[order], np.asarray(psi)[order]
        th_ext = np.concatenate([th - 2 * np.pi, th, th + 2 * np.pi])
        ps_ext = np.concatenate([ps - 2 * np.pi, ps, ps + 2 * np.pi])
        interp = PchipInterpolator(th_ext, ps_ext)
        grid = 2 * np.pi * np.arange(N) / N
        return CircleHomeo(interp(grid))

    # -- evaluation -------------------------------------------------------

    def __call__(self, theta):
        """Lift value at arbitrary angles."""
        theta = np.asarray(theta, dtype=float)
        k = np.floor(theta / (2 * np.pi))
        frac = theta - 2 * np.pi * k
        return self._interp(frac) + 2 * np.pi * k

    def point_map(self, z):
        """Action on points of the unit circle."""
        z = np.asarray(z, dtype=complex)
        return np.exp(1j * self(np.angle(z)))

    def inverse(self, newton_steps: int = 4) -> "CircleHomeo":
        """Monotone-interpolated inverse on the same grid resolution.

        The swapped-axes interpolant provides the initial guess; a few
        Newton steps against the forward interpolant make the inverse exact
        at its own grid nodes (up to the forward interpolation itself).
        """
        th = 2 * np.pi * np.arange(self.N) / self.N
        ps = self.psi
        # extend by enough whole turns that [0, 2 pi) is covered
        k0 = int(np.floor(ps[0] / (2 * np.pi)))
        offsets = np.arange(-k0 - 2, -k0 + 3)
        ps_ext = np.concatenate([ps + 2 * np.pi * o for o in offsets])
        th_ext = np.concatenate([th + 2 * np.pi * o for o in offsets])
        interp = PchipInterpolator(ps_ext, th_ext)
        grid = 2 * np.pi * np.arange(self.N) / self.N
        x = interp(grid)
        dpsi = self._interp.derivative()
        for _ in range(newton_steps):
            k = np.floor(x / (2 * np.pi))
            frac = x - 2 * np.pi * k
            f = self._interp(frac) + 2 * np.pi * k - grid
            x = x - f / np.maximum(dpsi(frac), 1e-8)
        return CircleHomeo(_strictify(x))

    def compose(self, other: "CircleHomeo") -> "CircleHomeo":
        """``self o other`` as circle maps."""
        grid = 2 * np.pi * np.arange(self.N) / self.N
        return CircleHomeo(self(other(grid)))

    def sup_distance(self, other: "CircleHomeo") -> float:
        grid = 2 * np.pi * np.arange(max(self.N, other.N)) / max(self.N, other.N)
        d = self(grid) - other(grid)
        # compare as circle maps: remove whole turns
        d = d - 2 * np.pi * np.round(np.mean(d) / (2 * np.pi))
        return float(np.max(np.abs(d)))


def invert_homeo(h: CircleHomeo) -> CircleHomeo:
    return h.inverse()


def homeo_from_measures(m1: GmcMeasure, m2: GmcMeasure, alpha: float,
                        N: int | None = None) -> CircleHomeo:
    """The homeomorphism matching normalised measures: ``h`` maps ``1`` to
    ``e^{-i alpha}`` and pushes the normalised ``m1``-mass of ``h([0, t])``
    onto the normalised ``m2``-mass of ``[0, t]``.

    Concretely ``h = F1^{-1} o (F1(-alpha) + F2)`` in terms of the two
    normalised cumulative distribution functions.
    """
    if not np.all(np.isfinite(m1.log_weights)) or not np.all(np.isfinite(m2.log_weights)):
        raise GeometryError("degenerate measure")
    N = N or len(m1.theta)
    grid1 = np.append(m1.theta, 2 * np.pi)
    grid2 = np.append(m2.theta, 2 * np.pi)
    F1 = np.concatenate([[0.0], m1.normalized_cdf()])
    F2 = np.concatenate([[0.0], m2.normalized_cdf()])
    if F1[-1] <= 0 or F2[-1] <= 0:
        raise GeometryError("zero total mass")

    # F1 extended by one period on each side for the inverse lookup
    y_anchor = float(np.interp(2 * np.pi - alpha, grid1, F1))
    theta = 2 * np.pi * np.arange(N) / N
    y = y_anchor + np.interp(theta, grid2, F2)
    F1_ext = np.concatenate([F1[:-1] - 1.0, F1, F1[1:] + 1.0])
    g1_ext = np.concatenate([grid1[:-1] - 2 * np.pi, grid1, grid1[1:] + 2 * np.pi])
    psi = np.interp(y, F1_ext, g1_ext)
    psi = _strictify(psi)
    return CircleHomeo(psi - 2 * np.pi)


def _strictify(psi: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Nudge a nondecreasing lift to a strictly increasing one."""
    out = psi.copy()
    for i in range(1, len(out)):
        if out[i] <= out[i - 1]:
            out[i] = out[i - 1] + eps
    return out


def pullback_match_defect(h: CircleHomeo, m1: GmcMeasure, m2: GmcMeasure,
                          n_cells: int = 4096) -> float:
    """Total-variation defect of the normalised pullback property on a dyadic
    grid: ``max_t |m1([h(0), h(t)])/|m1| - m2([0, t])/|m2||``."""
    grid1 = np.append(m1.theta, 2 * np.pi)
    grid2 = np.append(m2.theta, 2 * np.pi)
    F1 = np.concatenate([[0.0], m1.normalized_cdf()])
    F2 = np.concatenate([[0.0], m2.normalized_cdf()])
    t = 2 * np.pi * np.arange(n_cells + 1) / n_cells
    ht = h(t)
    k = np.floor(ht / (2 * np.pi))
    F1_at = np.interp(ht - 2 * np.pi * k, grid1, F1) + k
    lhs = F1_at - F1_at[0]
    rhs = np.interp(t, grid2, F2)
    return float(np.max(np.abs(lhs - rhs)))
