"""Jordan curves as polylines, and the welding triple container."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import GeometryError


@dataclass
class CurvePolyline:
    """Closed curve through ordered complex points (last joins back to first)."""

    points: np.ndarray
    closed: bool = True

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        if len(self.points) < 8:
            raise GeometryError("too few points for a curve")

    def __len__(self):
        return len(self.points)

    def diameter(self) -> float:
        p = self.points
        return float(np.max(np.abs(p - p.mean())) * 2.0)

    def winding_number(self, z0: complex = 0.0) -> int:
        p = self.points - z0
        dtheta = np.angle(np.roll(p, -1) / p)
        return int(round(np.sum(dtheta) / (2 * np.pi)))

    def separates_zero_from_infinity(self) -> bool:
        return abs(self.winding_number(0.0)) == 1

    def is_simple(self) -> bool:
        """No self-intersection at polyline resolution (shapely test)."""
        from shapely.geometry import LineString

        p = self.points
        coords = np.column_stack([p.real, p.imag])
        if self.closed:
            coords = np.vstack([coords, coords[:1]])
            return LineString(coords).is_ring and LineString(coords[:-1]).is_simple
        return LineString(coords).is_simple

    def scaled(self, lam: complex) -> "CurvePolyline":
        return CurvePolyline(self.points * lam, self.closed)

    def reflected(self) -> "CurvePolyline":
        """Image under ``z -> 1/conj(z)`` (orientation preserved)."""
        return CurvePolyline(1.0 / np.conj(self.points), self.closed)


def hausdorff_distance(a: CurvePolyline, b: CurvePolyline) -> float:
    """Symmetric point-set Hausdorff distance between the two polylines."""
    pa = np.column_stack([a.points.real, a.points.imag])
    pb = np.column_stack([b.points.real, b.points.imag])
    d_ab = np.max(cKDTree(pb).query(pa)[0])
    d_ba = np.max(cKDTree(pa).query(pb)[0])
    return float(max(d_ab, d_ba))


def normalized_hausdorff(a: CurvePolyline, b: CurvePolyline,
                         scale_a: complex, scale_b: complex) -> float:
    """Hausdorff distance after normalising each curve by its own gauge scale
    (typically ``f'(0)``, making the conformal radius from 0 equal to one)."""
    return hausdorff_distance(a.scaled(1.0 / scale_a), b.scaled(1.0 / scale_b))


@dataclass
class WeldingTriple:
    """A curve with its interior/exterior uniformisations and welding map.

    ``h`` maps interior boundary angles to exterior boundary angles,
    ``curve = f(S^1) = g(S^1)`` up to the stated residual.
    """

    h: object
    f: object
    g: object
    curve: CurvePolyline
    residual: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def f_prime_0(self) -> complex:
        return self.f.deriv_at_zero()

    @property
    def g_prime_inf(self) -> complex:
        return self.g.deriv_at_infinity()
